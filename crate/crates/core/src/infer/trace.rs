use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::Pass;
use crate::circuit::{Circuit, NodeId, NodeKind};
use crate::credal::same_point;
use crate::params::CsddParams;

/// Which quantity a node was being optimized for when it was visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraceMode {
    /// Linearized conditional `(1 − μ) P(x, e) − μ P(¬x, e)`.
    Main,
    /// Lower evidence probability.
    Lower,
    /// Upper evidence probability.
    Upper,
    /// Robustness ratio.
    Ratio,
    /// Upper MAP value.
    Max,
}

/// One LP decision that the final value depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub node: NodeId,
    pub mode: TraceMode,
    pub vertex: Vec<f64>,
}

/// Node visits and LP choices reached top-down from the root along
/// contributing branches of the final pass.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InferenceTrace {
    pub visits: Vec<(NodeId, TraceMode)>,
    pub entries: Vec<TraceEntry>,
}

impl InferenceTrace {
    /// First vertex recorded for `n`, if any.
    pub fn vertex_of(&self, n: NodeId) -> Option<&[f64]> {
        self.entries
            .iter()
            .find(|e| e.node == n)
            .map(|e| e.vertex.as_slice())
    }
}

#[derive(Default)]
pub(crate) struct Tracer {
    pub trace: InferenceTrace,
    seen: BTreeSet<(NodeId, TraceMode)>,
}

impl Tracer {
    /// Marks a visit; false if `(n, mode)` was already expanded.
    pub fn enter(&mut self, n: NodeId, mode: TraceMode) -> bool {
        if !self.seen.insert((n, mode)) {
            return false;
        }
        self.trace.visits.push((n, mode));
        true
    }

    pub fn record(&mut self, n: NodeId, mode: TraceMode, vertex: Option<&Vec<f64>>) {
        if let Some(v) = vertex {
            self.trace.entries.push(TraceEntry {
                node: n,
                mode,
                vertex: v.clone(),
            });
        }
    }

    /// Walks a lower or upper evidence pass from `start`.
    pub fn walk_bound(&mut self, c: &Circuit, pass: &Pass, start: NodeId, mode: TraceMode) {
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            if !self.enter(n, mode) {
                continue;
            }
            let vertex = pass.vertex.get(n.index()).and_then(|v| v.as_ref());
            self.record(n, mode, vertex);
            if let NodeKind::Decision(el) = &c.node(n).kind {
                // A zero product still depends on the choices that made it zero.
                for (i, x) in el.iter().enumerate() {
                    if !vertex.is_some_and(|v| v[i] == 0.0) {
                        stack.push(x.sub);
                        stack.push(x.prime);
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactnessStatus {
    /// Every credal set was resolved to a single vertex, so the value is
    /// attained by one PSDD in the strong extension.
    Exact,
    /// Some credal set was resolved to different vertices along different
    /// paths; the value may lie outside the exact range.
    PossiblyOuter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Conflict {
    pub node: NodeId,
    /// Distinct vertices used, in first-use order.
    pub vertices: Vec<Vec<f64>>,
    /// Position of each vertex in the credal set's vertex enumeration.
    pub indices: Vec<Option<usize>>,
    pub modes: Vec<TraceMode>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessCertificate {
    pub status: ExactnessStatus,
    pub conflicts: Vec<Conflict>,
    /// Shared nodes entered under different modes whose sub-circuit holds a
    /// conflict: the points where the paths that disagree meet.
    pub entry_points: Vec<NodeId>,
}

impl ExactnessCertificate {
    pub fn is_exact(&self) -> bool {
        self.status == ExactnessStatus::Exact
    }

    pub fn conflicted_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.conflicts.iter().map(|c| c.node)
    }
}

pub fn exactness_certificate(
    c: &Circuit,
    p: &CsddParams,
    trace: &InferenceTrace,
) -> ExactnessCertificate {
    let mut by_node: BTreeMap<NodeId, (Vec<Vec<f64>>, Vec<TraceMode>)> = BTreeMap::new();
    for e in &trace.entries {
        let slot = by_node.entry(e.node).or_default();
        if !slot.0.iter().any(|v| same_point(v, &e.vertex)) {
            slot.0.push(e.vertex.clone());
        }
        if !slot.1.contains(&e.mode) {
            slot.1.push(e.mode);
        }
    }
    let mut conflicts = Vec::new();
    let mut conflicted = vec![false; c.len()];
    for (node, (vertices, modes)) in by_node {
        if vertices.len() < 2 {
            continue;
        }
        conflicted[node.index()] = true;
        let indices = match p.get(node) {
            Some(cs) => match cs.vertices() {
                Ok(all) => vertices
                    .iter()
                    .map(|v| all.iter().position(|w| same_point(v, w)))
                    .collect(),
                Err(_) => vec![None; vertices.len()],
            },
            None => vec![None; vertices.len()],
        };
        conflicts.push(Conflict {
            node,
            vertices,
            indices,
            modes,
        });
    }

    let mut below = conflicted.clone();
    for (i, n) in c.nodes().iter().enumerate() {
        if n.elements()
            .iter()
            .any(|x| below[x.prime.index()] || below[x.sub.index()])
        {
            below[i] = true;
        }
    }
    let mult = c.multiplicity().multiplicity;
    let mut modes: BTreeMap<NodeId, BTreeSet<TraceMode>> = BTreeMap::new();
    for &(n, m) in &trace.visits {
        modes.entry(n).or_default().insert(m);
    }
    let entry_points = modes
        .into_iter()
        .filter(|(n, ms)| ms.len() > 1 && mult[n.index()] > 1 && below[n.index()])
        .map(|(n, _)| n)
        .collect();

    let status = if conflicts.is_empty() {
        ExactnessStatus::Exact
    } else {
        ExactnessStatus::PossiblyOuter
    };
    ExactnessCertificate {
        status,
        conflicts,
        entry_points,
    }
}
