//! Parameter tables attached to circuit nodes.
//!
//! Decision nodes get one entry per element (in element order); `⊤`
//! terminals get two states, `X = true` then `X = false`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, NodeId, NodeKind};
use crate::credal::{IntervalCredalSet, COMPARE_TOL, REJECT_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ParamTable<P> {
    entries: Vec<Option<P>>,
}

pub type PsddParams = ParamTable<Vec<f64>>;
pub type CsddParams = ParamTable<IntervalCredalSet>;

impl<P> ParamTable<P> {
    pub fn new(len: usize) -> ParamTable<P> {
        ParamTable {
            entries: (0..len).map(|_| None).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: NodeId) -> Option<&P> {
        self.entries.get(id.index()).and_then(|p| p.as_ref())
    }

    pub fn set(&mut self, id: NodeId, p: P) {
        self.entries[id.index()] = Some(p);
    }

    pub fn param(&self, id: NodeId) -> Result<&P> {
        self.get(id).ok_or(Error::MissingParameters(id))
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &P)> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.as_ref().map(|p| (NodeId(i as u32), p)))
    }

    pub fn map<Q>(&self, mut f: impl FnMut(NodeId, &P) -> Q) -> ParamTable<Q> {
        ParamTable {
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(i, p)| p.as_ref().map(|p| f(NodeId(i as u32), p)))
                .collect(),
        }
    }
}

/// Nodes that carry parameters: decision nodes and `⊤` terminals.
pub fn is_parameterized(c: &Circuit, id: NodeId) -> bool {
    matches!(c.node(id).kind, NodeKind::Decision(_) | NodeKind::True)
}

/// Number of states of the distribution at a parameterized node.
pub fn state_count(c: &Circuit, id: NodeId) -> usize {
    match &c.node(id).kind {
        NodeKind::Decision(el) => el.len(),
        NodeKind::True => 2,
        _ => 0,
    }
}

/// States whose sub is `⊥` (structural zeros).
pub fn structural_zeros(c: &Circuit, id: NodeId) -> Vec<bool> {
    match &c.node(id).kind {
        NodeKind::Decision(el) => el.iter().map(|e| c.node(e.sub).is_false()).collect(),
        NodeKind::True => vec![false, false],
        _ => Vec::new(),
    }
}

fn bad(node: NodeId, reason: alloc::string::String) -> Error {
    Error::InvalidParameters { node, reason }
}

pub fn validate_psdd(c: &Circuit, p: &PsddParams) -> Result<()> {
    if p.len() != c.len() {
        return Err(bad(
            c.root(),
            format!("table covers {} nodes, circuit has {}", p.len(), c.len()),
        ));
    }
    for id in c.ids() {
        if !is_parameterized(c, id) {
            continue;
        }
        let theta = p.param(id)?;
        let k = state_count(c, id);
        if theta.len() != k {
            return Err(bad(
                id,
                format!("{} parameters for {k} states", theta.len()),
            ));
        }
        if theta
            .iter()
            .any(|&t| !(-REJECT_TOL..=1.0 + REJECT_TOL).contains(&t))
        {
            return Err(bad(id, format!("parameter outside [0, 1]: {theta:?}")));
        }
        let s: f64 = theta.iter().sum();
        if (s - 1.0).abs() > REJECT_TOL {
            return Err(bad(id, format!("parameters sum to {s}")));
        }
        for (i, z) in structural_zeros(c, id).into_iter().enumerate() {
            if z && theta[i].abs() > COMPARE_TOL {
                return Err(bad(
                    id,
                    format!("element {i} has a ⊥ sub but θ = {}", theta[i]),
                ));
            }
        }
    }
    Ok(())
}

pub fn validate_csdd(c: &Circuit, p: &CsddParams) -> Result<()> {
    if p.len() != c.len() {
        return Err(bad(
            c.root(),
            format!("table covers {} nodes, circuit has {}", p.len(), c.len()),
        ));
    }
    for id in c.ids() {
        if !is_parameterized(c, id) {
            continue;
        }
        let cs = p.param(id)?;
        let k = state_count(c, id);
        if cs.k() != k {
            return Err(bad(
                id,
                format!("credal set over {} states for {k} states", cs.k()),
            ));
        }
        for (i, z) in structural_zeros(c, id).into_iter().enumerate() {
            if z && cs.upper()[i] > COMPARE_TOL {
                return Err(bad(
                    id,
                    format!("element {i} has a ⊥ sub but upper bound {}", cs.upper()[i]),
                ));
            }
        }
    }
    Ok(())
}

/// Degenerate CSDD parameters equal to a PSDD.
pub fn credal_from_psdd(p: &PsddParams) -> Result<CsddParams> {
    let mut out = CsddParams::new(p.len());
    for (id, theta) in p.iter() {
        out.set(id, IntervalCredalSet::point(theta)?);
    }
    Ok(out)
}
