//! Parameter learning from complete data: context counts, then maximum
//! likelihood, Bayesian (symmetric Dirichlet) or imprecise Dirichlet
//! estimates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, NodeId, NodeKind};
use crate::credal::IntervalCredalSet;
use crate::error::{Error, Result};
use crate::params::{structural_zeros, CsddParams, PsddParams};

/// Complete binary instances with multiplicities. Row `r` holds variable
/// `x` at index `x - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    names: Vec<String>,
    rows: Vec<Vec<bool>>,
    counts: Vec<u64>,
}

impl Dataset {
    pub fn new(names: Vec<String>) -> Dataset {
        Dataset {
            names,
            rows: Vec::new(),
            counts: Vec::new(),
        }
    }

    /// Dataset over variables `X1..Xn`.
    pub fn with_default_names(num_vars: usize) -> Dataset {
        Dataset::new((1..=num_vars).map(|i| format!("X{i}")).collect())
    }

    pub fn push(&mut self, row: Vec<bool>, count: u64) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::InvalidDataset(format!(
                "row has {} values, expected {}",
                row.len(),
                self.names.len()
            )));
        }
        self.rows.push(row);
        self.counts.push(count);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[bool], u64)> {
        self.rows
            .iter()
            .map(|r| r.as_slice())
            .zip(self.counts.iter().copied())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowPolicy {
    /// A row violating the circuit is an error.
    Strict,
    /// Rows violating the circuit are skipped and counted.
    Lenient,
}

/// Per-node context counts. `states[n]` has one count per element for a
/// decision node and `[#true, #false]` for a `⊤` terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextCounts {
    pub context: Vec<u64>,
    pub states: Vec<Vec<u64>>,
    pub dropped: u64,
}

pub fn collect_counts(c: &Circuit, data: &Dataset, policy: RowPolicy) -> Result<ContextCounts> {
    if data.num_vars() != c.num_vars() {
        return Err(Error::InvalidDataset(format!(
            "dataset has {} variables, circuit has {}",
            data.num_vars(),
            c.num_vars()
        )));
    }
    let mut counts = ContextCounts {
        context: vec![0; c.len()],
        states: c
            .nodes()
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Decision(el) => vec![0; el.len()],
                NodeKind::True => vec![0; 2],
                _ => Vec::new(),
            })
            .collect(),
        dropped: 0,
    };
    let mut stack = Vec::new();
    for (r, (row, w)) in data.rows().enumerate() {
        if !c.eval_unchecked(c.root(), row) {
            match policy {
                RowPolicy::Strict => return Err(Error::InconsistentRow { row: r }),
                RowPolicy::Lenient => {
                    counts.dropped += w;
                    continue;
                }
            }
        }
        stack.push(c.root());
        while let Some(n) = stack.pop() {
            counts.context[n.index()] += w;
            match &c.node(n).kind {
                NodeKind::Decision(el) => {
                    let i = el
                        .iter()
                        .position(|e| c.eval_unchecked(e.prime, row))
                        .expect("consistent row selects a prime");
                    counts.states[n.index()][i] += w;
                    stack.push(el[i].sub);
                    stack.push(el[i].prime);
                }
                NodeKind::True => {
                    let x = c.vtree().leaf_var(c.node(n).vtree).unwrap();
                    let s = if row[x as usize - 1] { 0 } else { 1 };
                    counts.states[n.index()][s] += w;
                }
                _ => {}
            }
        }
    }
    Ok(counts)
}

fn feasible(c: &Circuit, n: NodeId) -> Vec<bool> {
    structural_zeros(c, n).into_iter().map(|z| !z).collect()
}

fn parameterized(c: &Circuit) -> impl Iterator<Item = NodeId> + '_ {
    c.ids()
        .filter(|&n| matches!(c.node(n).kind, NodeKind::Decision(_) | NodeKind::True))
}

/// Nodes reached from the root through elements with no `⊥` child. The
/// rest can never see data.
fn reachable(c: &Circuit) -> Vec<bool> {
    let mut seen = vec![false; c.len()];
    seen[c.root().index()] = true;
    for i in (0..c.len()).rev() {
        if !seen[i] {
            continue;
        }
        for e in c.node(NodeId(i as u32)).elements() {
            if !c.node(e.prime).is_false() && !c.node(e.sub).is_false() {
                seen[e.prime.index()] = true;
                seen[e.sub.index()] = true;
            }
        }
    }
    seen
}

/// `⊤` terminals store `[θ, 1 − θ]` so that the file formats, which carry
/// only `θ`, reproduce them exactly.
fn terminal_form(c: &Circuit, n: NodeId, theta: Vec<f64>) -> Vec<f64> {
    if c.node(n).is_true() {
        vec![theta[0], 1.0 - theta[0]]
    } else {
        theta
    }
}

fn uniform(ok: &[bool]) -> Vec<f64> {
    let live = ok.iter().filter(|&&b| b).count() as f64;
    ok.iter()
        .map(|&b| if b { 1.0 / live } else { 0.0 })
        .collect()
}

/// Relative frequencies. Nodes that no model reaches get a uniform pmf.
pub fn estimate_ml(c: &Circuit, counts: &ContextCounts) -> Result<PsddParams> {
    let mut out = PsddParams::new(c.len());
    let reach = reachable(c);
    for n in parameterized(c) {
        let ok = feasible(c, n);
        let live = ok.iter().filter(|&&b| b).count();
        let total = counts.context[n.index()];
        let theta: Vec<f64> = if live == 1 {
            ok.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
        } else if total == 0 && !reach[n.index()] {
            uniform(&ok)
        } else if total == 0 {
            return Err(Error::EmptyContext(n));
        } else {
            counts.states[n.index()]
                .iter()
                .zip(&ok)
                .map(|(&k, &b)| if b { k as f64 / total as f64 } else { 0.0 })
                .collect()
        };
        out.set(n, terminal_form(c, n, theta));
    }
    Ok(out)
}

fn check_ess(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidSampleSize(s));
    }
    Ok(())
}

/// Symmetric Dirichlet prior of total strength `s` spread over the
/// feasible (non-`⊥`) states.
pub fn estimate_bayes(c: &Circuit, counts: &ContextCounts, s: f64) -> Result<PsddParams> {
    check_ess(s)?;
    let mut out = PsddParams::new(c.len());
    for n in parameterized(c) {
        let ok = feasible(c, n);
        let live = ok.iter().filter(|&&b| b).count() as f64;
        let total = counts.context[n.index()] as f64 + s;
        let theta: Vec<f64> = if live == 1.0 {
            ok.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
        } else if total == 0.0 {
            return Err(Error::EmptyContext(n));
        } else {
            counts.states[n.index()]
                .iter()
                .zip(&ok)
                .map(|(&k, &b)| {
                    if b {
                        (k as f64 + s / live) / total
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        out.set(n, terminal_form(c, n, theta));
    }
    Ok(out)
}

/// Imprecise Dirichlet model: `[n_i / (N + s), (n_i + s) / (N + s)]` per
/// feasible state, `[0, 0]` for `⊥` subs, then tightened to reachable bounds.
pub fn estimate_idm(c: &Circuit, counts: &ContextCounts, s: f64) -> Result<CsddParams> {
    check_ess(s)?;
    let mut out = CsddParams::new(c.len());
    let reach = reachable(c);
    for n in parameterized(c) {
        let ok = feasible(c, n);
        let total = counts.context[n.index()] as f64 + s;
        let live = ok.iter().filter(|&&b| b).count();
        if total == 0.0 && live > 1 {
            if reach[n.index()] {
                return Err(Error::EmptyContext(n));
            }
            let cs = IntervalCredalSet::point(&uniform(&ok))?;
            out.set(n, cs);
            continue;
        }
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        for (&k, &b) in counts.states[n.index()].iter().zip(&ok) {
            if !b {
                lo.push(0.0);
                hi.push(0.0);
            } else if live == 1 {
                lo.push(1.0);
                hi.push(1.0);
            } else {
                lo.push(k as f64 / total);
                hi.push((k as f64 + s) / total);
            }
        }
        let cs = if c.node(n).is_true() {
            IntervalCredalSet::binary(lo[0], hi[0])
        } else {
            IntervalCredalSet::new(lo, hi)
        };
        let cs = cs.map_err(|e| Error::InvalidParameters {
            node: n,
            reason: format!("{e}"),
        })?;
        out.set(n, cs);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Estimator {
    MaxLikelihood,
    Bayes(f64),
}

pub fn learn_psdd(
    c: &Circuit,
    data: &Dataset,
    est: Estimator,
    policy: RowPolicy,
) -> Result<PsddParams> {
    let counts = collect_counts(c, data, policy)?;
    match est {
        Estimator::MaxLikelihood => estimate_ml(c, &counts),
        Estimator::Bayes(s) => estimate_bayes(c, &counts, s),
    }
}

pub fn learn_csdd(c: &Circuit, data: &Dataset, s: f64, policy: RowPolicy) -> Result<CsddParams> {
    let counts = collect_counts(c, data, policy)?;
    estimate_idm(c, &counts, s)
}
