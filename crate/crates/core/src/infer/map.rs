use alloc::vec::Vec;

use super::{check_csdd, check_psdd, leaf_var, literal_value, Pass};
use crate::circuit::{Circuit, Evidence, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::params::{CsddParams, PsddParams};

const TIE_REL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MapResult {
    /// `max_x P(x, e)`.
    pub value: f64,
    /// Complete assignment: the evidence plus the maximizing completion.
    pub assignment: Vec<bool>,
    /// Whether a near-tie was broken on the backtracking path.
    pub tied: bool,
}

pub(crate) fn argmax(xs: impl Iterator<Item = f64>) -> (usize, f64, bool) {
    let xs: Vec<f64> = xs.collect();
    let best = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_REL * best.abs();
    let first = xs.iter().position(|&x| x >= best - tol).unwrap_or(0);
    let ties = xs.iter().filter(|&&x| x >= best - tol).count() > 1;
    (first, best, ties)
}

/// Max-product pass with backtracking. Ties go to the lowest element index,
/// and to `X = true` at `⊤` terminals.
pub fn map_psdd(c: &Circuit, p: &PsddParams, e: &Evidence) -> Result<MapResult> {
    check_psdd(c, p, e)?;
    if !c.is_consistent(e) {
        return Err(Error::InconsistentEvidence);
    }
    let mut value = alloc::vec![0.0; c.len()];
    for (i, n) in c.nodes().iter().enumerate() {
        let id = NodeId(i as u32);
        value[i] = match &n.kind {
            NodeKind::False => 0.0,
            NodeKind::Literal { var, positive } => literal_value(e.get(*var), *positive),
            NodeKind::True => {
                let th = p.param(id)?;
                match e.get(leaf_var(c, id)) {
                    Some(true) => th[0],
                    Some(false) => th[1],
                    None => th[0].max(th[1]),
                }
            }
            NodeKind::Decision(el) => {
                let th = p.param(id)?;
                el.iter()
                    .zip(th)
                    .map(|(x, t)| t * value[x.prime.index()] * value[x.sub.index()])
                    .fold(0.0, f64::max)
            }
        };
    }
    let mut assignment: Vec<bool> = e.values().iter().map(|v| v.unwrap_or(false)).collect();
    let mut tied = false;
    let mut stack = alloc::vec![c.root()];
    while let Some(n) = stack.pop() {
        match &c.node(n).kind {
            NodeKind::False => {}
            NodeKind::Literal { var, positive } => {
                if e.get(*var).is_none() {
                    assignment[*var as usize - 1] = *positive;
                }
            }
            NodeKind::True => {
                let x = leaf_var(c, n);
                if e.get(x).is_none() {
                    let th = p.param(n)?;
                    let (i, _, t) = argmax(th.iter().copied());
                    tied |= t;
                    assignment[x as usize - 1] = i == 0;
                }
            }
            NodeKind::Decision(el) => {
                let th = p.param(n)?;
                let (i, _, t) = argmax(
                    el.iter()
                        .zip(th)
                        .map(|(x, t)| t * value[x.prime.index()] * value[x.sub.index()]),
                );
                tied |= t;
                stack.push(el[i].sub);
                stack.push(el[i].prime);
            }
        }
    }
    Ok(MapResult {
        value: value[c.root().index()],
        assignment,
        tied,
    })
}

/// Upper bound on `max_x P(x, e)` over the CSDD.
pub(crate) fn map_upper_pass(c: &Circuit, p: &CsddParams, e: &Evidence, record: bool) -> Pass {
    let mut value = alloc::vec![0.0; c.len()];
    let mut vertex = alloc::vec![None; if record { c.len() } else { 0 }];
    for (i, n) in c.nodes().iter().enumerate() {
        let id = NodeId(i as u32);
        let (best_state, v) = match &n.kind {
            NodeKind::False => continue,
            NodeKind::Literal { var, positive } => {
                value[i] = literal_value(e.get(*var), *positive);
                continue;
            }
            NodeKind::True => {
                let cs = p.get(id).expect("validated parameters");
                match e.get(leaf_var(c, id)) {
                    None => {
                        let (i0, best, _) = argmax(cs.upper().iter().copied());
                        (i0, best)
                    }
                    Some(b) => {
                        let s = if b { 0 } else { 1 };
                        (s, cs.upper()[s])
                    }
                }
            }
            NodeKind::Decision(el) => {
                let cs = p.get(id).expect("validated parameters");
                let (i0, best, _) = argmax(
                    el.iter()
                        .zip(cs.upper())
                        .map(|(x, u)| u * value[x.prime.index()] * value[x.sub.index()]),
                );
                (i0, best)
            }
        };
        value[i] = v;
        if record && v > 0.0 {
            let cs = p.get(id).expect("validated parameters");
            let mut coef = alloc::vec![0.0; cs.k()];
            coef[best_state] = 1.0;
            vertex[i] = Some(cs.maximize_linear(&coef).1);
        }
    }
    Pass { value, vertex }
}

/// Upper bound on `max_x P(x, e)` over all distributions of the CSDD.
pub fn credal_map_upper(c: &Circuit, p: &CsddParams, e: &Evidence) -> Result<f64> {
    check_csdd(c, p, e)?;
    Ok(map_upper_pass(c, p, e, false).value[c.root().index()])
}
