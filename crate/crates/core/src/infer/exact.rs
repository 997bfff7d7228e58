use alloc::vec::Vec;

use super::conditional::EvidencePasses;
use super::{
    joint_probability, map_psdd, marginal_psdd, robustness, ExactnessCertificate, InferenceTrace,
};
use crate::circuit::{Circuit, Evidence, NodeId, Var};
use crate::credal::IntervalCredalSet;
use crate::error::{Error, Result};
use crate::params::{CsddParams, PsddParams};

#[derive(Clone, Debug, PartialEq)]
pub enum ExactQuery {
    LowerConditional {
        var: Var,
        value: bool,
        evidence: Evidence,
    },
    UpperConditional {
        var: Var,
        value: bool,
        evidence: Evidence,
    },
    /// Exact `V` of the robustness query.
    Robustness {
        evidence: Evidence,
        x_star: Vec<bool>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteForceResult {
    pub value: f64,
    /// Number of pinned sub-problems whose trace had no conflicts.
    pub leaves: u64,
}

/// Exact answer by branching on conflicts: every credal set that a trace
/// resolved to different vertices is pinned to each of its vertices in
/// turn and the query is rerun, until every trace is conflict-free. Such a
/// trace names one PSDD of the strong extension, which is evaluated directly.
/// At most `cap` leaves are explored.
pub fn brute_force_exact(
    c: &Circuit,
    p: &CsddParams,
    q: &ExactQuery,
    cap: u64,
) -> Result<BruteForceResult> {
    let mut leaves = 0;
    let value = match q {
        ExactQuery::LowerConditional {
            var,
            value,
            evidence,
        } => solve(
            c,
            p,
            &Leaf::Conditional {
                var: *var,
                value: *value,
                evidence,
            },
            cap,
            &mut leaves,
        )?,
        ExactQuery::UpperConditional {
            var,
            value,
            evidence,
        } => {
            1.0 - solve(
                c,
                p,
                &Leaf::Conditional {
                    var: *var,
                    value: !*value,
                    evidence,
                },
                cap,
                &mut leaves,
            )?
        }
        ExactQuery::Robustness { evidence, x_star } => solve(
            c,
            p,
            &Leaf::Robustness { evidence, x_star },
            cap,
            &mut leaves,
        )?,
    };
    Ok(BruteForceResult { value, leaves })
}

enum Leaf<'q> {
    Conditional {
        var: Var,
        value: bool,
        evidence: &'q Evidence,
    },
    Robustness {
        evidence: &'q Evidence,
        x_star: &'q [bool],
    },
}

enum Outcome {
    Exact(f64),
    Conflicted(ExactnessCertificate),
}

fn solve(c: &Circuit, p: &CsddParams, q: &Leaf, cap: u64, leaves: &mut u64) -> Result<f64> {
    let cert = match run(c, p, q)? {
        Outcome::Exact(v) => {
            *leaves += 1;
            if *leaves > cap {
                return Err(Error::CapExceeded(*leaves as u128, cap as u128));
            }
            return Ok(v);
        }
        Outcome::Conflicted(cert) => cert,
    };
    let nodes: Vec<NodeId> = cert.conflicted_nodes().collect();
    let mut options = Vec::with_capacity(nodes.len());
    let mut total: u128 = 1;
    for &n in &nodes {
        let vs = p.param(n)?.vertices()?;
        total = total.saturating_mul(vs.len() as u128);
        options.push(vs);
    }
    if total.saturating_add(*leaves as u128) > cap as u128 {
        return Err(Error::CapExceeded(total, cap as u128));
    }
    let minimize = matches!(q, Leaf::Conditional { .. });
    let mut best = if minimize {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    let mut digits = alloc::vec![0usize; nodes.len()];
    let mut pinned = p.clone();
    for (k, &n) in nodes.iter().enumerate() {
        pinned.set(n, IntervalCredalSet::point(&options[k][0])?);
    }
    loop {
        let v = solve(c, &pinned, q, cap, leaves)?;
        best = if minimize { best.min(v) } else { best.max(v) };
        let mut d = 0;
        loop {
            if d == nodes.len() {
                return Ok(best);
            }
            digits[d] += 1;
            if digits[d] < options[d].len() {
                pinned.set(nodes[d], IntervalCredalSet::point(&options[d][digits[d]])?);
                break;
            }
            digits[d] = 0;
            pinned.set(nodes[d], IntervalCredalSet::point(&options[d][0])?);
            d += 1;
        }
    }
}

/// The PSDD that picks, at every node, the vertex the trace recorded (or
/// the greedy default where the value did not depend on the choice).
fn psdd_from_trace(p: &CsddParams, trace: &InferenceTrace) -> PsddParams {
    p.map(|n, cs| match trace.vertex_of(n) {
        Some(v) => v.to_vec(),
        None => cs.minimize_linear(&alloc::vec![0.0; cs.k()]).1,
    })
}

fn run(c: &Circuit, p: &CsddParams, q: &Leaf) -> Result<Outcome> {
    match *q {
        Leaf::Conditional {
            var,
            value,
            evidence,
        } => {
            let ev = EvidencePasses::new(c, p, evidence)?;
            let b = ev.lower(var, value, 1e-7)?;
            if !b.certificate.is_exact() {
                return Ok(Outcome::Conflicted(b.certificate));
            }
            // Dinkelbach steps from the upper end of the bracket: each step
            // lands on the value of the PSDD optimal at the previous μ.
            let joint_ev = evidence.with(var, value)?;
            let mut mu = b.bracket.1;
            for _ in 0..100 {
                let trace = ev.trace(var, value, mu);
                let cert = super::exactness_certificate(c, p, &trace);
                if !cert.is_exact() {
                    return Ok(Outcome::Conflicted(cert));
                }
                let psdd = psdd_from_trace(p, &trace);
                let pe = marginal_psdd(c, &psdd, evidence)?;
                let q = marginal_psdd(c, &psdd, &joint_ev)? / pe;
                if q >= mu - 1e-15 {
                    return Ok(Outcome::Exact(q));
                }
                mu = q;
            }
            Ok(Outcome::Exact(mu))
        }
        Leaf::Robustness { evidence, x_star } => {
            let r = robustness(c, p, evidence, x_star)?;
            if !r.certificate.is_exact() {
                return Ok(Outcome::Conflicted(r.certificate));
            }
            if r.v.is_infinite() || !c.evaluate(c.root(), x_star)? {
                return Ok(Outcome::Exact(r.v));
            }
            let psdd = psdd_from_trace(p, &r.trace);
            let star = joint_probability(c, &psdd, x_star)?;
            let best = map_psdd(c, &psdd, evidence)?.value;
            Ok(Outcome::Exact(if star > 0.0 {
                best / star
            } else {
                f64::INFINITY
            }))
        }
    }
}
