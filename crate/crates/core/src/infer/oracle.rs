use alloc::vec::Vec;

use super::{check_csdd, joint_probability, map_psdd, marginal_psdd};
use crate::circuit::{Circuit, Evidence, NodeId, Var};
use crate::error::{Error, Result};
use crate::params::{CsddParams, PsddParams};

/// A quantity computed from one PSDD.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    /// `P(e)`.
    Marginal(Evidence),
    /// `P(X = value | e)`.
    Conditional {
        var: Var,
        value: bool,
        evidence: Evidence,
    },
    /// `max_x P(x, e) / P(x*, e)`; 1 when the circuit rules out `x*`.
    MapRatio {
        evidence: Evidence,
        x_star: Vec<bool>,
    },
    /// `max_{x ≠ x*} P(x, e) / P(x*, e)`, by enumerating completions.
    MapRatioExcluding {
        evidence: Evidence,
        x_star: Vec<bool>,
    },
}

pub fn evaluate_functional(c: &Circuit, p: &PsddParams, f: &Functional) -> Result<f64> {
    match f {
        Functional::Marginal(e) => marginal_psdd(c, p, e),
        Functional::Conditional {
            var,
            value,
            evidence,
        } => {
            let joint = marginal_psdd(c, p, &evidence.with(*var, *value)?)?;
            let pe = marginal_psdd(c, p, evidence)?;
            Ok(if pe > 0.0 { joint / pe } else { f64::NAN })
        }
        Functional::MapRatio { evidence, x_star } => {
            if !c.evaluate(c.root(), x_star)? {
                return Ok(1.0);
            }
            let best = map_psdd(c, p, evidence)?.value;
            let star = joint_probability(c, p, x_star)?;
            Ok(if star > 0.0 {
                best / star
            } else {
                f64::INFINITY
            })
        }
        Functional::MapRatioExcluding { evidence, x_star } => {
            let free: Vec<Var> = evidence.unobserved().collect();
            if free.len() > 20 {
                return Err(Error::TooManyVariables(free.len()));
            }
            let star = joint_probability(c, p, x_star)?;
            let mut z = x_star.clone();
            let mut best = 0.0f64;
            for bits in 0u64..(1u64 << free.len()) {
                for (j, &x) in free.iter().enumerate() {
                    z[x as usize - 1] = (bits >> j) & 1 == 1;
                }
                if z == *x_star {
                    continue;
                }
                best = best.max(joint_probability(c, p, &z)?);
            }
            Ok(if star > 0.0 {
                best / star
            } else if best > 0.0 {
                f64::INFINITY
            } else {
                0.0
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    /// Number of vertex combinations evaluated.
    pub combinations: u64,
}

/// Exact extrema of `f` over the strong extension, by evaluating it on the
/// PSDD of every combination of credal-set vertices. A functional that is
/// a ratio of multilinear polynomials in the node parameters (or a maximum
/// of such) attains its extrema at such a combination.
pub fn strong_extension_oracle(
    c: &Circuit,
    p: &CsddParams,
    f: &Functional,
    cap: u64,
) -> Result<Extrema> {
    let probe = match f {
        Functional::Marginal(e) => e,
        Functional::Conditional { evidence, .. } => evidence,
        Functional::MapRatio { evidence, .. } | Functional::MapRatioExcluding { evidence, .. } => {
            evidence
        }
    };
    check_csdd(c, p, probe)?;
    if c.num_vars() > 16 {
        return Err(Error::TooManyVariables(c.num_vars()));
    }
    let mut nodes: Vec<NodeId> = Vec::new();
    let mut options: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut total: u128 = 1;
    let mut base = PsddParams::new(c.len());
    for (id, cs) in p.iter() {
        let vs = cs.vertices()?;
        base.set(id, vs[0].clone());
        if vs.len() > 1 {
            total = total.saturating_mul(vs.len() as u128);
            if total > cap as u128 {
                return Err(Error::CapExceeded(total, cap as u128));
            }
            nodes.push(id);
            options.push(vs);
        }
    }
    let mut digits = alloc::vec![0usize; nodes.len()];
    let mut out = Extrema {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        combinations: 0,
    };
    loop {
        let v = evaluate_functional(c, &base, f)?;
        out.combinations += 1;
        if !v.is_nan() {
            out.min = out.min.min(v);
            out.max = out.max.max(v);
        }
        let mut d = 0;
        loop {
            if d == nodes.len() {
                return Ok(out);
            }
            digits[d] += 1;
            if digits[d] < options[d].len() {
                base.set(nodes[d], options[d][digits[d]].clone());
                break;
            }
            digits[d] = 0;
            base.set(nodes[d], options[d][0].clone());
            d += 1;
        }
    }
}
