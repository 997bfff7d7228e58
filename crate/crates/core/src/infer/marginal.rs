use alloc::vec::Vec;

use super::{bound_pass, check_csdd, check_psdd, leaf_var, psdd_pass};
use crate::circuit::{Circuit, Evidence, NodeKind};
use crate::error::Result;
use crate::params::{CsddParams, PsddParams};

/// `P(e)` by one bottom-up sum-product pass.
pub fn marginal_psdd(c: &Circuit, p: &PsddParams, e: &Evidence) -> Result<f64> {
    check_psdd(c, p, e)?;
    Ok(psdd_pass(c, p, e)[c.root().index()])
}

/// Probability of a complete assignment, read off the unique path of
/// elements it selects. Independent of the message passes.
pub fn joint_probability(c: &Circuit, p: &PsddParams, assignment: &[bool]) -> Result<f64> {
    check_psdd(c, p, &Evidence::total(assignment))?;
    let mut prob = 1.0;
    let mut stack: Vec<_> = alloc::vec![c.root()];
    while let Some(n) = stack.pop() {
        match &c.node(n).kind {
            NodeKind::False => return Ok(0.0),
            NodeKind::Literal { var, positive } => {
                if assignment[*var as usize - 1] != *positive {
                    return Ok(0.0);
                }
            }
            NodeKind::True => {
                let th = p.param(n)?;
                prob *= if assignment[leaf_var(c, n) as usize - 1] {
                    th[0]
                } else {
                    th[1]
                };
            }
            NodeKind::Decision(el) => {
                let th = p.param(n)?;
                match el
                    .iter()
                    .position(|x| c.eval_unchecked(x.prime, assignment))
                {
                    Some(i) => {
                        prob *= th[i];
                        stack.push(el[i].prime);
                        stack.push(el[i].sub);
                    }
                    None => return Ok(0.0),
                }
            }
        }
    }
    Ok(prob)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginalBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `P̲(e)` over the strong extension (exact on singly connected circuits).
pub fn lower_marginal(c: &Circuit, p: &CsddParams, e: &Evidence) -> Result<f64> {
    check_csdd(c, p, e)?;
    Ok(bound_pass(c, p, e, false, false).value[c.root().index()])
}

pub fn upper_marginal(c: &Circuit, p: &CsddParams, e: &Evidence) -> Result<f64> {
    check_csdd(c, p, e)?;
    Ok(bound_pass(c, p, e, true, false).value[c.root().index()])
}

pub fn marginal_bounds(c: &Circuit, p: &CsddParams, e: &Evidence) -> Result<MarginalBounds> {
    check_csdd(c, p, e)?;
    let r = c.root().index();
    Ok(MarginalBounds {
        lower: bound_pass(c, p, e, false, false).value[r],
        upper: bound_pass(c, p, e, true, false).value[r],
    })
}

/// `P̲(e)` and `P̄(e)` of the sub-circuit rooted at every node.
pub fn node_bounds(c: &Circuit, p: &CsddParams, e: &Evidence) -> Result<Vec<MarginalBounds>> {
    check_csdd(c, p, e)?;
    let lo = bound_pass(c, p, e, false, false).value;
    let hi = bound_pass(c, p, e, true, false).value;
    Ok(lo
        .into_iter()
        .zip(hi)
        .map(|(lower, upper)| MarginalBounds { lower, upper })
        .collect())
}
