use alloc::vec;
use alloc::vec::Vec;

use super::trace::Tracer;
use super::{
    bound_pass, check_csdd, exactness_certificate, flat, ExactnessCertificate, InferenceTrace,
    Pass, TraceMode, ZERO_REL,
};
use crate::circuit::{Circuit, Evidence, NodeId, NodeKind, Var};
use crate::error::{Error, Result};
use crate::params::CsddParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalBound {
    /// Midpoint of the final bracket.
    pub value: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub trace: InferenceTrace,
    pub certificate: ExactnessCertificate,
}

/// Lower and upper evidence passes, shared by all targets under one
/// piece of evidence.
pub(crate) struct EvidencePasses<'a> {
    pub c: &'a Circuit,
    pub p: &'a CsddParams,
    pub e: Evidence,
    pub lower: Pass,
    pub upper: Pass,
}

impl<'a> EvidencePasses<'a> {
    pub fn new(c: &'a Circuit, p: &'a CsddParams, e: &Evidence) -> Result<EvidencePasses<'a>> {
        check_csdd(c, p, e)?;
        if !c.is_consistent(e) {
            return Err(Error::InconsistentEvidence);
        }
        Ok(EvidencePasses {
            c,
            p,
            e: e.clone(),
            lower: bound_pass(c, p, e, false, true),
            upper: bound_pass(c, p, e, true, true),
        })
    }

    fn check_target(&self, x: Var) -> Result<()> {
        if !self.c.vtree().has_var(x) {
            return Err(Error::UnknownVariable(x));
        }
        if self.e.is_observed(x) {
            return Err(Error::TargetObserved(x));
        }
        Ok(())
    }

    /// `g(μ) = min (1 − μ) P(x, e) − μ P(¬x, e)` for every node that
    /// mentions `x`; zero elsewhere. The second vector holds, per node, the
    /// same sum with every term taken in absolute value, which sets the
    /// scale of rounding error in `g`.
    pub fn main_pass(&self, x: Var, val: bool, mu: f64, record: bool) -> (Pass, Vec<f64>) {
        let c = self.c;
        let mut value = vec![0.0; c.len()];
        let mut scale = vec![0.0; c.len()];
        let mut vertex = vec![None; if record { c.len() } else { 0 }];
        let mut coef = Vec::new();
        let mut mag = Vec::new();
        let mut theta = Vec::new();
        for (i, n) in c.nodes().iter().enumerate() {
            if !c.vtree().contains(n.vtree, x) {
                continue;
            }
            coef.clear();
            mag.clear();
            match &n.kind {
                NodeKind::False => continue,
                NodeKind::Literal { positive, .. } => {
                    value[i] = if *positive == val { 1.0 - mu } else { -mu };
                    scale[i] = value[i].abs();
                    continue;
                }
                NodeKind::True => {
                    if val {
                        coef.extend_from_slice(&[1.0 - mu, -mu]);
                    } else {
                        coef.extend_from_slice(&[-mu, 1.0 - mu]);
                    }
                    mag.extend(coef.iter().map(|x| x.abs()));
                }
                NodeKind::Decision(el) => {
                    let (l, _) = c.vtree().children(n.vtree).unwrap();
                    let x_left = c.vtree().contains(l, x);
                    for e in el {
                        let (u, w) = if x_left {
                            (e.prime, e.sub)
                        } else {
                            (e.sub, e.prime)
                        };
                        let m = value[u.index()];
                        let s = if m < 0.0 {
                            self.upper.value[w.index()]
                        } else {
                            self.lower.value[w.index()]
                        };
                        coef.push(m * s);
                        mag.push(scale[u.index()] * s);
                    }
                }
            }
            let cs = self.p.get(NodeId(i as u32)).expect("validated parameters");
            theta.resize(coef.len(), 0.0);
            value[i] = cs.optimize_into(&coef, false, &mut theta);
            scale[i] = theta.iter().zip(&mag).map(|(t, m)| t * m).sum();
            if record && !flat(&coef) {
                vertex[i] = Some(theta.clone());
            }
        }
        (Pass { value, vertex }, scale)
    }

    pub fn sign(&self, x: Var, val: bool, mu: f64) -> (Sign, f64) {
        let root = self.c.root().index();
        let (pass, scale) = self.main_pass(x, val, mu, false);
        let g = pass.value[root];
        let zero = ZERO_REL * scale[root];
        let s = if g.abs() <= zero {
            Sign::Zero
        } else if g > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        };
        (s, g)
    }

    /// Top-down walk of the main pass at `mu` and the evidence passes it reads.
    pub fn trace(&self, x: Var, val: bool, mu: f64) -> InferenceTrace {
        let c = self.c;
        let (main, _) = self.main_pass(x, val, mu, true);
        let mut t = Tracer::default();
        let mut stack = vec![c.root()];
        let mut bounds = Vec::new();
        while let Some(n) = stack.pop() {
            if !t.enter(n, TraceMode::Main) {
                continue;
            }
            let vertex = main.vertex[n.index()].as_ref();
            t.record(n, TraceMode::Main, vertex);
            let node = c.node(n);
            let NodeKind::Decision(el) = &node.kind else {
                continue;
            };
            let (l, _) = c.vtree().children(node.vtree).unwrap();
            let x_left = c.vtree().contains(l, x);
            for (i, e) in el.iter().enumerate() {
                let (u, w) = if x_left {
                    (e.prime, e.sub)
                } else {
                    (e.sub, e.prime)
                };
                let m = main.value[u.index()];
                let mode = if m < 0.0 {
                    TraceMode::Upper
                } else {
                    TraceMode::Lower
                };
                if vertex.is_some_and(|v| v[i] == 0.0) {
                    continue;
                }
                stack.push(u);
                bounds.push((w, mode));
            }
        }
        for (w, mode) in bounds {
            let pass = if mode == TraceMode::Upper {
                &self.upper
            } else {
                &self.lower
            };
            t.walk_bound(c, pass, w, mode);
        }
        t.trace
    }

    /// Bisection on `μ` for `P̲(x | e)`.
    pub fn lower(&self, x: Var, val: bool, tol: f64) -> Result<ConditionalBound> {
        self.check_target(x)?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut iterations = 0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            iterations += 1;
            match self.sign(x, val, mid).0 {
                Sign::Positive => lo = mid,
                Sign::Negative => hi = mid,
                Sign::Zero => {
                    lo = mid;
                    hi = mid;
                }
            }
        }
        let value = 0.5 * (lo + hi);
        let trace = self.trace(x, val, value);
        let certificate = exactness_certificate(self.c, self.p, &trace);
        Ok(ConditionalBound {
            value,
            bracket: (lo, hi),
            iterations,
            trace,
            certificate,
        })
    }

    pub fn upper(&self, x: Var, val: bool, tol: f64) -> Result<ConditionalBound> {
        let b = self.lower(x, !val, tol)?;
        Ok(ConditionalBound {
            value: 1.0 - b.value,
            bracket: (1.0 - b.bracket.1, 1.0 - b.bracket.0),
            ..b
        })
    }
}

/// Sign of `g(μ)`, the linearized conditional at the root, and its value.
pub fn conditional_sign(
    c: &Circuit,
    p: &CsddParams,
    x: Var,
    val: bool,
    e: &Evidence,
    mu: f64,
) -> Result<(Sign, f64)> {
    let ev = EvidencePasses::new(c, p, e)?;
    ev.check_target(x)?;
    Ok(ev.sign(x, val, mu))
}

/// `P̲(X = val | e)` to within `tol`.
pub fn lower_conditional(
    c: &Circuit,
    p: &CsddParams,
    x: Var,
    val: bool,
    e: &Evidence,
    tol: f64,
) -> Result<ConditionalBound> {
    EvidencePasses::new(c, p, e)?.lower(x, val, tol)
}

/// `P̄(X = val | e) = 1 − P̲(X = ¬val | e)`.
pub fn upper_conditional(
    c: &Circuit,
    p: &CsddParams,
    x: Var,
    val: bool,
    e: &Evidence,
    tol: f64,
) -> Result<ConditionalBound> {
    EvidencePasses::new(c, p, e)?.upper(x, val, tol)
}
