//! Inference on PSDDs and CSDDs.
//!
//! Every routine is a single bottom-up pass (plus a top-down walk when a
//! trace or a MAP completion is needed) over the topologically ordered node
//! array. CSDD routines solve one small linear program per parameterized
//! node; on multiply connected circuits the choices made at a shared node
//! may differ between its parents, which makes the returned bounds outer
//! approximations. Traces and certificates report when that happened.

mod conditional;
mod exact;
mod map;
mod marginal;
mod oracle;
mod robust;
mod trace;

pub(crate) use conditional::EvidencePasses;
pub use conditional::{
    conditional_sign, lower_conditional, upper_conditional, ConditionalBound, Sign,
};
pub use exact::{brute_force_exact, BruteForceResult, ExactQuery};
pub use map::{credal_map_upper, map_psdd, MapResult};
pub use marginal::{
    joint_probability, lower_marginal, marginal_bounds, marginal_psdd, node_bounds, upper_marginal,
    MarginalBounds,
};
pub use oracle::{evaluate_functional, strong_extension_oracle, Extrema, Functional};
pub use robust::{robustness, RobustnessLabel, RobustnessResult};
pub use trace::{
    exactness_certificate, Conflict, ExactnessCertificate, ExactnessStatus, InferenceTrace,
    TraceEntry, TraceMode,
};

use alloc::format;
use alloc::vec::Vec;

use crate::circuit::{Circuit, Evidence, NodeId, NodeKind};
use crate::credal::COMPARE_TOL;
use crate::error::{Error, Result};
use crate::params::{validate_csdd, validate_psdd, CsddParams, PsddParams};

/// Default bisection width for conditional bounds.
pub const DEFAULT_TOL: f64 = 1e-6;
/// `g(μ)` counts as zero when `|g|` is below `ZERO_REL` times the sum of
/// the absolute values of the terms it adds up.
pub const ZERO_REL: f64 = 1e-12;
/// Slack for the robustness trichotomy.
pub const ROBUST_TOL: f64 = 1e-9;

pub(crate) fn check_evidence(c: &Circuit, e: &Evidence) -> Result<()> {
    if e.num_vars() != c.num_vars() {
        return Err(Error::InvalidArgument(format!(
            "evidence covers {} variables, circuit has {}",
            e.num_vars(),
            c.num_vars()
        )));
    }
    Ok(())
}

pub(crate) fn check_psdd(c: &Circuit, p: &PsddParams, e: &Evidence) -> Result<()> {
    check_evidence(c, e)?;
    validate_psdd(c, p)
}

pub(crate) fn check_csdd(c: &Circuit, p: &CsddParams, e: &Evidence) -> Result<()> {
    check_evidence(c, e)?;
    validate_csdd(c, p)
}

/// Variable of a leaf-normalized terminal.
pub(crate) fn leaf_var(c: &Circuit, n: NodeId) -> u32 {
    c.vtree()
        .leaf_var(c.node(n).vtree)
        .expect("terminal on a leaf")
}

/// Coefficients of `θ` in the evidence message of a `⊤` terminal.
pub(crate) fn indicator(obs: Option<bool>) -> [f64; 2] {
    match obs {
        None => [1.0, 1.0],
        Some(true) => [1.0, 0.0],
        Some(false) => [0.0, 1.0],
    }
}

pub(crate) fn literal_value(obs: Option<bool>, positive: bool) -> f64 {
    match obs {
        Some(b) if b != positive => 0.0,
        _ => 1.0,
    }
}

/// True when the objective does not depend on `θ` (all coefficients equal).
pub(crate) fn flat(c: &[f64]) -> bool {
    let scale = c.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    c.iter().all(|x| (x - c[0]).abs() <= COMPARE_TOL * scale)
}

/// Values of one bottom-up pass plus, when recorded, the vertex each
/// parameterized node's LP picked (`None` where the choice does not matter).
#[derive(Clone, Debug)]
pub(crate) struct Pass {
    pub value: Vec<f64>,
    pub vertex: Vec<Option<Vec<f64>>>,
}

/// `P̲(e)` (or `P̄(e)` when `maximize`) for every node.
pub(crate) fn bound_pass(
    c: &Circuit,
    p: &CsddParams,
    e: &Evidence,
    maximize: bool,
    record: bool,
) -> Pass {
    let mut value = alloc::vec![0.0; c.len()];
    let mut vertex = alloc::vec![None; if record { c.len() } else { 0 }];
    let mut coef = Vec::new();
    let mut theta = Vec::new();
    for (i, n) in c.nodes().iter().enumerate() {
        let id = NodeId(i as u32);
        coef.clear();
        match &n.kind {
            NodeKind::False => continue,
            NodeKind::Literal { var, positive } => {
                value[i] = literal_value(e.get(*var), *positive);
                continue;
            }
            NodeKind::True => coef.extend_from_slice(&indicator(e.get(leaf_var(c, id)))),
            NodeKind::Decision(el) => {
                coef.extend(
                    el.iter()
                        .map(|x| value[x.prime.index()] * value[x.sub.index()]),
                );
            }
        }
        let cs = p.get(id).expect("validated parameters");
        theta.resize(coef.len(), 0.0);
        value[i] = cs.optimize_into(&coef, maximize, &mut theta);
        if record && !flat(&coef) {
            vertex[i] = Some(theta.clone());
        }
    }
    Pass { value, vertex }
}

/// `P(e)` for every node of a PSDD.
pub(crate) fn psdd_pass(c: &Circuit, p: &PsddParams, e: &Evidence) -> Vec<f64> {
    let mut value = alloc::vec![0.0; c.len()];
    for (i, n) in c.nodes().iter().enumerate() {
        let id = NodeId(i as u32);
        value[i] = match &n.kind {
            NodeKind::False => 0.0,
            NodeKind::Literal { var, positive } => literal_value(e.get(*var), *positive),
            NodeKind::True => {
                let th = p.get(id).expect("validated parameters");
                let ind = indicator(e.get(leaf_var(c, id)));
                ind[0] * th[0] + ind[1] * th[1]
            }
            NodeKind::Decision(el) => {
                let th = p.get(id).expect("validated parameters");
                el.iter()
                    .zip(th)
                    .map(|(x, t)| t * value[x.prime.index()] * value[x.sub.index()])
                    .sum()
            }
        };
    }
    value
}
