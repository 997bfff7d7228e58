//! Seeded generators for random vtrees, circuits and parameters, used by
//! property tests and the acceptance suite.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{
    compile_formula, Builder, Circuit, Formula, NodeId, NodeKind, Shape, Var, Vtree,
};
use crate::credal::IntervalCredalSet;
use crate::error::Result;
use crate::params::{is_parameterized, structural_zeros, CsddParams, PsddParams};

/// Random full binary tree over a random permutation of `1..=n`.
pub fn random_vtree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vtree {
    let mut vars: Vec<Var> = (1..=n as Var).collect();
    vars.shuffle(rng);
    fn go<R: Rng + ?Sized>(rng: &mut R, vars: &[Var]) -> Shape {
        if vars.len() == 1 {
            return Shape::Leaf(vars[0]);
        }
        let cut = rng.gen_range(1..vars.len());
        Shape::node(go(rng, &vars[..cut]), go(rng, &vars[cut..]))
    }
    Vtree::from_shape(&go(rng, &vars))
}

/// Random satisfiable function given as a disjunction of minterms; each
/// assignment is a model with probability `density`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Formula {
    let mut terms = Vec::new();
    for bits in 0u32..(1u32 << n) {
        if rng.gen_bool(density) {
            terms.push(minterm(n, bits));
        }
    }
    if terms.is_empty() {
        terms.push(minterm(n, rng.gen_range(0..(1u32 << n))));
    }
    Formula::Or(terms)
}

fn minterm(n: usize, bits: u32) -> Formula {
    let lits: Vec<(Var, bool)> = (0..n)
        .map(|j| (j as Var + 1, (bits >> j) & 1 == 1))
        .collect();
    Formula::term(&lits)
}

/// Canonical (hash-consed) circuit for a random function.
pub fn random_shared_circuit<R: Rng + ?Sized>(rng: &mut R, vtree: &Vtree, density: f64) -> Circuit {
    let f = random_formula(rng, vtree.num_vars(), density);
    compile_formula(&f, vtree).expect("formula over the vtree's variables")
}

/// Copy of `c` in which every node has exactly one parent. `None` if the
/// copy would exceed `max_nodes`.
pub fn unshare(c: &Circuit, max_nodes: usize) -> Option<Circuit> {
    let total: u64 = c.multiplicity().multiplicity.iter().sum();
    if total as usize > max_nodes {
        return None;
    }
    let mut b = Builder::new(c.vtree().clone());
    fn copy(c: &Circuit, b: &mut Builder, n: NodeId) -> NodeId {
        let node = c.node(n);
        match &node.kind {
            NodeKind::False => b.add_false(node.vtree).unwrap(),
            NodeKind::True => b.add_true(c.vtree().leaf_var(node.vtree).unwrap()).unwrap(),
            NodeKind::Literal { var, positive } => b.add_literal(*var, *positive).unwrap(),
            NodeKind::Decision(el) => {
                let pairs: Vec<(NodeId, NodeId)> = el
                    .iter()
                    .map(|e| (copy(c, b, e.prime), copy(c, b, e.sub)))
                    .collect();
                b.add_decision(node.vtree, &pairs).unwrap()
            }
        }
    }
    let root = copy(c, &mut b, c.root());
    Some(b.finish(root).expect("copy of a valid circuit"))
}

/// Random singly connected circuit over `n` variables with a random vtree.
pub fn random_singly_connected<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    density: f64,
    max_nodes: usize,
) -> Circuit {
    loop {
        let vt = random_vtree(rng, n);
        let shared = random_shared_circuit(rng, &vt, density);
        if let Some(c) = unshare(&shared, max_nodes) {
            return c;
        }
    }
}

/// Random multiply connected circuit (some node has two parents).
pub fn random_multiply_connected<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Circuit {
    loop {
        let vt = random_vtree(rng, n);
        let c = random_shared_circuit(rng, &vt, density);
        if c.multiplicity().class == crate::circuit::ConnectivityClass::MultiplyConnected {
            return c;
        }
    }
}

fn random_pmf<R: Rng + ?Sized>(rng: &mut R, live: &[bool]) -> Vec<f64> {
    let raw: Vec<f64> = live
        .iter()
        .map(|&b| if b { rng.gen_range(0.1..1.0) } else { 0.0 })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

pub fn random_psdd<R: Rng + ?Sized>(rng: &mut R, c: &Circuit) -> PsddParams {
    let mut p = PsddParams::new(c.len());
    for n in c.ids().filter(|&n| is_parameterized(c, n)) {
        let live: Vec<bool> = structural_zeros(c, n).iter().map(|z| !z).collect();
        let mut theta = random_pmf(rng, &live);
        if c.node(n).is_true() {
            theta[1] = 1.0 - theta[0];
        }
        p.set(n, theta);
    }
    p
}

#[derive(Clone, Copy, Debug)]
pub struct CredalOptions {
    /// Maximum half-width added around each probability.
    pub max_width: f64,
    /// Smallest lower bound on a feasible state.
    pub min_lower: f64,
    /// Cap on the product of vertex counts (keeps the oracle tractable).
    pub max_combinations: u64,
    /// Probability that an eligible node is made credal.
    pub credal_fraction: f64,
}

impl Default for CredalOptions {
    fn default() -> Self {
        CredalOptions {
            max_width: 0.2,
            min_lower: 0.01,
            max_combinations: 20_000,
            credal_fraction: 0.6,
        }
    }
}

/// Random CSDD parameters: a random PSDD widened into intervals at a random
/// subset of nodes, keeping the vertex-combination count under the cap.
pub fn random_csdd<R: Rng + ?Sized>(
    rng: &mut R,
    c: &Circuit,
    opts: CredalOptions,
) -> Result<CsddParams> {
    let mut p = CsddParams::new(c.len());
    let mut combos: u64 = 1;
    let mut ids: Vec<NodeId> = c.ids().filter(|&n| is_parameterized(c, n)).collect();
    ids.shuffle(rng);
    for n in ids {
        let live: Vec<bool> = structural_zeros(c, n).iter().map(|z| !z).collect();
        let mut theta = random_pmf(rng, &live);
        let terminal = c.node(n).is_true();
        if terminal {
            theta[1] = 1.0 - theta[0];
        }
        let nlive = live.iter().filter(|&&b| b).count();
        let mut cs = IntervalCredalSet::point(&theta)?;
        if nlive > 1 && rng.gen_bool(opts.credal_fraction) {
            let (mut lo, mut hi) = (vec![0.0; theta.len()], vec![0.0; theta.len()]);
            for i in 0..theta.len() {
                if live[i] {
                    lo[i] = (theta[i] - opts.max_width * rng.gen::<f64>())
                        .max(opts.min_lower.min(theta[i]));
                    hi[i] = (theta[i] + opts.max_width * rng.gen::<f64>()).min(1.0);
                }
            }
            let wide = if terminal {
                IntervalCredalSet::binary(lo[0], hi[0])?
            } else {
                IntervalCredalSet::new(lo, hi)?
            };
            // Sets too large to enumerate stay precise.
            let count = wide.vertices().map_or(u64::MAX, |v| v.len() as u64);
            if combos.saturating_mul(count) <= opts.max_combinations {
                combos *= count;
                cs = wide;
            }
        }
        p.set(n, cs);
    }
    Ok(p)
}

/// Random assignment to `vars` as evidence pairs, each variable observed
/// with probability `rate`.
pub fn random_evidence<R: Rng + ?Sized>(
    rng: &mut R,
    c: &Circuit,
    rate: f64,
) -> crate::circuit::Evidence {
    let mut e = crate::circuit::Evidence::empty(c.num_vars());
    for x in 1..=c.num_vars() as Var {
        if rng.gen_bool(rate) {
            e.set(x, rng.gen()).unwrap();
        }
    }
    e
}
