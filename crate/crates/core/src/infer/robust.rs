use alloc::vec;
use alloc::vec::Vec;

use super::map::{argmax, map_upper_pass};
use super::trace::Tracer;
use super::{
    bound_pass, check_csdd, exactness_certificate, leaf_var, ExactnessCertificate, InferenceTrace,
    Pass, TraceMode, ROBUST_TOL,
};
use crate::circuit::{Circuit, Evidence, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::params::CsddParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RobustnessLabel {
    /// `x*` beats every other completion under every distribution.
    Robust,
    /// Some other completion ties with `x*` at best.
    WeaklyRobust,
    NotRobust,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessResult {
    /// `max_P max_x P(x, e) / P(x*, e)`; at least 1, infinite when `P(x*, e)`
    /// can vanish. An `x*` the circuit rules out is not robust by definition
    /// and gets the reference value 1.
    pub v: f64,
    /// The same maximum over completions other than `x*`.
    pub v_excluding: f64,
    pub label: RobustnessLabel,
    pub trace: InferenceTrace,
    pub certificate: ExactnessCertificate,
}

fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

#[derive(Clone, Debug)]
enum Choice {
    None,
    Prime,
    Sub,
    Alt(usize, Vec<f64>),
    Terminal(Vec<f64>),
}

struct Ratios {
    v: Vec<f64>,
    vex: Vec<f64>,
    choice: Vec<Choice>,
    realized: Vec<Option<usize>>,
}

/// Robustness of the completion `x_star` (a complete assignment that agrees
/// with `e`) as the MAP explanation of `e` over the whole credal set.
pub fn robustness(
    c: &Circuit,
    p: &CsddParams,
    e: &Evidence,
    x_star: &[bool],
) -> Result<RobustnessResult> {
    check_csdd(c, p, e)?;
    if x_star.len() != c.num_vars() {
        return Err(Error::IncompleteAssignment {
            got: x_star.len(),
            want: c.num_vars(),
        });
    }
    if !e.agrees(x_star) {
        return Err(Error::InvalidArgument(
            "explanation disagrees with the evidence".into(),
        ));
    }
    if !c.is_consistent(e) {
        return Err(Error::InconsistentEvidence);
    }
    let z = Evidence::total(x_star);
    if !c.eval_unchecked(c.root(), x_star) {
        let trace = InferenceTrace::default();
        let certificate = exactness_certificate(c, p, &trace);
        return Ok(RobustnessResult {
            v: 1.0,
            v_excluding: 1.0,
            label: RobustnessLabel::NotRobust,
            trace,
            certificate,
        });
    }
    let low = bound_pass(c, p, &z, false, true);
    let max = map_upper_pass(c, p, e, true);
    let r = ratios(c, p, e, x_star, &low, &max);
    let root = c.root().index();
    let (v, vex) = (r.v[root], r.vex[root]);
    let label = if vex < 1.0 - ROBUST_TOL {
        RobustnessLabel::Robust
    } else if vex <= 1.0 + ROBUST_TOL {
        RobustnessLabel::WeaklyRobust
    } else {
        RobustnessLabel::NotRobust
    };
    let trace = trace_ratios(c, p, &r, &low, &max);
    let certificate = exactness_certificate(c, p, &trace);
    Ok(RobustnessResult {
        v,
        v_excluding: vex,
        label,
        trace,
        certificate,
    })
}

fn ratios(c: &Circuit, p: &CsddParams, e: &Evidence, z: &[bool], low: &Pass, max: &Pass) -> Ratios {
    let n = c.len();
    let mut realized: Vec<Option<usize>> = vec![None; n];
    let mut is_real = vec![false; n];
    is_real[c.root().index()] = true;
    for i in (0..n).rev() {
        if !is_real[i] {
            continue;
        }
        if let NodeKind::Decision(el) = &c.node(NodeId(i as u32)).kind {
            let j = el
                .iter()
                .position(|x| c.eval_unchecked(x.prime, z))
                .expect("x* satisfies the circuit");
            realized[i] = Some(j);
            is_real[el[j].prime.index()] = true;
            is_real[el[j].sub.index()] = true;
        }
    }
    let mut v = vec![1.0; n];
    let mut vex = vec![0.0; n];
    let mut choice = vec![Choice::None; n];
    for i in 0..n {
        if !is_real[i] {
            continue;
        }
        let id = NodeId(i as u32);
        match &c.node(id).kind {
            NodeKind::True => {
                let x = leaf_var(c, id);
                if e.get(x).is_some() {
                    continue;
                }
                let cs = p.get(id).expect("validated parameters");
                let s = if z[x as usize - 1] { 0 } else { 1 };
                let (ratio, vertex) = match cs.max_ratio(1 - s, s) {
                    Ok(rv) => rv,
                    Err(_) => {
                        let mut coef = [0.0; 2];
                        coef[1 - s] = 2.0;
                        coef[s] = -1.0;
                        (f64::INFINITY, cs.maximize_linear(&coef).1)
                    }
                };
                vex[i] = ratio;
                v[i] = ratio.max(1.0);
                if ratio > 0.0 {
                    choice[i] = Choice::Terminal(vertex);
                }
            }
            NodeKind::Decision(el) => {
                let j = realized[i].unwrap();
                let (pj, sj) = (el[j].prime.index(), el[j].sub.index());
                let cs = p.get(id).expect("validated parameters");
                let a_p = mul0(vex[pj], v[sj]);
                let a_s = mul0(v[pj], vex[sj]);
                let den = low.value[pj] * low.value[sj];
                let mut best_alt: Option<(usize, f64, Vec<f64>)> = None;
                for (k, x) in el.iter().enumerate() {
                    if k == j || cs.upper()[k] <= 0.0 {
                        continue;
                    }
                    let num = max.value[x.prime.index()] * max.value[x.sub.index()];
                    if num == 0.0 {
                        continue;
                    }
                    let (u, vertex) = match cs.max_ratio(k, j) {
                        Ok((r, vertex)) if den > 0.0 => (r * num / den, vertex),
                        _ => {
                            let mut coef = vec![0.0; cs.k()];
                            coef[k] = 2.0;
                            coef[j] = -1.0;
                            (f64::INFINITY, cs.maximize_linear(&coef).1)
                        }
                    };
                    if best_alt.as_ref().is_none_or(|b| u > b.1) {
                        best_alt = Some((k, u, vertex));
                    }
                }
                let u_best = best_alt.as_ref().map_or(0.0, |b| b.1);
                v[i] = (v[pj] * v[sj]).max(u_best);
                vex[i] = a_p.max(a_s).max(u_best);
                choice[i] = if vex[i] == 0.0 {
                    Choice::None
                } else if a_p >= a_s && a_p >= u_best {
                    Choice::Prime
                } else if a_s >= u_best {
                    Choice::Sub
                } else {
                    let (k, _, vertex) = best_alt.unwrap();
                    Choice::Alt(k, vertex)
                };
            }
            _ => {}
        }
    }
    Ratios {
        v,
        vex,
        choice,
        realized,
    }
}

fn trace_ratios(c: &Circuit, p: &CsddParams, r: &Ratios, low: &Pass, max: &Pass) -> InferenceTrace {
    let mut t = Tracer::default();
    let mut lows = Vec::new();
    let mut maxes = Vec::new();
    // (node, excluding): excluding walks follow Vex; otherwise only V > 1 matters.
    let mut stack = vec![(c.root(), true)];
    while let Some((n, excluding)) = stack.pop() {
        if !excluding && r.v[n.index()] <= 1.0 {
            continue;
        }
        if !t.enter(n, TraceMode::Ratio) {
            continue;
        }
        match &r.choice[n.index()] {
            Choice::None => {}
            Choice::Terminal(vertex) => t.record(n, TraceMode::Ratio, Some(vertex)),
            Choice::Prime | Choice::Sub | Choice::Alt(..) => {
                let el = c.node(n).elements();
                let j = r.realized[n.index()].unwrap();
                match &r.choice[n.index()] {
                    Choice::Prime => {
                        stack.push((el[j].prime, true));
                        stack.push((el[j].sub, false));
                    }
                    Choice::Sub => {
                        stack.push((el[j].prime, false));
                        stack.push((el[j].sub, true));
                    }
                    Choice::Alt(k, vertex) => {
                        t.record(n, TraceMode::Ratio, Some(vertex));
                        maxes.push(el[*k].prime);
                        maxes.push(el[*k].sub);
                        lows.push(el[j].prime);
                        lows.push(el[j].sub);
                    }
                    _ => unreachable!(),
                }
            }
        }
    }
    for n in maxes {
        walk_max(&mut t, c, p, max, n);
    }
    for n in lows {
        t.walk_bound(c, low, n, TraceMode::Lower);
    }
    t.trace
}

fn walk_max(t: &mut Tracer, c: &Circuit, p: &CsddParams, max: &Pass, start: NodeId) {
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        if !t.enter(n, TraceMode::Max) {
            continue;
        }
        t.record(n, TraceMode::Max, max.vertex[n.index()].as_ref());
        if let NodeKind::Decision(el) = &c.node(n).kind {
            let cs = p.get(n).expect("validated parameters");
            let (k, best, _) = argmax(
                el.iter()
                    .zip(cs.upper())
                    .map(|(x, u)| u * max.value[x.prime.index()] * max.value[x.sub.index()]),
            );
            if best > 0.0 {
                stack.push(el[k].sub);
                stack.push(el[k].prime);
            }
        }
    }
}
