use csdd_core::circuit::{Circuit, Evidence, Var};
use csdd_core::credal::IntervalCredalSet;
use csdd_core::infer::{
    brute_force_exact, conditional_sign, joint_probability, lower_conditional, map_psdd,
    marginal_bounds, marginal_psdd, robustness, strong_extension_oracle, upper_conditional,
    ExactQuery, ExactnessStatus, Functional, Sign,
};
use csdd_core::params::{credal_from_psdd, CsddParams};
use csdd_core::random::{
    random_csdd, random_evidence, random_multiply_connected, random_psdd, random_singly_connected,
    CredalOptions,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: u64 = 50_000;

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..(1 << n)).map(move |b| (0..n).map(|j| (b >> j) & 1 == 1).collect())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

/// Consistent evidence leaving at least one variable free, and a model
/// agreeing with it.
fn query(rng: &mut ChaCha8Rng, c: &Circuit) -> Option<(Evidence, Var, Vec<bool>)> {
    let e = random_evidence(rng, c, 0.4);
    let free: Vec<Var> = e.unobserved().collect();
    if free.is_empty() || !c.is_consistent(&e) {
        return None;
    }
    let models: Vec<Vec<bool>> = assignments(c.num_vars())
        .filter(|a| e.agrees(a) && c.evaluate(c.root(), a).unwrap())
        .collect();
    let x = free[rng.gen_range(0..free.len())];
    Some((e, x, models[rng.gen_range(0..models.len())].clone()))
}

fn small_csdd(rng: &mut ChaCha8Rng, c: &Circuit) -> CsddParams {
    let opts = CredalOptions {
        max_combinations: 2_000,
        ..CredalOptions::default()
    };
    random_csdd(rng, c, opts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn psdd_marginal_is_a_sum_of_joints(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_singly_connected(&mut rng, n, 0.5, 3000);
        let p = random_psdd(&mut rng, &c);
        let e = random_evidence(&mut rng, &c, 0.5);
        let total: f64 = assignments(n).map(|a| joint_probability(&c, &p, &a).unwrap()).sum();
        prop_assert!(close(total, 1.0, 1e-12));
        let want: f64 = assignments(n).filter(|a| e.agrees(a)).map(|a| joint_probability(&c, &p, &a).unwrap()).sum();
        prop_assert!(close(marginal_psdd(&c, &p, &e).unwrap(), want, 1e-12));
        if c.is_consistent(&e) {
            let m = map_psdd(&c, &p, &e).unwrap();
            let best = assignments(n).filter(|a| e.agrees(a)).map(|a| joint_probability(&c, &p, &a).unwrap()).fold(0.0, f64::max);
            prop_assert!(close(m.value, best, 1e-12 * best));
            prop_assert!(close(joint_probability(&c, &p, &m.assignment).unwrap(), best, 1e-12 * best));
        }
    }

    #[test]
    fn zero_width_csdd_is_the_psdd(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_singly_connected(&mut rng, n, 0.5, 3000);
        let p = random_psdd(&mut rng, &c);
        let cp = credal_from_psdd(&p).unwrap();
        let e = random_evidence(&mut rng, &c, 0.5);
        let want = marginal_psdd(&c, &p, &e).unwrap();
        let b = marginal_bounds(&c, &cp, &e).unwrap();
        prop_assert!(close(b.lower, want, 1e-12) && close(b.upper, want, 1e-12));
        if let Some((e, x, _)) = query(&mut rng, &c) {
            let pe = marginal_psdd(&c, &p, &e).unwrap();
            let q = marginal_psdd(&c, &p, &e.with(x, true).unwrap()).unwrap() / pe;
            let lo = lower_conditional(&c, &cp, x, true, &e, 1e-9).unwrap();
            let hi = upper_conditional(&c, &cp, x, true, &e, 1e-9).unwrap();
            prop_assert!(close(lo.value, q, 1e-8) && close(hi.value, q, 1e-8));
        }
    }

    #[test]
    fn singly_connected_matches_oracle(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_singly_connected(&mut rng, n, 0.5, 3000);
        let p = small_csdd(&mut rng, &c);
        let e = random_evidence(&mut rng, &c, 0.5);
        let b = marginal_bounds(&c, &p, &e).unwrap();
        let o = strong_extension_oracle(&c, &p, &Functional::Marginal(e), CAP).unwrap();
        prop_assert!(close(b.lower, o.min, 1e-12) && close(b.upper, o.max, 1e-12));
        if let Some((e, x, x_star)) = query(&mut rng, &c) {
            let f = Functional::Conditional { var: x, value: true, evidence: e.clone() };
            let o = strong_extension_oracle(&c, &p, &f, CAP).unwrap();
            let lo = lower_conditional(&c, &p, x, true, &e, 1e-7).unwrap();
            let hi = upper_conditional(&c, &p, x, true, &e, 1e-7).unwrap();
            prop_assert!(close(lo.value, o.min, 1e-6), "{} vs {}", lo.value, o.min);
            prop_assert!(close(hi.value, o.max, 1e-6), "{} vs {}", hi.value, o.max);
            prop_assert_eq!(lo.certificate.status, ExactnessStatus::Exact);
            let r = robustness(&c, &p, &e, &x_star).unwrap();
            let f = Functional::MapRatio { evidence: e.clone(), x_star: x_star.clone() };
            let ov = strong_extension_oracle(&c, &p, &f, CAP).unwrap().max;
            prop_assert!(close(r.v, ov, 1e-9 * ov), "{} vs {}", r.v, ov);
            let f = Functional::MapRatioExcluding { evidence: e, x_star };
            let ox = strong_extension_oracle(&c, &p, &f, CAP).unwrap().max;
            prop_assert!(close(r.v_excluding, ox, 1e-9 * ox.max(1.0)), "{} vs {}", r.v_excluding, ox);
        }
    }

    #[test]
    fn multiply_connected_bounds_are_outer(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_multiply_connected(&mut rng, n, 0.5);
        let p = small_csdd(&mut rng, &c);
        let Some((e, x, x_star)) = query(&mut rng, &c) else { return Ok(()) };
        let f = Functional::Conditional { var: x, value: true, evidence: e.clone() };
        let o = strong_extension_oracle(&c, &p, &f, CAP).unwrap();
        let lo = lower_conditional(&c, &p, x, true, &e, 1e-8).unwrap();
        prop_assert!(lo.value <= o.min + 1e-7, "{} vs {}", lo.value, o.min);
        if lo.certificate.is_exact() {
            prop_assert!(close(lo.value, o.min, 1e-6));
        }
        let bf = brute_force_exact(&c, &p, &ExactQuery::LowerConditional { var: x, value: true, evidence: e.clone() }, CAP).unwrap();
        prop_assert!(close(bf.value, o.min, 1e-9), "{} vs {}", bf.value, o.min);
        let hi = upper_conditional(&c, &p, x, true, &e, 1e-8).unwrap();
        prop_assert!(hi.value >= o.max - 1e-7);
        let r = robustness(&c, &p, &e, &x_star).unwrap();
        let fv = Functional::MapRatio { evidence: e.clone(), x_star: x_star.clone() };
        let ov = strong_extension_oracle(&c, &p, &fv, CAP).unwrap().max;
        prop_assert!(r.v >= ov * (1.0 - 1e-9));
        if r.certificate.is_exact() {
            prop_assert!(close(r.v, ov, 1e-9 * ov));
        }
        let bf = brute_force_exact(&c, &p, &ExactQuery::Robustness { evidence: e, x_star }, CAP).unwrap();
        prop_assert!(close(bf.value, ov, 1e-9 * ov), "{} vs {}", bf.value, ov);
    }

    #[test]
    fn widening_a_set_widens_the_bounds(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_singly_connected(&mut rng, n, 0.5, 3000);
        let p = random_psdd(&mut rng, &c);
        let narrow = credal_from_psdd(&p).unwrap();
        let wide = narrow.map(|_, cs| {
            let lo = cs.lower().iter().map(|l| (l - 0.05).max(0.0) * f64::from(u8::from(*l > 0.0))).collect();
            let hi = cs.upper().iter().map(|u| if *u > 0.0 { (u + 0.05).min(1.0) } else { 0.0 }).collect();
            IntervalCredalSet::new(lo, hi).unwrap()
        });
        let e = random_evidence(&mut rng, &c, 0.5);
        let a = marginal_bounds(&c, &narrow, &e).unwrap();
        let b = marginal_bounds(&c, &wide, &e).unwrap();
        prop_assert!(b.lower <= a.lower + 1e-12 && b.upper >= a.upper - 1e-12);
    }

    #[test]
    fn compatible_psdds_are_sandwiched(seed in any::<u64>(), n in 2usize..7, shared in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = if shared {
            random_multiply_connected(&mut rng, n.max(3), 0.5)
        } else {
            random_singly_connected(&mut rng, n, 0.5, 3000)
        };
        let p = small_csdd(&mut rng, &c);
        let Some((e, x, _)) = query(&mut rng, &c) else { return Ok(()) };
        let b = marginal_bounds(&c, &p, &e).unwrap();
        let lo = lower_conditional(&c, &p, x, true, &e, 1e-9).unwrap().value;
        let hi = upper_conditional(&c, &p, x, true, &e, 1e-9).unwrap().value;
        for _ in 0..20 {
            let psdd = p.map(|_, cs| {
                let vs = cs.vertices().unwrap();
                vs[rng.gen_range(0..vs.len())].clone()
            });
            let pe = marginal_psdd(&c, &psdd, &e).unwrap();
            prop_assert!(b.lower <= pe * (1.0 + 1e-12) && pe <= b.upper * (1.0 + 1e-12));
            let q = marginal_psdd(&c, &psdd, &e.with(x, true).unwrap()).unwrap() / pe;
            prop_assert!(lo - 1e-8 <= q && q <= hi + 1e-8, "{} <= {} <= {}", lo, q, hi);
        }
    }

    #[test]
    fn sign_changes_at_most_once(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_multiply_connected(&mut rng, n.max(3), 0.5);
        let p = small_csdd(&mut rng, &c);
        let Some((e, x, _)) = query(&mut rng, &c) else { return Ok(()) };
        let mut changes = 0;
        let mut last = None;
        for i in 0..=50 {
            let (s, _) = conditional_sign(&c, &p, x, true, &e, f64::from(i) / 50.0).unwrap();
            if s == Sign::Zero {
                continue;
            }
            if last.is_some_and(|l| l != s) {
                changes += 1;
            }
            last = Some(s);
        }
        prop_assert!(changes <= 1);
    }
}
