use csdd_core::circuit::Circuit;
use csdd_core::error::Error;
use csdd_core::infer::joint_probability;
use csdd_core::learn::{
    collect_counts, estimate_bayes, estimate_idm, estimate_ml, Dataset, RowPolicy,
};
use csdd_core::params::{validate_csdd, validate_psdd, PsddParams};
use csdd_core::random::{random_psdd, random_singly_connected};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn models(c: &Circuit) -> Vec<Vec<bool>> {
    let n = c.num_vars();
    (0u32..(1 << n))
        .map(|b| (0..n).map(|j| (b >> j) & 1 == 1).collect::<Vec<bool>>())
        .filter(|a| c.evaluate(c.root(), a).unwrap())
        .collect()
}

/// Circuit plus a dataset of its models in which every model appears.
fn setup(seed: u64, n: usize) -> (Circuit, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = random_singly_connected(&mut rng, n, 0.5, 3000);
    let mut d = Dataset::with_default_names(n);
    for m in models(&c) {
        d.push(m, rng.gen_range(1..20)).unwrap();
    }
    (c, d)
}

fn log_likelihood(c: &Circuit, p: &PsddParams, d: &Dataset) -> f64 {
    d.rows()
        .map(|(r, w)| w as f64 * joint_probability(c, p, r).unwrap().ln())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ml_beats_random_parameters(seed in any::<u64>(), n in 1usize..7) {
        let (c, d) = setup(seed, n);
        let counts = collect_counts(&c, &d, RowPolicy::Strict).unwrap();
        prop_assert_eq!(counts.context[c.root().index()], d.total());
        let ml = estimate_ml(&c, &counts).unwrap();
        validate_psdd(&c, &ml).unwrap();
        let best = log_likelihood(&c, &ml, &d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..5 {
            let other = random_psdd(&mut rng, &c);
            prop_assert!(log_likelihood(&c, &other, &d) <= best + 1e-9);
        }
    }

    #[test]
    fn ml_is_a_local_maximum(seed in any::<u64>(), n in 1usize..7) {
        let (c, d) = setup(seed, n);
        let ml = estimate_ml(&c, &collect_counts(&c, &d, RowPolicy::Strict).unwrap()).unwrap();
        let best = log_likelihood(&c, &ml, &d);
        for (id, theta) in ml.iter() {
            let live: Vec<usize> = (0..theta.len()).filter(|&i| theta[i] > 2e-3).collect();
            if live.len() < 2 {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut t = theta.clone();
                t[live[0]] += sign * 1e-3;
                t[live[1]] -= sign * 1e-3;
                let mut q = ml.clone();
                q.set(id, t);
                prop_assert!(log_likelihood(&c, &q, &d) <= best + 1e-9);
            }
        }
    }

    #[test]
    fn idm_intervals_nest(seed in any::<u64>(), n in 1usize..7, s in 0.1f64..3.0, extra in 0.0f64..3.0) {
        let (c, d) = setup(seed, n);
        let counts = collect_counts(&c, &d, RowPolicy::Strict).unwrap();
        let small = estimate_idm(&c, &counts, s).unwrap();
        let large = estimate_idm(&c, &counts, s + extra).unwrap();
        for (id, a) in small.iter() {
            let b = large.get(id).unwrap();
            for i in 0..a.k() {
                prop_assert!(b.lower()[i] <= a.lower()[i] + 1e-12 && a.upper()[i] <= b.upper()[i] + 1e-12);
            }
        }
    }

    #[test]
    fn bayes_lies_inside_idm(seed in any::<u64>(), n in 1usize..7, s in 0.0f64..5.0) {
        let (c, d) = setup(seed, n);
        let counts = collect_counts(&c, &d, RowPolicy::Strict).unwrap();
        let bayes = estimate_bayes(&c, &counts, s).unwrap();
        let idm = estimate_idm(&c, &counts, s).unwrap();
        validate_psdd(&c, &bayes).unwrap();
        validate_csdd(&c, &idm).unwrap();
        for (id, cs) in idm.iter() {
            prop_assert!(cs.contains(bayes.get(id).unwrap()));
            let total = counts.context[id.index()] as f64 + s;
            for i in 0..cs.k() {
                prop_assert!(cs.width(i) <= s / total + 1e-12);
            }
        }
    }

    #[test]
    fn zero_strength_idm_is_ml(seed in any::<u64>(), n in 1usize..7) {
        let (c, d) = setup(seed, n);
        let counts = collect_counts(&c, &d, RowPolicy::Strict).unwrap();
        let ml = estimate_ml(&c, &counts).unwrap();
        let idm = estimate_idm(&c, &counts, 0.0).unwrap();
        for (id, cs) in idm.iter() {
            prop_assert!(cs.is_degenerate());
            for (a, b) in cs.lower().iter().zip(ml.get(id).unwrap()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn violating_rows_follow_the_policy(seed in any::<u64>(), n in 2usize..7) {
        let (c, mut d) = setup(seed, n);
        let n_vars = c.num_vars();
        let bad = (0u32..(1 << n_vars))
            .map(|b| (0..n_vars).map(|j| (b >> j) & 1 == 1).collect::<Vec<bool>>())
            .find(|a| !c.evaluate(c.root(), a).unwrap());
        prop_assume!(bad.is_some());
        let before = d.total();
        d.push(bad.unwrap(), 3).unwrap();
        let strict = collect_counts(&c, &d, RowPolicy::Strict);
        let is_row_error = matches!(strict, Err(Error::InconsistentRow { .. }));
        prop_assert!(is_row_error);
        let lenient = collect_counts(&c, &d, RowPolicy::Lenient).unwrap();
        prop_assert_eq!(lenient.dropped, 3);
        prop_assert_eq!(lenient.context[c.root().index()], before);
    }
}
