use csdd_core::credal::IntervalCredalSet;
use proptest::prelude::*;

/// A random nonempty interval set over `k` states built around a pmf.
fn credal_set() -> impl Strategy<Value = IntervalCredalSet> {
    (1usize..6)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(0.05f64..1.0, k),
                prop::collection::vec(0.0f64..0.3, k),
                prop::collection::vec(0.0f64..0.3, k),
            )
        })
        .prop_map(|(raw, dl, du)| {
            let s: f64 = raw.iter().sum();
            let theta: Vec<f64> = raw.iter().map(|x| x / s).collect();
            let lo = theta
                .iter()
                .zip(&dl)
                .map(|(t, d)| (t - d).max(0.0))
                .collect();
            let hi = theta
                .iter()
                .zip(&du)
                .map(|(t, d)| (t + d).min(1.0))
                .collect();
            IntervalCredalSet::new(lo, hi).unwrap()
        })
}

proptest! {
    #[test]
    fn greedy_matches_vertex_enumeration(cs in credal_set(), seed in prop::collection::vec(-1.0f64..1.0, 6)) {
        let c = &seed[..cs.k()];
        let verts = cs.vertices().unwrap();
        let dot = |v: &[f64]| v.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
        let lo = verts.iter().map(|v| dot(v)).fold(f64::INFINITY, f64::min);
        let hi = verts.iter().map(|v| dot(v)).fold(f64::NEG_INFINITY, f64::max);
        let (m, theta) = cs.minimize_linear(c);
        prop_assert!((m - lo).abs() <= 1e-12, "{} vs {}", m, lo);
        prop_assert!(cs.contains(&theta));
        let (mx, theta) = cs.maximize_linear(c);
        prop_assert!((mx - hi).abs() <= 1e-12, "{} vs {}", mx, hi);
        prop_assert!(cs.contains(&theta));
    }

    #[test]
    fn vertices_are_feasible_and_distinct(cs in credal_set()) {
        let verts = cs.vertices().unwrap();
        prop_assert!(!verts.is_empty());
        for (i, v) in verts.iter().enumerate() {
            prop_assert!(cs.contains(v));
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert_eq!(cs.vertex_index(v), Some(i));
        }
    }

    #[test]
    fn bounds_are_reachable(cs in credal_set()) {
        for i in 0..cs.k() {
            let mut c = vec![0.0; cs.k()];
            c[i] = 1.0;
            prop_assert!((cs.minimize_linear(&c).0 - cs.lower()[i]).abs() <= 1e-12);
            prop_assert!((cs.maximize_linear(&c).0 - cs.upper()[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn max_ratio_matches_vertices(cs in credal_set(), i in 0usize..6, j in 0usize..6) {
        let (i, j) = (i % cs.k(), j % cs.k());
        prop_assume!(i != j && cs.lower()[j] > 0.0);
        let best = cs
            .vertices()
            .unwrap()
            .iter()
            .map(|v| v[i] / v[j])
            .fold(f64::NEG_INFINITY, f64::max);
        let (r, theta) = cs.max_ratio(i, j).unwrap();
        prop_assert!((r - best).abs() <= 1e-9 * best.max(1.0), "{} vs {}", r, best);
        prop_assert!(cs.contains(&theta));
    }
}
