use csdd_core::circuit::{ConnectivityClass, Evidence, NodeId};
use csdd_core::fixtures::{shared_sub_csdd, squares_circuit, squares_csdd};
use csdd_core::infer::{
    brute_force_exact, lower_conditional, lower_marginal, node_bounds, strong_extension_oracle,
    upper_conditional, ExactQuery, ExactnessStatus, Functional,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn squares_structure() {
    let c = squares_circuit();
    assert_eq!(c.len(), 31);
    assert_eq!(c.root(), NodeId(30));
    assert_eq!(c.model_count(), 10);
    assert_eq!(c.enumerate_models(c.root()).unwrap().len(), 10);
    assert_eq!(c.multiplicity().class, ConnectivityClass::SinglyConnected);
    c.check_partitions(16, 0).unwrap();
}

#[test]
fn squares_idm_intervals() {
    let (_, p) = squares_csdd();
    let expect = [
        (30, 0, 31.0 / 101.0, 32.0 / 101.0),
        (30, 1, 52.0 / 101.0, 53.0 / 101.0),
        (30, 2, 17.0 / 101.0, 18.0 / 101.0),
        (25, 0, 12.0 / 32.0, 13.0 / 32.0),
        (26, 0, 39.0 / 53.0, 40.0 / 53.0),
        (27, 0, 8.0 / 53.0, 9.0 / 53.0),
        (7, 0, 5.0 / 20.0, 6.0 / 20.0),
        (15, 0, 33.0 / 45.0, 34.0 / 45.0),
    ];
    for (n, i, l, u) in expect {
        let cs = p.get(NodeId(n)).unwrap();
        assert!(
            close(cs.lower()[i], l, 1e-12),
            "node {n} lower {} vs {l}",
            cs.lower()[i]
        );
        assert!(
            close(cs.upper()[i], u, 1e-12),
            "node {n} upper {} vs {u}",
            cs.upper()[i]
        );
    }
}

#[test]
fn squares_lower_marginal() {
    let (c, p) = squares_csdd();
    let e = Evidence::total(&[false, false, false, true]);
    let v = lower_marginal(&c, &p, &e).unwrap();
    assert!(close(v, 12.0 / 32.0 * 31.0 / 101.0, 1e-9), "{v}");
}

#[test]
fn squares_conditional_crossing() {
    let (c, p) = squares_csdd();
    let e = Evidence::from_pairs(4, &[(2, false), (3, false), (4, true)]).unwrap();
    let nb = node_bounds(&c, &p, &e).unwrap();
    assert!(close(nb[25].upper, 13.0 / 32.0, 1e-12), "{}", nb[25].upper);
    assert!(
        close(nb[27].lower, 484.0 / 795.0, 1e-12),
        "{}",
        nb[27].lower
    );
    let b = lower_conditional(&c, &p, 1, true, &e, 1e-9).unwrap();
    let f = Functional::Conditional {
        var: 1,
        value: true,
        evidence: e.clone(),
    };
    let oracle = strong_extension_oracle(&c, &p, &f, 1_000_000).unwrap();
    assert!(
        close(b.value, oracle.min, 1e-6),
        "{} vs {}",
        b.value,
        oracle.min
    );
    assert_eq!(b.certificate.status, ExactnessStatus::Exact);
}

#[test]
fn shared_sub_outer_bound() {
    let (c, p) = shared_sub_csdd();
    assert_eq!(c.multiplicity().class, ConnectivityClass::MultiplyConnected);
    let e = Evidence::from_pairs(4, &[(3, true)]).unwrap();
    let b = lower_conditional(&c, &p, 1, true, &e, 1e-9).unwrap();
    let f = Functional::Conditional {
        var: 1,
        value: true,
        evidence: e.clone(),
    };
    let o = strong_extension_oracle(&c, &p, &f, 1000).unwrap();
    println!(
        "relaxed {} exact {} cert {:?}",
        b.value, o.min, b.certificate
    );
    assert!(b.value <= o.min + 1e-9);
    assert_eq!(b.certificate.status, ExactnessStatus::PossiblyOuter);
    assert!(b.certificate.conflicted_nodes().any(|n| n == NodeId(3)));
    assert!(b.certificate.entry_points.contains(&NodeId(4)));
    let bf = brute_force_exact(
        &c,
        &p,
        &ExactQuery::LowerConditional {
            var: 1,
            value: true,
            evidence: e.clone(),
        },
        1000,
    )
    .unwrap();
    assert!(close(bf.value, o.min, 1e-9), "{} vs {}", bf.value, o.min);
    let up = upper_conditional(&c, &p, 1, true, &e, 1e-9).unwrap();
    assert!(up.value >= o.max - 1e-9);
}
