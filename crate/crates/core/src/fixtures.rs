//! Small hand-built circuits used throughout the tests and the CLI.
//!
//! `squares_*` is the four-variable "squares" domain: a 2x2 grid whose
//! valid configurations are its 10 models. `shared_sub_*` is a circuit for
//! `X2 ∧ (X1 ↔ X4)` in which one credal sub-circuit is reached from two
//! parents, so LP choices made along the two paths can disagree.

use crate::circuit::{Builder, Circuit, NodeId, Shape, Vtree};
use crate::credal::IntervalCredalSet;
use crate::learn::{learn_csdd, Dataset, RowPolicy};
use crate::params::CsddParams;

/// Balanced vtree `((X1 X2) (X3 X4))`.
pub fn squares_vtree() -> Vtree {
    Vtree::balanced(&[1, 2, 3, 4])
}

/// The squares circuit with unshared terminals. Node ids: terminals
/// 0..=23, decision nodes 24..=29, root 30.
pub fn squares_circuit() -> Circuit {
    let vt = squares_vtree();
    let root_v = vt.root();
    let (left, right) = vt.children(root_v).unwrap();
    let leaf2 = vt.leaf_of(2).unwrap();
    let leaf4 = vt.leaf_of(4).unwrap();
    let mut b = Builder::new(vt);
    let t = |b: &mut Builder, x: u32, pos: bool| b.add_literal(x, pos).unwrap();

    let n0 = t(&mut b, 1, false);
    let n1 = t(&mut b, 2, false);
    let n2 = t(&mut b, 1, true);
    let n3 = b.add_false(leaf2).unwrap();
    let n4 = t(&mut b, 3, false);
    let n5 = t(&mut b, 4, true);
    let n6 = t(&mut b, 3, true);
    let n7 = b.add_true(4).unwrap();
    let n8 = t(&mut b, 1, true);
    let n9 = t(&mut b, 2, false);
    let n10 = t(&mut b, 1, false);
    let n11 = t(&mut b, 2, true);
    let n12 = t(&mut b, 3, true);
    let n13 = t(&mut b, 4, false);
    let n14 = t(&mut b, 3, false);
    let n15 = b.add_true(4).unwrap();
    let n16 = t(&mut b, 1, true);
    let n17 = t(&mut b, 2, true);
    let n18 = t(&mut b, 1, false);
    let n19 = b.add_false(leaf2).unwrap();
    let n20 = t(&mut b, 3, false);
    let n21 = t(&mut b, 4, false);
    let n22 = t(&mut b, 3, true);
    let n23 = b.add_false(leaf4).unwrap();
    let n24 = b.add_decision(left, &[(n0, n1), (n2, n3)]).unwrap();
    let n25 = b.add_decision(right, &[(n4, n5), (n6, n7)]).unwrap();
    let n26 = b.add_decision(left, &[(n8, n9), (n10, n11)]).unwrap();
    let n27 = b.add_decision(right, &[(n12, n13), (n14, n15)]).unwrap();
    let n28 = b.add_decision(left, &[(n16, n17), (n18, n19)]).unwrap();
    let n29 = b.add_decision(right, &[(n20, n21), (n22, n23)]).unwrap();
    let root = b
        .add_decision(root_v, &[(n24, n25), (n26, n27), (n28, n29)])
        .unwrap();
    debug_assert_eq!(root, NodeId(30));
    b.finish(root).unwrap()
}

/// Ten configurations of the squares domain with their counts (100 rows).
pub const SQUARES_COUNTS: [([bool; 4], u64); 10] = [
    ([true, false, false, true], 30),
    ([false, true, true, false], 8),
    ([false, false, true, true], 5),
    ([true, true, false, false], 17),
    ([false, true, false, true], 3),
    ([true, false, true, false], 0),
    ([false, false, false, true], 12),
    ([false, true, false, false], 2),
    ([true, false, false, false], 9),
    ([false, false, true, false], 14),
];

pub fn squares_dataset() -> Dataset {
    let mut d = Dataset::with_default_names(4);
    for (row, count) in SQUARES_COUNTS {
        d.push(row.to_vec(), count).unwrap();
    }
    d
}

/// Squares CSDD learned with the imprecise Dirichlet model, `s = 1`.
pub fn squares_csdd() -> (Circuit, CsddParams) {
    let c = squares_circuit();
    let p = learn_csdd(&c, &squares_dataset(), 1.0, RowPolicy::Strict).unwrap();
    (c, p)
}

/// Vtree `((X1 (X2 X3)) X4)`.
pub fn shared_sub_vtree() -> Vtree {
    use Shape::Leaf;
    Vtree::from_shape(&Shape::node(
        Shape::node(Leaf(1), Shape::node(Leaf(2), Leaf(3))),
        Leaf(4),
    ))
}

/// Circuit for `X2 ∧ (X1 ↔ X4)`; node 4 (`X2` over `(X2 X3)`) is the sub of
/// both node 11 and node 13. Root is node 23.
pub fn shared_sub_circuit() -> Circuit {
    let vt = shared_sub_vtree();
    let root_v = vt.root();
    let (v_left, _) = vt.children(root_v).unwrap();
    let (_, v23) = vt.children(v_left).unwrap();
    let leaf3 = vt.leaf_of(3).unwrap();
    let leaf4 = vt.leaf_of(4).unwrap();
    let mut b = Builder::new(vt);
    let n0 = b.add_literal(2, false).unwrap();
    let n1 = b.add_false(leaf3).unwrap();
    let n2 = b.add_literal(2, true).unwrap();
    let n3 = b.add_true(3).unwrap();
    let n4 = b.add_decision(v23, &[(n0, n1), (n2, n3)]).unwrap();
    let n5 = b.add_literal(1, true).unwrap();
    let n6 = b.add_literal(1, false).unwrap();
    let n7 = b.add_false(v23).unwrap();
    let n8 = b.add_literal(1, false).unwrap();
    let n9 = b.add_literal(1, true).unwrap();
    let n10 = b.add_false(v23).unwrap();
    let n11 = b.add_decision(v_left, &[(n5, n4), (n6, n7)]).unwrap();
    let n12 = b.add_literal(4, true).unwrap();
    let n13 = b.add_decision(v_left, &[(n8, n4), (n9, n10)]).unwrap();
    let n14 = b.add_literal(4, false).unwrap();
    let n15 = b.add_literal(2, false).unwrap();
    let n16 = b.add_true(3).unwrap();
    let n17 = b.add_literal(2, true).unwrap();
    let n18 = b.add_false(leaf3).unwrap();
    let n19 = b.add_decision(v23, &[(n15, n16), (n17, n18)]).unwrap();
    let n20 = b.add_true(1).unwrap();
    let n21 = b.add_decision(v_left, &[(n20, n19)]).unwrap();
    let n22 = b.add_false(leaf4).unwrap();
    let root = b
        .add_decision(root_v, &[(n11, n12), (n13, n14), (n21, n22)])
        .unwrap();
    debug_assert_eq!(root, NodeId(23));
    b.finish(root).unwrap()
}

/// Parameters for [`shared_sub_circuit`]: node 3 is `⊤X3` with
/// `P(X3) ∈ [0.2, 0.8]`, everything else is precise.
pub fn shared_sub_csdd() -> (Circuit, CsddParams) {
    let c = shared_sub_circuit();
    let mut p = CsddParams::new(c.len());
    let pt = |v: &[f64]| IntervalCredalSet::point(v).unwrap();
    p.set(NodeId(3), IntervalCredalSet::binary(0.2, 0.8).unwrap());
    p.set(NodeId(4), pt(&[0.0, 1.0]));
    p.set(NodeId(11), pt(&[1.0, 0.0]));
    p.set(NodeId(13), pt(&[1.0, 0.0]));
    p.set(NodeId(16), pt(&[0.5, 0.5]));
    p.set(NodeId(19), pt(&[1.0, 0.0]));
    p.set(NodeId(20), pt(&[0.5, 0.5]));
    p.set(NodeId(21), pt(&[1.0]));
    p.set(NodeId(23), pt(&[0.3, 0.7, 0.0]));
    (c, p)
}
