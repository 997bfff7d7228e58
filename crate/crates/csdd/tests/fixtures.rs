//! The files under `fixtures/` must match what the library produces. Run
//! with `CSDD_BLESS=1` to rewrite them.

use std::path::PathBuf;

use csdd::io::{write_csdd, write_dataset, write_psdd, write_sdd, write_vtree, VtreeFile};
use csdd::vars::VarTable;
use csdd_core::circuit::NodeId;
use csdd_core::credal::IntervalCredalSet;
use csdd_core::experiment;
use csdd_core::fixtures::{shared_sub_csdd, squares_csdd, squares_dataset};
use csdd_core::params::PsddParams;

fn check(name: &str, text: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    if std::env::var_os("CSDD_BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
        return;
    }
    let committed =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(committed, text, "{} is stale", path.display());
}

/// A PSDD inside the shared-sub CSDD: every set at its lower-index vertex,
/// except the credal terminal, which is fair.
pub fn shared_sub_psdd() -> PsddParams {
    let (c, p) = shared_sub_csdd();
    let mut q = PsddParams::new(c.len());
    for (n, cs) in p.iter() {
        let theta = if n == NodeId(3) {
            vec![0.5, 0.5]
        } else {
            cs.lower().to_vec()
        };
        assert!(IntervalCredalSet::point(&theta).is_ok());
        q.set(n, theta);
    }
    q
}

#[test]
fn committed_fixtures_are_current() {
    let (c, p) = squares_csdd();
    let vt = VtreeFile::with_default_names(c.vtree().clone());
    check("squares.vtree", &write_vtree(&vt));
    check("squares.sdd", &write_sdd(&c, &vt));
    check("squares.csdd", &write_csdd(&c, &vt, &p));
    check("squares.csv", &write_dataset(&squares_dataset()));

    let (c, p) = shared_sub_csdd();
    let vt = VtreeFile::with_default_names(c.vtree().clone());
    check("shared_sub.vtree", &write_vtree(&vt));
    check("shared_sub.sdd", &write_sdd(&c, &vt));
    check("shared_sub.csdd", &write_csdd(&c, &vt, &p));
    check("shared_sub.psdd", &write_psdd(&c, &vt, &shared_sub_psdd()));

    let c = experiment::circuit().unwrap();
    let vt = VtreeFile::new(
        c.vtree().clone(),
        VarTable::new(experiment::variable_names()).unwrap(),
    );
    check("seven_segment.vtree", &write_vtree(&vt));
    check("seven_segment.sdd", &write_sdd(&c, &vt));
}
