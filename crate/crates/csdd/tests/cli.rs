use std::path::{Path, PathBuf};
use std::process::Command;

use csdd::io::{write_csdd, write_psdd, VtreeFile};
use csdd_core::experiment;
use csdd_core::fixtures::squares_circuit;
use csdd_core::params::credal_from_psdd;
use csdd_core::random::random_psdd;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

struct Retriever;

impl jsonschema::Retrieve for Retriever {
    fn retrieve(
        &self,
        uri: &jsonschema::Uri<String>,
    ) -> Result<Value, Box<dyn std::error::Error + Send + Sync>> {
        let name = uri
            .as_str()
            .rsplit('/')
            .next()
            .unwrap_or_default()
            .to_string();
        Ok(schema_value(&name))
    }
}

fn schema_value(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn assert_schema(command: &str, body: &Value) {
    let schema = schema_value(&format!("{command}.schema.json"));
    let v = jsonschema::options()
        .with_retriever(Retriever)
        .build(&schema)
        .unwrap();
    let errors: Vec<String> = v
        .iter_errors(body)
        .map(|e| format!("{e} at {}", e.instance_path()))
        .collect();
    assert!(
        errors.is_empty(),
        "{command} output violates its schema: {errors:?}\n{body:#}"
    );
}

struct Out {
    ok: bool,
    json: Value,
    stderr: String,
}

fn csdd(args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_csdd"))
        .args(args)
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = if out.status.success() {
        serde_json::from_str(&stdout).unwrap()
    } else {
        Value::Null
    };
    if out.status.success() {
        assert_schema(args[0], &json);
    }
    Out {
        ok: out.status.success(),
        json,
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn compile_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let o = csdd(&[
        "compile",
        "--fixture",
        "squares",
        "-o",
        &path(dir.path(), "sq.sdd"),
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert_eq!(o.json["connectivity"], "singly_connected");
    assert_eq!(o.json["models"], 10);
    let written = std::fs::read_to_string(dir.path().join("sq.sdd")).unwrap();
    assert_eq!(
        written,
        std::fs::read_to_string(fixture("squares.sdd")).unwrap()
    );

    let o = csdd(&[
        "compile",
        "--fixture",
        "seven-segment",
        "-o",
        &path(dir.path(), "seg.sdd"),
    ]);
    assert!(o.ok, "{}", o.stderr);
    let phi = experiment::formula();
    let brute = (0u32..1 << 14)
        .filter(|b| phi.eval(&(0..14).map(|j| (b >> j) & 1 == 1).collect::<Vec<_>>()))
        .count();
    assert_eq!(o.json["models"], brute as u64);
    assert_eq!(o.json["connectivity"], "multiply_connected");

    let o = csdd(&[
        "compile",
        "--fixture",
        "shared-sub",
        "-o",
        &path(dir.path(), "ss.sdd"),
    ]);
    assert!(o.json["shared"]
        .as_array()
        .unwrap()
        .contains(&Value::from(4)));
}

#[test]
fn compile_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "f.txt");
    std::fs::write(
        &f,
        "# sprinkler\n(and (implies rain wet)\n     (or rain sprinkler))\n",
    )
    .unwrap();
    let o = csdd(&[
        "compile",
        "--formula",
        &f,
        "--auto",
        "-o",
        &path(dir.path(), "f.sdd"),
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert_eq!(o.json["variables"], 3);
    assert_eq!(o.json["models"], 4);
    let vt = o.json["vtree"].as_str().unwrap().to_string();
    assert!(std::fs::read_to_string(&vt)
        .unwrap()
        .contains("c var 3 sprinkler"));

    // Same formula against the generated vtree.
    let o = csdd(&[
        "compile",
        "--formula",
        &f,
        "--vtree",
        &vt,
        "-o",
        &path(dir.path(), "g.sdd"),
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("f.sdd")).unwrap(),
        std::fs::read_to_string(dir.path().join("g.sdd")).unwrap()
    );

    std::fs::write(&f, "(and a (not a))").unwrap();
    let o = csdd(&[
        "compile",
        "--formula",
        &f,
        "--auto",
        "-o",
        &path(dir.path(), "u.sdd"),
    ]);
    assert!(o.ok);
    assert_eq!(o.json["satisfiable"], false);
    assert!(o.stderr.contains("unsatisfiable"));
    assert!(dir.path().join("u.sdd").exists());

    let o = csdd(&[
        "compile",
        "--formula",
        &f,
        "--vtree",
        &path(dir.path(), "missing.vtree"),
        "-o",
        "x.sdd",
    ]);
    assert!(!o.ok);
    std::fs::write(&f, "(and a (nand b))").unwrap();
    let o = csdd(&[
        "compile",
        "--formula",
        &f,
        "--auto",
        "-o",
        &path(dir.path(), "u.sdd"),
    ]);
    assert!(!o.ok && o.stderr.contains("line 1"), "{}", o.stderr);
}

#[test]
fn learn_modes() {
    let dir = tempfile::tempdir().unwrap();
    let (vt, sdd, data) = (
        fixture("squares.vtree"),
        fixture("squares.sdd"),
        fixture("squares.csv"),
    );
    let out = path(dir.path(), "sq.csdd");
    let o = csdd(&[
        "learn", "--vtree", &vt, "--sdd", &sdd, "--data", &data, "--mode", "idm", "--ess", "1",
        "-o", &out,
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert_eq!(o.json["total"], 100);
    let learned = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        learned,
        std::fs::read_to_string(fixture("squares.csdd")).unwrap()
    );
    assert!(learned.contains(&format!("{:.16e} {:.16e}", 31.0 / 101.0, 32.0 / 101.0)));

    let empty = path(dir.path(), "empty.csv");
    std::fs::write(&empty, "X1,X2,X3,X4\n").unwrap();
    let out = path(dir.path(), "u.psdd");
    let o = csdd(&[
        "learn", "--vtree", &vt, "--sdd", &sdd, "--data", &empty, "--mode", "bayes", "--ess", "1",
        "-o", &out,
    ]);
    assert!(o.ok, "{}", o.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    let vtf = csdd::io::read_vtree(&std::fs::read_to_string(&vt).unwrap()).unwrap();
    let (c, p) = csdd::io::read_psdd(&text, &vtf).unwrap();
    for (n, theta) in p.iter() {
        let zeros = csdd_core::params::structural_zeros(&c, n);
        let live = zeros.iter().filter(|z| !**z).count() as f64;
        for (t, z) in theta.iter().zip(zeros) {
            assert_eq!(*t, if z { 0.0 } else { 1.0 / live });
        }
    }

    let o = csdd(&[
        "learn", "--vtree", &vt, "--sdd", &sdd, "--data", &empty, "--mode", "ml", "-o", &out,
    ]);
    assert!(!o.ok);
    assert!(
        o.stderr.contains("node ") && o.stderr.contains("empty context"),
        "{}",
        o.stderr
    );
    let o = csdd(&[
        "learn", "--vtree", &vt, "--sdd", &sdd, "--data", &data, "--mode", "idm", "--ess", "0",
        "-o", &out,
    ]);
    assert!(!o.ok);

    let bad = path(dir.path(), "bad.csv");
    std::fs::write(&bad, "X1,X2,X3,X4\n1,0,0,1\n1,1,1,1\n").unwrap();
    let o = csdd(&[
        "learn", "--vtree", &vt, "--sdd", &sdd, "--data", &bad, "--mode", "ml", "-o", &out,
    ]);
    assert!(!o.ok && o.stderr.contains("line 3"), "{}", o.stderr);
    let o = csdd(&[
        "learn",
        "--vtree",
        &vt,
        "--sdd",
        &sdd,
        "--data",
        &bad,
        "--mode",
        "bayes",
        "--lenient",
        "-o",
        &out,
    ]);
    assert!(o.ok);
    assert_eq!(o.json["dropped"], 1);
}

#[test]
fn credal_queries() {
    let (vt, model) = (fixture("squares.vtree"), fixture("squares.csdd"));
    let o = csdd(&[
        "query",
        "--vtree",
        &vt,
        "--model",
        &model,
        "--type",
        "marginal",
        "--evidence",
        "X1=0,X2=0,X3=0,X4=1",
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert!((num(&o.json["lower"]) - 12.0 / 32.0 * 31.0 / 101.0).abs() <= 1e-9);
    assert!(num(&o.json["upper"]) >= num(&o.json["lower"]));

    let o = csdd(&[
        "query",
        "--vtree",
        &vt,
        "--model",
        &model,
        "--type",
        "conditional",
        "--evidence",
        "X2=0,X3=0,X4=1",
        "--target",
        "X1=1",
        "--exact",
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert_eq!(o.json["certificate"]["status"], "exact");
    let (lo, hi) = (num(&o.json["lower"]), num(&o.json["upper"]));
    assert!(lo <= hi);
    assert!((num(&o.json["exact"]["lower"]) - lo).abs() <= 1e-6);
    assert!((num(&o.json["exact"]["upper"]) - hi).abs() <= 1e-6);
    assert!(o.json["bounds"]["lower"]["iterations"].as_u64().unwrap() > 0);

    let o = csdd(&[
        "query",
        "--vtree",
        &vt,
        "--model",
        &model,
        "--type",
        "marginal",
        "--evidence",
        "X1=1,X2=1,X3=1,X4=1",
    ]);
    assert!(!o.ok);
    assert!(
        o.stderr.contains("evidence violates circuit constraints"),
        "{}",
        o.stderr
    );
    let o = csdd(&[
        "query",
        "--vtree",
        &vt,
        "--model",
        &model,
        "--type",
        "marginal",
        "--evidence",
        "Y=1",
    ]);
    assert!(!o.ok && o.stderr.contains("unknown variable"));

    let o = csdd(&[
        "query",
        "--vtree",
        &vt,
        "--model",
        &model,
        "--type",
        "map",
        "--evidence",
        "X1=1",
    ]);
    assert!(o.ok);
    assert!(num(&o.json["upper"]) > 0.0);
}

#[test]
fn shared_node_is_flagged() {
    let (vt, model) = (fixture("shared_sub.vtree"), fixture("shared_sub.csdd"));
    let o = csdd(&[
        "query",
        "--vtree",
        &vt,
        "--model",
        &model,
        "--type",
        "conditional",
        "--evidence",
        "X3=1",
        "--target",
        "X1=1",
        "--exact",
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert_eq!(o.json["certificate"]["status"], "possibly_outer");
    assert!(o.json["certificate"]["conflicted"]
        .as_array()
        .unwrap()
        .contains(&Value::from(3)));
    assert!(o.json["certificate"]["entry_points"]
        .as_array()
        .unwrap()
        .contains(&Value::from(4)));
    assert!(num(&o.json["lower"]) <= num(&o.json["exact"]["lower"]) + 1e-9);
}

#[test]
fn degenerate_and_precise_models() {
    let dir = tempfile::tempdir().unwrap();
    let c = squares_circuit();
    let vtf = VtreeFile::with_default_names(c.vtree().clone());
    let p = random_psdd(&mut ChaCha8Rng::seed_from_u64(11), &c);
    let (psdd, pt) = (path(dir.path(), "p.psdd"), path(dir.path(), "p.csdd"));
    std::fs::write(&psdd, write_psdd(&c, &vtf, &p)).unwrap();
    std::fs::write(&pt, write_csdd(&c, &vtf, &credal_from_psdd(&p).unwrap())).unwrap();
    let vt = fixture("squares.vtree");

    let q = |model: &str, kind: &str, extra: &[&str]| {
        let mut args = vec![
            "query",
            "--vtree",
            &vt,
            "--model",
            model,
            "--type",
            kind,
            "--evidence",
            "X4=1",
        ];
        args.extend_from_slice(extra);
        csdd(&args)
    };
    let m = q(&pt, "marginal", &[]);
    assert_eq!(m.json["lower"], m.json["upper"]);
    let pm = q(&psdd, "marginal", &[]);
    assert!((num(&pm.json["value"]) - num(&m.json["lower"])).abs() <= 1e-12);
    let cc = q(&pt, "conditional", &["--target", "X1=0"]);
    let pc = q(&psdd, "conditional", &["--target", "X1=0"]);
    assert!((num(&cc.json["lower"]) - num(&pc.json["value"])).abs() <= 1e-6);
    assert!((num(&cc.json["upper"]) - num(&pc.json["value"])).abs() <= 1e-6);
    let map = q(&psdd, "map", &[]);
    assert!(map.ok);
    let x_star = map.json["assignment"].as_str().unwrap().to_string();

    let r = csdd(&[
        "robust",
        "--vtree",
        &vt,
        "--csdd",
        &pt,
        "--psdd",
        &psdd,
        "--evidence",
        "X4=1",
    ]);
    assert!(r.ok, "{}", r.stderr);
    assert_eq!(r.json["x_star"], x_star.as_str());
    assert_eq!(r.json["label"], "robust");
    assert_eq!(r.json["certificate"]["status"], "exact");

    let r = csdd(&[
        "robust",
        "--vtree",
        &vt,
        "--csdd",
        &pt,
        "--evidence",
        "X4=1",
        "--map",
        "X1=1,X2=1,X3=1",
    ]);
    assert!(r.ok, "{}", r.stderr);
    assert_eq!(r.json["label"], "not_robust");
    assert_eq!(r.json["V"], 1.0);
    let r = csdd(&[
        "robust",
        "--vtree",
        &vt,
        "--csdd",
        &pt,
        "--evidence",
        "X4=1",
        "--map",
        "X1=1",
    ]);
    assert!(!r.ok && r.stderr.contains("unassigned"));
}

#[test]
fn shared_sub_robustness() {
    let (vt, csdd_file, psdd_file) = (
        fixture("shared_sub.vtree"),
        fixture("shared_sub.csdd"),
        fixture("shared_sub.psdd"),
    );
    let r = csdd(&[
        "robust",
        "--vtree",
        &vt,
        "--csdd",
        &csdd_file,
        "--psdd",
        &psdd_file,
        "--evidence",
        "X3=1",
    ]);
    assert!(r.ok, "{}", r.stderr);
    assert!(r.json["V"] == "inf" || num(&r.json["V"]) >= 1.0);
}

fn read_csv(path: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn experiment_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "a.csv");
    let o = csdd(&[
        "experiment",
        "--d",
        "20",
        "--pf",
        "0.2",
        "--seeds",
        "5",
        "--test-size",
        "40",
        "-o",
        &out,
    ]);
    assert!(o.ok, "{}", o.stderr);
    assert_eq!(o.json["digit_prior"], "uniform");
    assert_eq!(o.json["seed"], 0);
    let rows = read_csv(&out);
    assert_eq!(rows[0].join(","), "d,pf,seed,accuracy,determinacy,det_acc,indet_acc,u80,joint_accuracy,joint_determinacy,joint_det_acc,joint_indet_acc");
    assert_eq!(rows.len(), 6);
    for r in &rows[1..] {
        for cell in &r[3..] {
            if !cell.is_empty() {
                let x: f64 = cell.parse().unwrap();
                assert!((0.0..=1.0).contains(&x), "{cell}");
            }
        }
    }

    let again = path(dir.path(), "b.csv");
    let st = Command::new(env!("CARGO_BIN_EXE_csdd"))
        .args([
            "experiment",
            "--d",
            "20",
            "--pf",
            "0.2",
            "--seeds",
            "5",
            "--test-size",
            "40",
            "-o",
            &again,
        ])
        .env("CSDD_THREADS", "3")
        .output()
        .unwrap();
    assert!(st.status.success());
    assert_eq!(read_csv(&out), read_csv(&again));

    let noise_free = path(dir.path(), "c.csv");
    let o = csdd(&[
        "experiment",
        "--d",
        "50",
        "--pf",
        "0",
        "--seeds",
        "2",
        "--test-size",
        "30",
        "-o",
        &noise_free,
    ]);
    assert!(o.ok);
    for r in &read_csv(&noise_free)[1..] {
        assert_eq!(r[3], "1.0", "accuracy");
        assert_eq!(r[4], "1.0", "determinacy");
    }
}
