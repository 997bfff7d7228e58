//! Subcommands of the `csdd` binary. Each returns the JSON body that the
//! binary prints on stdout; warnings go to stderr.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use csdd_core::circuit::{compile_formula, Circuit, Evidence, Var, Vtree};
use csdd_core::error::Error as CoreError;
use csdd_core::infer::{
    brute_force_exact, credal_map_upper, map_psdd, marginal_bounds, marginal_psdd, robustness,
    ConditionalBound, ExactQuery, DEFAULT_TOL,
};
use csdd_core::learn::{collect_counts, estimate_bayes, estimate_idm, estimate_ml, RowPolicy};
use csdd_core::params::{is_parameterized, CsddParams, PsddParams};
use csdd_core::{experiment, fixtures};
use serde_json::Value;

use crate::io::{
    parse_formula, read_csdd, read_dataset, read_psdd, read_sdd, read_vtree, sniff_model,
    write_csdd, write_psdd, write_sdd, write_vtree, ModelKind, VtreeFile,
};
use crate::report::{
    connectivity_name, label_name, BoundJson, BoundsJson, CertificateJson, CompileReport,
    ExactJson, ExperimentReport, LearnReport, NodeCounts, QueryReport, Ratio, RobustReport,
};
use crate::runner::{run_grid, summarize, thread_count, write_csv, Grid};
use crate::vars::VarTable;

#[derive(Debug, Parser)]
#[command(name = "csdd", version, about = "Credal sentential decision diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a formula or a built-in circuit into an SDD file.
    Compile(CompileArgs),
    /// Learn PSDD or CSDD parameters from complete data.
    Learn(LearnArgs),
    /// Marginal, conditional or MAP query on a PSDD or CSDD.
    Query(QueryArgs),
    /// Robustness of a MAP explanation over a CSDD.
    Robust(RobustArgs),
    /// Run the seven-segment experiment grid.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Squares,
    SevenSegment,
    SharedSub,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["formula", "fixture"]))]
pub struct CompileArgs {
    /// S-expression formula file.
    #[arg(long)]
    pub formula: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    /// Vtree file naming the formula's variables.
    #[arg(long, conflicts_with_all = ["auto", "fixture"])]
    pub vtree: Option<PathBuf>,
    /// Balanced vtree over the formula's variables in order of appearance.
    #[arg(long)]
    pub auto: bool,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Where to write a generated vtree (default: the output with a
    /// `.vtree` extension).
    #[arg(long)]
    pub vtree_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LearnMode {
    Ml,
    Bayes,
    Idm,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long)]
    pub vtree: PathBuf,
    #[arg(long)]
    pub sdd: PathBuf,
    /// CSV with one 0/1 column per variable and an optional `count` column.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub mode: LearnMode,
    /// Equivalent sample size for `bayes` and `idm`.
    #[arg(long, default_value_t = 1.0)]
    pub ess: f64,
    /// Skip rows that violate the circuit instead of failing.
    #[arg(long)]
    pub lenient: bool,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QueryType {
    Marginal,
    Conditional,
    Map,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub vtree: PathBuf,
    /// PSDD or CSDD file; the kind is read from its header.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "type", value_enum)]
    pub kind: QueryType,
    /// Observations as `name=0|1` pairs separated by commas.
    #[arg(long, default_value = "")]
    pub evidence: String,
    /// Query variable for conditionals, as `name=0|1`.
    #[arg(long)]
    pub target: Option<String>,
    /// Bisection width for credal conditionals.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Also compute the exact credal conditional by branching on conflicts.
    #[arg(long)]
    pub exact: bool,
    /// Leaf budget for `--exact`.
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct RobustArgs {
    #[arg(long)]
    pub vtree: PathBuf,
    #[arg(long)]
    pub csdd: PathBuf,
    /// PSDD whose MAP completion is tested when `--map` is absent.
    #[arg(long)]
    pub psdd: Option<PathBuf>,
    #[arg(long, default_value = "")]
    pub evidence: String,
    /// Explanation `x*` as `name=0|1` pairs for the unobserved variables.
    #[arg(long)]
    pub map: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    SevenSegment,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum, default_value = "seven-segment")]
    pub scenario: Scenario,
    /// Training set sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,15,20,50,100")]
    pub d: Vec<usize>,
    /// Lamp failure probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.3,0.4")]
    pub pf: Vec<f64>,
    /// Runs per `(d, pf)` cell.
    #[arg(long, default_value_t = 5)]
    pub seeds: usize,
    #[arg(long, default_value_t = 140)]
    pub test_size: usize,
    #[arg(long, default_value_t = 1.0)]
    pub ess: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV file for the per-run metrics.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn in_file<T, E: Into<anyhow::Error>>(path: &Path, r: std::result::Result<T, E>) -> Result<T> {
    r.map_err(|e| e.into().context(format!("{}", path.display())))
}

fn vtree_file(path: &Path) -> Result<VtreeFile> {
    in_file(path, read_vtree(&read(path)?))
}

pub fn run(cli: Cli) -> Result<Value> {
    let body = match cli.command {
        Command::Compile(a) => serde_json::to_value(compile(&a)?)?,
        Command::Learn(a) => serde_json::to_value(learn(&a)?)?,
        Command::Query(a) => serde_json::to_value(query(&a)?)?,
        Command::Robust(a) => serde_json::to_value(robust(&a)?)?,
        Command::Experiment(a) => serde_json::to_value(experiment_cmd(&a)?)?,
    };
    Ok(body)
}

fn fixture(f: Fixture) -> Result<(Circuit, VarTable)> {
    Ok(match f {
        Fixture::Squares => {
            let c = fixtures::squares_circuit();
            let n = c.num_vars();
            (c, VarTable::default_names(n))
        }
        Fixture::SharedSub => {
            let c = fixtures::shared_sub_circuit();
            let n = c.num_vars();
            (c, VarTable::default_names(n))
        }
        Fixture::SevenSegment => (
            experiment::circuit()?,
            VarTable::new(experiment::variable_names())?,
        ),
    })
}

pub fn compile(a: &CompileArgs) -> Result<CompileReport> {
    let (circuit, vt, generated) = match (&a.formula, a.fixture) {
        (_, Some(f)) => {
            let (c, names) = fixture(f)?;
            let vt = VtreeFile::new(c.vtree().clone(), names);
            (c, vt, true)
        }
        (Some(path), None) => {
            let text = read(path)?;
            let (vt, f, generated) = match (&a.vtree, a.auto) {
                (Some(vp), _) => {
                    let vt = vtree_file(vp)?;
                    let (f, _) = in_file(path, parse_formula(&text, Some(&vt.vars)))?;
                    (vt, f, false)
                }
                (None, true) => {
                    let (f, names) = in_file(path, parse_formula(&text, None))?;
                    ensure!(
                        !names.is_empty(),
                        "formula mentions no variables; give a vtree with --vtree"
                    );
                    let vars: Vec<Var> = (1..=names.len() as Var).collect();
                    (VtreeFile::new(Vtree::balanced(&vars), names), f, true)
                }
                (None, false) => bail!("a formula needs --vtree <file> or --auto"),
            };
            (compile_formula(&f, &vt.vtree)?, vt, generated)
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    let models = circuit.model_count();
    if models == 0 {
        eprintln!("warning: the formula is unsatisfiable; writing a circuit with a ⊥ root");
    }
    write(&a.output, &write_sdd(&circuit, &vt))?;
    let vtree_path = if generated {
        let p = a
            .vtree_out
            .clone()
            .unwrap_or_else(|| a.output.with_extension("vtree"));
        write(&p, &write_vtree(&vt))?;
        Some(p.display().to_string())
    } else {
        a.vtree.as_ref().map(|p| p.display().to_string())
    };
    let m = circuit.multiplicity();
    Ok(CompileReport {
        variables: circuit.num_vars(),
        nodes: circuit.len(),
        decision_nodes: circuit.decision_count(),
        models,
        satisfiable: models > 0,
        connectivity: connectivity_name(m.class),
        shared: m.shared_nodes().map(|n| n.0).collect(),
        sdd: a.output.display().to_string(),
        vtree: vtree_path,
    })
}

fn describe(e: CoreError) -> anyhow::Error {
    match e {
        CoreError::EmptyContext(n) => anyhow!(
            "node {} has an empty context; maximum likelihood is undefined (a prior, as in --mode bayes, fixes this)",
            n.0
        ),
        CoreError::InconsistentRow { row } => {
            anyhow!("data row {} (line {}) violates the circuit constraints; --lenient skips such rows", row + 1, row + 2)
        }
        e => e.into(),
    }
}

pub fn learn(a: &LearnArgs) -> Result<LearnReport> {
    let vt = vtree_file(&a.vtree)?;
    let c = in_file(&a.sdd, read_sdd(&read(&a.sdd)?, &vt))?;
    let data = in_file(&a.data, read_dataset(&read(&a.data)?, Some(&vt.vars)))?;
    if a.mode != LearnMode::Ml {
        ensure!(
            a.ess.is_finite() && a.ess > 0.0,
            "--ess must be positive, got {}",
            a.ess
        );
    }
    let policy = if a.lenient {
        RowPolicy::Lenient
    } else {
        RowPolicy::Strict
    };
    let counts = collect_counts(&c, &data, policy).map_err(describe)?;
    let text = match a.mode {
        LearnMode::Ml => write_psdd(&c, &vt, &estimate_ml(&c, &counts).map_err(describe)?),
        LearnMode::Bayes => write_psdd(
            &c,
            &vt,
            &estimate_bayes(&c, &counts, a.ess).map_err(describe)?,
        ),
        LearnMode::Idm => write_csdd(
            &c,
            &vt,
            &estimate_idm(&c, &counts, a.ess).map_err(describe)?,
        ),
    };
    write(&a.output, &text)?;
    if counts.dropped > 0 {
        eprintln!(
            "warning: skipped {} rows that violate the circuit",
            counts.dropped
        );
    }
    let nodes: Vec<NodeCounts> = c
        .ids()
        .filter(|&n| is_parameterized(&c, n))
        .map(|n| NodeCounts {
            node: n.0,
            context: counts.context[n.index()],
            states: counts.states[n.index()].clone(),
        })
        .collect();
    Ok(LearnReport {
        mode: match a.mode {
            LearnMode::Ml => "ml",
            LearnMode::Bayes => "bayes",
            LearnMode::Idm => "idm",
        },
        ess: (a.mode != LearnMode::Ml).then_some(a.ess),
        rows: data.len(),
        total: data.total(),
        dropped: counts.dropped,
        empty_contexts: nodes
            .iter()
            .filter(|n| n.context == 0)
            .map(|n| n.node)
            .collect(),
        nodes,
        output: a.output.display().to_string(),
    })
}

enum Model {
    Psdd(Circuit, PsddParams),
    Csdd(Circuit, CsddParams),
}

impl Model {
    fn circuit(&self) -> &Circuit {
        match self {
            Model::Psdd(c, _) | Model::Csdd(c, _) => c,
        }
    }
}

fn load_model(path: &Path, vt: &VtreeFile) -> Result<Model> {
    let text = read(path)?;
    Ok(match in_file(path, sniff_model(&text))? {
        ModelKind::Psdd => {
            let (c, p) = in_file(path, read_psdd(&text, vt))?;
            Model::Psdd(c, p)
        }
        ModelKind::Csdd => {
            let (c, p) = in_file(path, read_csdd(&text, vt))?;
            Model::Csdd(c, p)
        }
        ModelKind::Sdd => bail!(
            "{}: an SDD has no parameters; learn a PSDD or CSDD first",
            path.display()
        ),
    })
}

fn evidence(vt: &VtreeFile, text: &str, c: &Circuit) -> Result<Evidence> {
    let e = vt.vars.parse_evidence(text).context("--evidence")?;
    if !c.is_consistent(&e) {
        return Err(CoreError::InconsistentEvidence.into());
    }
    Ok(e)
}

fn bound_json(b: &ConditionalBound) -> BoundJson {
    BoundJson {
        value: b.value,
        bracket: [b.bracket.0, b.bracket.1],
        iterations: b.iterations,
        certificate: CertificateJson::new(&b.certificate),
    }
}

pub fn query(a: &QueryArgs) -> Result<QueryReport> {
    let vt = vtree_file(&a.vtree)?;
    let model = load_model(&a.model, &vt)?;
    let c = model.circuit();
    let e = evidence(&vt, &a.evidence, c)?;
    let mut r = QueryReport {
        model: if matches!(model, Model::Psdd(..)) {
            "psdd"
        } else {
            "csdd"
        },
        evidence: vt.vars.format_pairs(e.observed()),
        ..QueryReport::default()
    };
    let target = match (a.kind, &a.target) {
        (QueryType::Conditional, None) => bail!("a conditional query needs --target name=0|1"),
        (QueryType::Conditional, Some(t)) => {
            let pairs = vt.vars.parse_pairs(t).context("--target")?;
            ensure!(pairs.len() == 1, "--target takes exactly one name=0|1 pair");
            r.target = Some(vt.vars.format_pairs(pairs.iter().copied()));
            Some(pairs[0])
        }
        (_, Some(_)) => bail!("--target only applies to conditional queries"),
        _ => None,
    };
    match (&model, a.kind) {
        (Model::Psdd(c, p), QueryType::Marginal) => {
            r.kind = "marginal";
            r.value = Some(marginal_psdd(c, p, &e)?);
        }
        (Model::Psdd(c, p), QueryType::Conditional) => {
            r.kind = "conditional";
            let (x, val) = target.unwrap();
            ensure!(
                !e.is_observed(x),
                "the target `{}` is also observed",
                vt.vars.name(x)
            );
            let pe = marginal_psdd(c, p, &e)?;
            r.value = Some(marginal_psdd(c, p, &e.with(x, val)?)? / pe);
        }
        (Model::Psdd(c, p), QueryType::Map) => {
            r.kind = "map";
            let m = map_psdd(c, p, &e)?;
            r.value = Some(m.value);
            r.assignment = Some(
                vt.vars.format_pairs(
                    m.assignment
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| (i as Var + 1, b)),
                ),
            );
            r.tied = Some(m.tied);
        }
        (Model::Csdd(c, p), QueryType::Marginal) => {
            r.kind = "marginal";
            let b = marginal_bounds(c, p, &e)?;
            r.lower = Some(b.lower);
            r.upper = Some(b.upper);
        }
        (Model::Csdd(c, p), QueryType::Conditional) => {
            r.kind = "conditional";
            let (x, val) = target.unwrap();
            ensure!(a.tol > 0.0 && a.tol.is_finite(), "--tol must be positive");
            let passes = csdd_core::infer::lower_conditional(c, p, x, val, &e, a.tol)?;
            let upper = csdd_core::infer::upper_conditional(c, p, x, val, &e, a.tol)?;
            r.lower = Some(passes.value);
            r.upper = Some(upper.value);
            r.certificate = Some(CertificateJson::merge(&[
                &passes.certificate,
                &upper.certificate,
            ]));
            r.bounds = Some(BoundsJson {
                lower: bound_json(&passes),
                upper: bound_json(&upper),
            });
            if a.exact {
                let lo = brute_force_exact(
                    c,
                    p,
                    &ExactQuery::LowerConditional {
                        var: x,
                        value: val,
                        evidence: e.clone(),
                    },
                    a.cap,
                )?;
                let hi = brute_force_exact(
                    c,
                    p,
                    &ExactQuery::UpperConditional {
                        var: x,
                        value: val,
                        evidence: e.clone(),
                    },
                    a.cap,
                )?;
                r.exact = Some(ExactJson {
                    lower: lo.value,
                    upper: hi.value,
                    leaves: lo.leaves + hi.leaves,
                });
            }
        }
        (Model::Csdd(c, p), QueryType::Map) => {
            r.kind = "map";
            r.upper = Some(credal_map_upper(c, p, &e)?);
        }
    }
    Ok(r)
}

/// Completes `x*` from the evidence and the `--map` pairs, which must
/// cover every unobserved variable and agree with the observed ones.
fn explanation(vt: &VtreeFile, e: &Evidence, text: &str) -> Result<Vec<bool>> {
    let pairs = vt.vars.parse_pairs(text).context("--map")?;
    let mut x = Evidence::empty(vt.vars.len());
    for (v, b) in e.observed() {
        x.set(v, b)?;
    }
    for (v, b) in pairs {
        match e.get(v) {
            Some(o) if o != b => bail!("--map sets `{}` against the evidence", vt.vars.name(v)),
            _ => x.set(v, b)?,
        }
    }
    let missing: Vec<&str> = x.unobserved().map(|v| vt.vars.name(v)).collect();
    ensure!(
        missing.is_empty(),
        "--map leaves {} unassigned",
        missing.join(", ")
    );
    Ok(x.values().iter().map(|v| v.unwrap()).collect())
}

pub fn robust(a: &RobustArgs) -> Result<RobustReport> {
    let vt = vtree_file(&a.vtree)?;
    let (c, p) = in_file(&a.csdd, read_csdd(&read(&a.csdd)?, &vt))?;
    let e = evidence(&vt, &a.evidence, &c)?;
    let (x_star, map_value) = match (&a.map, &a.psdd) {
        (Some(m), _) => (explanation(&vt, &e, m)?, None),
        (None, Some(path)) => {
            let (pc, pp) = in_file(path, read_psdd(&read(path)?, &vt))?;
            ensure!(pc == c, "the PSDD and the CSDD have different circuits");
            let m = map_psdd(&pc, &pp, &e)?;
            (m.assignment, Some(m.value))
        }
        (None, None) => {
            bail!("give the explanation with --map or a PSDD to take it from with --psdd")
        }
    };
    let r = robustness(&c, &p, &e, &x_star)?;
    Ok(RobustReport {
        evidence: vt.vars.format_pairs(e.observed()),
        x_star: vt
            .vars
            .format_pairs(x_star.iter().enumerate().map(|(i, &b)| (i as Var + 1, b))),
        map_value,
        v: Ratio(r.v),
        v_excluding: Ratio(r.v_excluding),
        label: label_name(r.label),
        certificate: CertificateJson::new(&r.certificate),
    })
}

pub fn experiment_cmd(a: &ExperimentArgs) -> Result<ExperimentReport> {
    ensure!(
        !a.d.is_empty() && !a.pf.is_empty() && a.seeds > 0,
        "the grid is empty"
    );
    ensure!(
        a.d.iter().all(|&d| d > 0),
        "training sizes must be positive"
    );
    ensure!(
        a.pf.iter().all(|p| (0.0..=1.0).contains(p)),
        "failure rates must lie in [0, 1]"
    );
    ensure!(a.ess.is_finite() && a.ess > 0.0, "--ess must be positive");
    ensure!(a.test_size > 0, "--test-size must be positive");
    let Scenario::SevenSegment = a.scenario;
    let circuit = experiment::circuit()?;
    let grid = Grid {
        train_sizes: a.d.clone(),
        failure_rates: a.pf.clone(),
        seeds: a.seeds,
        test_size: a.test_size,
        ess: a.ess,
        seed: a.seed,
    };
    let threads = thread_count();
    let rows = run_grid(&circuit, &grid, threads)?;
    if let Some(path) = &a.output {
        write(path, &write_csv(&rows)?)?;
    }
    Ok(ExperimentReport {
        scenario: "seven_segment",
        seed: a.seed,
        seeds: a.seeds,
        test_size: a.test_size,
        ess: a.ess,
        digit_prior: "uniform",
        threads,
        cells: summarize(&rows),
        output: a.output.as_ref().map(|p| p.display().to_string()),
    })
}
