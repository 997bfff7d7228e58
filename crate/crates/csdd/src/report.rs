//! JSON bodies printed by the command-line tool. One struct per
//! subcommand; the committed schemas under `schemas/` describe them.

use std::collections::BTreeSet;

use csdd_core::circuit::ConnectivityClass;
use csdd_core::infer::{ExactnessCertificate, ExactnessStatus, RobustnessLabel, TraceMode};
use serde::{Serialize, Serializer};

/// An `f64` that prints `"inf"` when infinite (JSON has no infinity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratio(pub f64);

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

pub fn connectivity_name(c: ConnectivityClass) -> &'static str {
    match c {
        ConnectivityClass::SinglyConnected => "singly_connected",
        ConnectivityClass::MultiplyConnected => "multiply_connected",
    }
}

pub fn label_name(l: RobustnessLabel) -> &'static str {
    match l {
        RobustnessLabel::Robust => "robust",
        RobustnessLabel::WeaklyRobust => "weakly_robust",
        RobustnessLabel::NotRobust => "not_robust",
    }
}

fn mode_name(m: TraceMode) -> &'static str {
    match m {
        TraceMode::Main => "main",
        TraceMode::Lower => "lower",
        TraceMode::Upper => "upper",
        TraceMode::Ratio => "ratio",
        TraceMode::Max => "max",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompileReport {
    pub variables: usize,
    pub nodes: usize,
    pub decision_nodes: usize,
    pub models: u128,
    pub satisfiable: bool,
    pub connectivity: &'static str,
    pub shared: Vec<u32>,
    pub sdd: String,
    pub vtree: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeCounts {
    pub node: u32,
    pub context: u64,
    pub states: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnReport {
    pub mode: &'static str,
    pub ess: Option<f64>,
    pub rows: usize,
    pub total: u64,
    pub dropped: u64,
    pub empty_contexts: Vec<u32>,
    pub nodes: Vec<NodeCounts>,
    pub output: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConflictJson {
    pub node: u32,
    pub vertices: Vec<Vec<f64>>,
    pub vertex_indices: Vec<Option<usize>>,
    pub modes: Vec<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub status: &'static str,
    pub conflicted: Vec<u32>,
    pub entry_points: Vec<u32>,
    pub conflicts: Vec<ConflictJson>,
}

impl CertificateJson {
    pub fn new(c: &ExactnessCertificate) -> CertificateJson {
        CertificateJson::merge(&[c])
    }

    /// One certificate for several bounds: exact iff all of them are.
    pub fn merge(cs: &[&ExactnessCertificate]) -> CertificateJson {
        let exact = cs.iter().all(|c| c.status == ExactnessStatus::Exact);
        let conflicted: BTreeSet<u32> = cs
            .iter()
            .flat_map(|c| c.conflicted_nodes())
            .map(|n| n.0)
            .collect();
        let entry: BTreeSet<u32> = cs
            .iter()
            .flat_map(|c| c.entry_points.iter())
            .map(|n| n.0)
            .collect();
        let conflicts = cs
            .iter()
            .flat_map(|c| c.conflicts.iter())
            .map(|k| ConflictJson {
                node: k.node.0,
                vertices: k.vertices.clone(),
                vertex_indices: k.indices.clone(),
                modes: k.modes.iter().map(|&m| mode_name(m)).collect(),
            })
            .collect();
        CertificateJson {
            status: if exact { "exact" } else { "possibly_outer" },
            conflicted: conflicted.into_iter().collect(),
            entry_points: entry.into_iter().collect(),
            conflicts,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundJson {
    pub value: f64,
    pub bracket: [f64; 2],
    pub iterations: u32,
    pub certificate: CertificateJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactJson {
    pub lower: f64,
    pub upper: f64,
    pub leaves: u64,
}

/// Fields not meaningful for a query are left out.
#[derive(Clone, Debug, Default, Serialize)]
pub struct QueryReport {
    pub model: &'static str,
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub evidence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tied: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsJson {
    pub lower: BoundJson,
    pub upper: BoundJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustReport {
    pub evidence: String,
    pub x_star: String,
    /// `P(x*, e)` under the PSDD when `x*` was its MAP completion.
    pub map_value: Option<f64>,
    #[serde(rename = "V")]
    pub v: Ratio,
    #[serde(rename = "V_excluding")]
    pub v_excluding: Ratio,
    pub label: &'static str,
    pub certificate: CertificateJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub d: usize,
    pub pf: f64,
    pub runs: usize,
    pub accuracy: f64,
    pub determinacy: f64,
    pub det_acc: Option<f64>,
    pub indet_acc: Option<f64>,
    pub u80: f64,
    pub joint_accuracy: f64,
    pub joint_determinacy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub scenario: &'static str,
    pub seed: u64,
    pub seeds: usize,
    pub test_size: usize,
    pub ess: f64,
    pub digit_prior: &'static str,
    pub threads: usize,
    pub cells: Vec<CellSummary>,
    pub output: Option<String>,
}
