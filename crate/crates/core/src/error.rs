use alloc::string::String;

use crate::circuit::{NodeId, Var, VtreeId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid vtree: {0}")]
    InvalidVtree(String),
    #[error("variable {0} is not in the vtree")]
    UnknownVariable(Var),
    #[error("unknown node {0:?}")]
    UnknownNode(NodeId),
    #[error("node {node:?} is not normalized for vtree node {vtree:?}: {reason}")]
    NotNormalized {
        node: NodeId,
        vtree: VtreeId,
        reason: String,
    },
    #[error("operands are normalized for different vtree nodes ({0:?} vs {1:?})")]
    VtreeMismatch(VtreeId, VtreeId),
    #[error("decision node {0:?} has no elements")]
    EmptyDecision(NodeId),
    #[error("primes of decision node {0:?} do not form a partition")]
    NotPartition(NodeId),
    #[error("assignment covers {got} variables, circuit needs {want}")]
    IncompleteAssignment { got: usize, want: usize },
    #[error("too many variables ({0}) for exhaustive enumeration")]
    TooManyVariables(usize),
    #[error("invalid credal set: {0}")]
    InvalidCredalSet(String),
    #[error("credal set has {0} states; vertex enumeration limit is 12")]
    TooManyStates(usize),
    #[error("ratio theta_{i}/theta_{j} is unbounded (lower bound of state {j} is zero)")]
    UnboundedRatio { i: usize, j: usize },
    #[error("invalid parameters for node {node:?}: {reason}")]
    InvalidParameters { node: NodeId, reason: String },
    #[error("missing parameters for node {0:?}")]
    MissingParameters(NodeId),
    #[error("dataset: {0}")]
    InvalidDataset(String),
    #[error("row {row} violates the circuit constraints")]
    InconsistentRow { row: usize },
    #[error("context of node {0:?} is empty; maximum likelihood is undefined")]
    EmptyContext(NodeId),
    #[error("invalid equivalent sample size {0}")]
    InvalidSampleSize(f64),
    #[error("evidence violates circuit constraints")]
    InconsistentEvidence,
    #[error("variable {0} is both the query target and observed")]
    TargetObserved(Var),
    #[error("{0} configurations exceed the enumeration cap {1}")]
    CapExceeded(u128, u128),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
