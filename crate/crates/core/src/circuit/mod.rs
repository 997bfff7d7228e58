//! Vtrees, normalized SDDs, and their construction.

mod builder;
mod evidence;
mod formula;
mod sdd;
mod vtree;

pub use builder::{Builder, Op};
pub use evidence::Evidence;
pub use formula::{compile_formula, compile_into, Formula};
pub use sdd::{Circuit, ConnectivityClass, Element, MultiplicityReport, NodeId, NodeKind, SddNode};
pub use vtree::{Shape, Var, Vtree, VtreeId, VtreeNode};
