use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{Builder, Circuit, NodeId, Var, Vtree};
use crate::error::{Error, Result};

/// Propositional formula over variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Var(Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn lit(x: Var, positive: bool) -> Formula {
        if positive {
            Formula::Var(x)
        } else {
            Formula::not(Formula::Var(x))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Conjunction of literals, one per `(var, polarity)`.
    pub fn term(lits: &[(Var, bool)]) -> Formula {
        Formula::And(lits.iter().map(|&(x, p)| Formula::lit(x, p)).collect())
    }

    pub fn eval(&self, a: &[bool]) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(x) => a[*x as usize - 1],
            Formula::Not(f) => !f.eval(a),
            Formula::And(fs) => fs.iter().all(|f| f.eval(a)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(a)),
            Formula::Implies(p, q) => !p.eval(a) || q.eval(a),
            Formula::Iff(p, q) => p.eval(a) == q.eval(a),
        }
    }

    pub fn max_var(&self) -> Var {
        match self {
            Formula::Const(_) => 0,
            Formula::Var(x) => *x,
            Formula::Not(f) => f.max_var(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::max_var).max().unwrap_or(0)
            }
            Formula::Implies(p, q) | Formula::Iff(p, q) => p.max_var().max(q.max_var()),
        }
    }
}

/// Compiles `f` bottom-up with apply into a circuit normalized for `vtree`.
pub fn compile_formula(f: &Formula, vtree: &Vtree) -> Result<Circuit> {
    let mut b = Builder::new(vtree.clone());
    let root = compile_into(&mut b, f)?;
    b.finish(root)
}

/// Compiles `f` into an existing builder, normalized for the vtree root.
pub fn compile_into(b: &mut Builder, f: &Formula) -> Result<NodeId> {
    let v = b.vtree().root();
    match f {
        Formula::Const(true) => Ok(b.true_at(v)),
        Formula::Const(false) => Ok(b.false_at(v)),
        Formula::Var(x) => {
            if !b.vtree().has_var(*x) {
                return Err(Error::UnknownVariable(*x));
            }
            b.literal_at(v, *x, true)
        }
        Formula::Not(g) => {
            let n = compile_into(b, g)?;
            b.negate(n)
        }
        Formula::And(fs) => {
            let mut acc = b.true_at(v);
            for g in fs {
                let n = compile_into(b, g)?;
                acc = b.conjoin(acc, n)?;
            }
            Ok(acc)
        }
        Formula::Or(fs) => {
            let mut acc = b.false_at(v);
            for g in fs {
                let n = compile_into(b, g)?;
                acc = b.disjoin(acc, n)?;
            }
            Ok(acc)
        }
        Formula::Implies(p, q) => {
            let np = compile_into(b, p)?;
            let np = b.negate(np)?;
            let nq = compile_into(b, q)?;
            b.disjoin(np, nq)
        }
        Formula::Iff(p, q) => {
            let np = compile_into(b, p)?;
            let nq = compile_into(b, q)?;
            let both = b.conjoin(np, nq)?;
            let notp = b.negate(np)?;
            let notq = b.negate(nq)?;
            let neither = b.conjoin(notp, notq)?;
            b.disjoin(both, neither)
        }
    }
}
