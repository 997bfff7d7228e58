use alloc::vec;
use alloc::vec::Vec;

use super::Var;
use crate::error::{Error, Result};

/// Partial assignment over the variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Evidence {
    values: Vec<Option<bool>>,
}

impl Evidence {
    pub fn empty(num_vars: usize) -> Evidence {
        Evidence {
            values: vec![None; num_vars],
        }
    }

    pub fn from_pairs(num_vars: usize, pairs: &[(Var, bool)]) -> Result<Evidence> {
        let mut e = Evidence::empty(num_vars);
        for &(x, b) in pairs {
            e.set(x, b)?;
        }
        Ok(e)
    }

    /// Evidence fixing every variable.
    pub fn total(assignment: &[bool]) -> Evidence {
        Evidence {
            values: assignment.iter().map(|&b| Some(b)).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, x: Var) -> Option<bool> {
        if x == 0 {
            return None;
        }
        self.values.get(x as usize - 1).copied().flatten()
    }

    pub fn set(&mut self, x: Var, b: bool) -> Result<()> {
        if x == 0 || x as usize > self.values.len() {
            return Err(Error::UnknownVariable(x));
        }
        self.values[x as usize - 1] = Some(b);
        Ok(())
    }

    pub fn unset(&mut self, x: Var) {
        if x >= 1 && (x as usize) <= self.values.len() {
            self.values[x as usize - 1] = None;
        }
    }

    pub fn with(&self, x: Var, b: bool) -> Result<Evidence> {
        let mut e = self.clone();
        e.set(x, b)?;
        Ok(e)
    }

    pub fn is_observed(&self, x: Var) -> bool {
        self.get(x).is_some()
    }

    /// Observed variables in increasing order.
    pub fn observed(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| (i as Var + 1, b)))
    }

    pub fn unobserved(&self) -> impl Iterator<Item = Var> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| i as Var + 1)
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    /// Whether a complete assignment agrees with every observation.
    pub fn agrees(&self, assignment: &[bool]) -> bool {
        self.values
            .iter()
            .zip(assignment)
            .all(|(v, &a)| v.is_none_or(|b| b == a))
    }
}
