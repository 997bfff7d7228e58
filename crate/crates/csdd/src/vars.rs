//! Variable names and the `name=0|1` assignment syntax.

use csdd_core::circuit::{Evidence, Var};

use crate::io::{parse_err, IoError, IoResult};

/// Names of variables `1..=n`; variable `x` is `names[x - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s != "count"
        && !s
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '=' | ',' | '(' | ')' | '"'))
}

impl VarTable {
    /// `X1..Xn`.
    pub fn default_names(n: usize) -> VarTable {
        VarTable {
            names: (1..=n).map(|i| format!("X{i}")).collect(),
        }
    }

    pub fn new(names: Vec<String>) -> IoResult<VarTable> {
        for (i, a) in names.iter().enumerate() {
            if !valid_name(a) {
                return Err(parse_err(0, format!("invalid variable name `{a}`")));
            }
            if names[..i].contains(a) {
                return Err(parse_err(0, format!("duplicate variable name `{a}`")));
            }
        }
        Ok(VarTable { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: Var) -> &str {
        &self.names[x as usize - 1]
    }

    pub fn is_default(&self) -> bool {
        self.names
            .iter()
            .enumerate()
            .all(|(i, n)| *n == format!("X{}", i + 1))
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as Var + 1)
    }

    /// Parses `A=1,B=0`; an empty string is the empty assignment.
    pub fn parse_pairs(&self, text: &str) -> Result<Vec<(Var, bool)>, IoError> {
        let mut out: Vec<(Var, bool)> = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| parse_err(1, format!("expected name=0|1, got `{part}`")))?;
            let x = self
                .lookup(name.trim())
                .ok_or_else(|| parse_err(1, format!("unknown variable `{}`", name.trim())))?;
            let b = match value.trim() {
                "0" => false,
                "1" => true,
                v => {
                    return Err(parse_err(
                        1,
                        format!("value of `{}` must be 0 or 1, got `{v}`", name.trim()),
                    ))
                }
            };
            if out.iter().any(|&(y, _)| y == x) {
                return Err(parse_err(
                    1,
                    format!("variable `{}` assigned twice", name.trim()),
                ));
            }
            out.push((x, b));
        }
        Ok(out)
    }

    pub fn parse_evidence(&self, text: &str) -> IoResult<Evidence> {
        Ok(Evidence::from_pairs(self.len(), &self.parse_pairs(text)?)?)
    }

    pub fn format_pairs(&self, pairs: impl IntoIterator<Item = (Var, bool)>) -> String {
        pairs
            .into_iter()
            .map(|(x, b)| format!("{}={}", self.name(x), u8::from(b)))
            .collect::<Vec<_>>()
            .join(",")
    }
}
