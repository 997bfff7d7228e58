use csdd_core::circuit::Formula;

use super::{parse_err, IoError, IoResult};
use crate::vars::VarTable;

#[derive(Debug, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut start = None;
        for (j, ch) in line.char_indices() {
            let delim = ch.is_whitespace() || ch == '(' || ch == ')';
            if delim {
                if let Some(s) = start.take() {
                    out.push((i + 1, Tok::Atom(&line[s..j])));
                }
                if ch == '(' {
                    out.push((i + 1, Tok::Open));
                } else if ch == ')' {
                    out.push((i + 1, Tok::Close));
                }
            } else if start.is_none() {
                start = Some(j);
            }
        }
        if let Some(s) = start {
            out.push((i + 1, Tok::Atom(&line[s..])));
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    names: Vec<String>,
    fixed: bool,
}

impl<'a> Parser<'a> {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.0)
    }

    fn var(&mut self, name: &str, line: usize) -> IoResult<Formula> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(Formula::Var(i as u32 + 1));
        }
        if self.fixed {
            return Err(parse_err(line, format!("unknown variable `{name}`")));
        }
        self.names.push(name.to_string());
        Ok(Formula::Var(self.names.len() as u32))
    }

    fn expr(&mut self) -> IoResult<Formula> {
        let line = self.line();
        let Some((_, tok)) = self.toks.get(self.pos) else {
            return Err(parse_err(line, "unexpected end of formula"));
        };
        self.pos += 1;
        match tok {
            Tok::Close => Err(parse_err(line, "unexpected `)`")),
            Tok::Atom("true") => Ok(Formula::Const(true)),
            Tok::Atom("false") => Ok(Formula::Const(false)),
            Tok::Atom(name) => {
                let name = name.to_string();
                self.var(&name, line)
            }
            Tok::Open => {
                let op = match self.toks.get(self.pos) {
                    Some((_, Tok::Atom(op))) => op.to_string(),
                    _ => return Err(parse_err(line, "expected an operator after `(`")),
                };
                self.pos += 1;
                let mut args = Vec::new();
                loop {
                    match self.toks.get(self.pos) {
                        Some((_, Tok::Close)) => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => args.push(self.expr()?),
                        None => return Err(parse_err(self.line(), format!("unclosed `({op}`"))),
                    }
                }
                let arity = |n: usize| {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(parse_err(
                            line,
                            format!("`{op}` takes {n} arguments, got {}", args.len()),
                        ))
                    }
                };
                match op.as_str() {
                    "and" => Ok(Formula::And(args)),
                    "or" => Ok(Formula::Or(args)),
                    "not" => {
                        arity(1)?;
                        Ok(Formula::not(args.pop().unwrap()))
                    }
                    "implies" | "iff" => {
                        arity(2)?;
                        let b = args.pop().unwrap();
                        let a = args.pop().unwrap();
                        Ok(if op == "iff" {
                            Formula::iff(a, b)
                        } else {
                            Formula::implies(a, b)
                        })
                    }
                    _ => Err(parse_err(line, format!("unknown operator `{op}`"))),
                }
            }
        }
    }
}

/// Parses `(and ..) (or ..) (not f) (implies a b) (iff a b) true false`
/// and variable names. With `vars` unknown names are errors; without it
/// variables are numbered in order of first appearance. Text after `#` is
/// a comment.
pub fn parse_formula(text: &str, vars: Option<&VarTable>) -> IoResult<(Formula, VarTable)> {
    let mut p = Parser {
        toks: lex(text),
        pos: 0,
        names: vars.map_or_else(Vec::new, |v| v.names().to_vec()),
        fixed: vars.is_some(),
    };
    let f = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(parse_err(p.line(), "trailing input after the formula"));
    }
    let table = match vars {
        Some(v) => v.clone(),
        None => VarTable::new(p.names).map_err(|e| match e {
            IoError::Parse { message, .. } => parse_err(1, message),
            e => e,
        })?,
    };
    Ok((f, table))
}

pub fn write_formula(f: &Formula, vars: &VarTable) -> String {
    let list = |op: &str, xs: &[&Formula]| {
        let mut s = format!("({op}");
        for x in xs {
            s.push(' ');
            s.push_str(&write_formula(x, vars));
        }
        s.push(')');
        s
    };
    match f {
        Formula::Const(b) => b.to_string(),
        Formula::Var(x) => vars.name(*x).to_string(),
        Formula::Not(a) => list("not", &[a]),
        Formula::And(xs) => list("and", &xs.iter().collect::<Vec<_>>()),
        Formula::Or(xs) => list("or", &xs.iter().collect::<Vec<_>>()),
        Formula::Implies(a, b) => list("implies", &[a, b]),
        Formula::Iff(a, b) => list("iff", &[a, b]),
    }
}
