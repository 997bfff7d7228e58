use std::collections::BTreeMap;
use std::fmt::Write;

use csdd_core::circuit::{Var, Vtree, VtreeId, VtreeNode};

use super::{content_lines, num, parse_err, IoResult};
pub use crate::vars::VarTable;

/// A vtree together with its variable names and the ids its file used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VtreeFile {
    pub vtree: Vtree,
    pub vars: VarTable,
    file_ids: Vec<u64>,
}

impl VtreeFile {
    /// File ids equal to internal ids.
    pub fn new(vtree: Vtree, vars: VarTable) -> VtreeFile {
        assert_eq!(vtree.num_vars(), vars.len(), "one name per variable");
        let file_ids = (0..vtree.len() as u64).collect();
        VtreeFile {
            vtree,
            vars,
            file_ids,
        }
    }

    pub fn with_default_names(vtree: Vtree) -> VtreeFile {
        let vars = VarTable::default_names(vtree.num_vars());
        VtreeFile::new(vtree, vars)
    }

    pub fn file_id(&self, v: VtreeId) -> u64 {
        self.file_ids[v.index()]
    }

    pub fn resolve(&self, id: u64) -> Option<VtreeId> {
        self.file_ids
            .iter()
            .position(|&f| f == id)
            .map(|i| VtreeId(i as u32))
    }
}

/// `vtree <count>`, then `L <id> <var>` and `I <id> <left> <right>` lines,
/// children first. Optional `c var <var> <name>` comments name variables.
pub fn read_vtree(text: &str) -> IoResult<VtreeFile> {
    let mut names: BTreeMap<Var, String> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if let ["c", "var", x, name] = toks[..] {
            let x: Var = num(i + 1, x, "variable")?;
            if names.insert(x, name.to_string()).is_some() {
                return Err(parse_err(i + 1, format!("variable {x} named twice")));
            }
        }
    }
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty vtree file"))?;
    let count: usize = match header[..] {
        ["vtree", n] => num(hl, n, "node count")?,
        _ => return Err(parse_err(hl, "expected `vtree <count>`")),
    };
    let mut nodes = Vec::new();
    let mut ids: BTreeMap<u64, VtreeId> = BTreeMap::new();
    let mut file_ids = Vec::new();
    let mut last = hl;
    for (ln, toks) in lines {
        last = ln;
        let (id, node) = match toks[..] {
            ["L", id, x] => (
                num::<u64>(ln, id, "id")?,
                VtreeNode::Leaf(num(ln, x, "variable")?),
            ),
            ["I", id, l, r] => {
                let child = |t: &str| -> IoResult<VtreeId> {
                    let c: u64 = num(ln, t, "child id")?;
                    ids.get(&c)
                        .copied()
                        .ok_or_else(|| parse_err(ln, format!("child {c} is not defined above")))
                };
                let (left, right) = (child(l)?, child(r)?);
                (
                    num::<u64>(ln, id, "id")?,
                    VtreeNode::Internal { left, right },
                )
            }
            _ => {
                return Err(parse_err(
                    ln,
                    format!("malformed vtree line `{}`", toks.join(" ")),
                ))
            }
        };
        if ids.insert(id, VtreeId(nodes.len() as u32)).is_some() {
            return Err(parse_err(ln, format!("duplicate id {id}")));
        }
        file_ids.push(id);
        nodes.push(node);
    }
    if nodes.len() != count {
        return Err(parse_err(
            last,
            format!("header declares {count} nodes, found {}", nodes.len()),
        ));
    }
    if nodes.is_empty() {
        return Err(parse_err(hl, "vtree has no nodes"));
    }
    let root = VtreeId(nodes.len() as u32 - 1);
    let vtree = Vtree::new(nodes, root).map_err(|e| parse_err(last, e.to_string()))?;
    let n = vtree.num_vars();
    if let Some((&x, _)) = names.iter().find(|(&x, _)| x == 0 || x as usize > n) {
        return Err(parse_err(1, format!("name given for unknown variable {x}")));
    }
    let vars = if names.is_empty() {
        VarTable::default_names(n)
    } else {
        let all = (1..=n as Var)
            .map(|x| names.get(&x).cloned().unwrap_or_else(|| format!("X{x}")))
            .collect();
        VarTable::new(all).map_err(|e| match e {
            super::IoError::Parse { message, .. } => parse_err(1, message),
            e => e,
        })?
    };
    Ok(VtreeFile {
        vtree,
        vars,
        file_ids,
    })
}

pub fn write_vtree(v: &VtreeFile) -> String {
    let mut out = String::new();
    if !v.vars.is_default() {
        for (i, name) in v.vars.names().iter().enumerate() {
            writeln!(out, "c var {} {name}", i + 1).unwrap();
        }
    }
    writeln!(out, "vtree {}", v.vtree.len()).unwrap();
    for (i, node) in v.vtree.nodes().iter().enumerate() {
        match node {
            VtreeNode::Leaf(x) => writeln!(out, "L {} {x}", v.file_ids[i]).unwrap(),
            VtreeNode::Internal { left, right } => writeln!(
                out,
                "I {} {} {}",
                v.file_ids[i],
                v.file_id(*left),
                v.file_id(*right)
            )
            .unwrap(),
        }
    }
    out
}
