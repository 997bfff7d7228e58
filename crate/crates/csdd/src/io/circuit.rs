use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use csdd_core::circuit::{Builder, Circuit, NodeId, NodeKind, Var, VtreeId};
use csdd_core::credal::IntervalCredalSet;
use csdd_core::error::Error as CoreError;
use csdd_core::params::{validate_csdd, validate_psdd, CsddParams, PsddParams};

use super::{content_lines, fmt_f64, num, parse_err, IoError, IoResult, VtreeFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Sdd,
    Psdd,
    Csdd,
}

impl ModelKind {
    fn magic(self) -> &'static str {
        match self {
            ModelKind::Sdd => "sdd",
            ModelKind::Psdd => "psdd",
            ModelKind::Csdd => "csdd",
        }
    }

    /// Numbers attached to each parameter.
    fn width(self) -> usize {
        match self {
            ModelKind::Sdd => 0,
            ModelKind::Psdd => 1,
            ModelKind::Csdd => 2,
        }
    }
}

/// Kind of circuit file, from its header.
pub fn sniff_model(text: &str) -> IoResult<ModelKind> {
    let (ln, toks) = content_lines(text)
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    match toks.first().copied() {
        Some("sdd") => Ok(ModelKind::Sdd),
        Some("psdd") => Ok(ModelKind::Psdd),
        Some("csdd") => Ok(ModelKind::Csdd),
        _ => Err(parse_err(ln, "expected an `sdd`, `psdd` or `csdd` header")),
    }
}

enum Raw {
    False,
    /// Vtree and variable are absent in plain SDD files.
    True(Option<(VtreeId, Var)>, Vec<f64>),
    Literal(VtreeId, Var, bool),
    Decision(VtreeId, Vec<(u64, u64, Vec<f64>)>),
}

struct Line {
    ln: usize,
    id: u64,
    raw: Raw,
}

/// Where a file node ended up. Constants without a vtree get one copy per
/// vtree node they are used at.
enum Placed {
    One(NodeId),
    PerVtree(BTreeMap<VtreeId, NodeId>),
}

struct Parsed {
    circuit: Circuit,
    params: Vec<(NodeId, Vec<f64>)>,
    line_of: Vec<usize>,
}

fn vtree_ref(ln: usize, vt: &VtreeFile, tok: &str) -> IoResult<VtreeId> {
    let id: u64 = num(ln, tok, "vtree id")?;
    vt.resolve(id)
        .ok_or_else(|| parse_err(ln, format!("unknown vtree node {id}")))
}

fn floats(ln: usize, toks: &[&str]) -> IoResult<Vec<f64>> {
    toks.iter()
        .map(|t| {
            let x: f64 = num(ln, t, "parameter")?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(parse_err(ln, format!("parameter `{t}` is not finite")))
            }
        })
        .collect()
}

fn lex(kind: ModelKind, vt: &VtreeFile, ln: usize, toks: &[&str]) -> IoResult<Line> {
    let w = kind.width();
    let bad = || parse_err(ln, format!("malformed node line `{}`", toks.join(" ")));
    let id = |t: &str| num::<u64>(ln, t, "node id");
    let raw_line = match (toks[0], toks.len()) {
        ("F", 2) => Line {
            ln,
            id: id(toks[1])?,
            raw: Raw::False,
        },
        ("T", 2) if kind == ModelKind::Sdd => Line {
            ln,
            id: id(toks[1])?,
            raw: Raw::True(None, Vec::new()),
        },
        ("T", n) if kind != ModelKind::Sdd && n == 4 + w => {
            let v = vtree_ref(ln, vt, toks[2])?;
            let x: Var = num(ln, toks[3], "variable")?;
            Line {
                ln,
                id: id(toks[1])?,
                raw: Raw::True(Some((v, x)), floats(ln, &toks[4..])?),
            }
        }
        ("L", 4) => {
            let v = vtree_ref(ln, vt, toks[2])?;
            let lit: i64 = num(ln, toks[3], "literal")?;
            if lit == 0 {
                return Err(parse_err(ln, "literal 0"));
            }
            let x = Var::try_from(lit.unsigned_abs())
                .map_err(|_| parse_err(ln, "literal out of range"))?;
            Line {
                ln,
                id: id(toks[1])?,
                raw: Raw::Literal(v, x, lit > 0),
            }
        }
        ("D", n) if n >= 4 => {
            let v = vtree_ref(ln, vt, toks[2])?;
            let k: usize = num(ln, toks[3], "element count")?;
            if k == 0 {
                return Err(parse_err(ln, "decision node with no elements"));
            }
            if n != 4 + k * (2 + w) {
                return Err(parse_err(
                    ln,
                    format!("expected {k} elements of {} fields", 2 + w),
                ));
            }
            let mut el = Vec::with_capacity(k);
            for chunk in toks[4..].chunks(2 + w) {
                el.push((id(chunk[0])?, id(chunk[1])?, floats(ln, &chunk[2..])?));
            }
            Line {
                ln,
                id: id(toks[1])?,
                raw: Raw::Decision(v, el),
            }
        }
        _ => return Err(bad()),
    };
    Ok(raw_line)
}

fn located(line: usize) -> impl Fn(CoreError) -> IoError {
    move |e| parse_err(line, e.to_string())
}

fn parse(text: &str, vt: &VtreeFile, kind: ModelKind) -> IoResult<Parsed> {
    let vtree = &vt.vtree;
    let mut lines_iter = content_lines(text);
    let (hl, header) = lines_iter
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let count: usize = match header[..] {
        [m, n] if m == kind.magic() => num(hl, n, "node count")?,
        _ => {
            return Err(parse_err(
                hl,
                format!("expected `{} <count>`", kind.magic()),
            ))
        }
    };
    let lines: Vec<Line> = lines_iter
        .map(|(ln, toks)| lex(kind, vt, ln, &toks))
        .collect::<IoResult<_>>()?;
    let last = lines.last().map_or(hl, |l| l.ln);
    if lines.len() != count {
        return Err(parse_err(
            last,
            format!("header declares {count} nodes, found {}", lines.len()),
        ));
    }
    let root_line = lines.last().ok_or_else(|| parse_err(hl, "no nodes"))?;

    // Which vtree node each position-less constant is used at.
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut uses: BTreeMap<u64, BTreeSet<VtreeId>> = BTreeMap::new();
    for l in &lines {
        if let Raw::Decision(v, el) = &l.raw {
            let (left, right) = vtree
                .children(*v)
                .ok_or_else(|| parse_err(l.ln, "decision node on a vtree leaf"))?;
            for (p, s, _) in el {
                for (c, at) in [(p, left), (s, right)] {
                    if !seen.contains(c) {
                        return Err(parse_err(
                            l.ln,
                            format!("node {c} is used before it is defined"),
                        ));
                    }
                    uses.entry(*c).or_default().insert(at);
                }
            }
        }
        if !seen.insert(l.id) {
            return Err(parse_err(l.ln, format!("duplicate node id {}", l.id)));
        }
    }
    uses.entry(root_line.id).or_default().insert(vtree.root());

    let mut b = Builder::new(vtree.clone());
    let mut placed: BTreeMap<u64, Placed> = BTreeMap::new();
    let mut line_of: Vec<usize> = Vec::new();
    let mut params: Vec<(NodeId, Vec<f64>)> = Vec::new();
    let resolve = |placed: &BTreeMap<u64, Placed>, c: u64, at: VtreeId| match &placed[&c] {
        Placed::One(n) => *n,
        Placed::PerVtree(m) => m[&at],
    };
    for l in &lines {
        let err = located(l.ln);
        let p = match &l.raw {
            Raw::False => {
                let mut m = BTreeMap::new();
                for &v in &uses[&l.id] {
                    m.insert(v, b.add_false(v).map_err(&err)?);
                }
                Placed::PerVtree(m)
            }
            Raw::True(None, _) => {
                let mut m = BTreeMap::new();
                for &v in &uses[&l.id] {
                    let n = match vtree.leaf_var(v) {
                        Some(x) => b.add_true(x).map_err(&err)?,
                        None => b.true_at(v),
                    };
                    m.insert(v, n);
                }
                Placed::PerVtree(m)
            }
            Raw::True(Some((v, x)), theta) => {
                if vtree.leaf_var(*v) != Some(*x) {
                    return Err(parse_err(
                        l.ln,
                        format!(
                            "vtree node {} is not the leaf of variable {x}",
                            vt.file_id(*v)
                        ),
                    ));
                }
                let n = b.add_true(*x).map_err(&err)?;
                params.push((n, theta.clone()));
                Placed::One(n)
            }
            Raw::Literal(v, x, pos) => {
                if vtree.leaf_var(*v) != Some(*x) {
                    return Err(parse_err(
                        l.ln,
                        format!(
                            "vtree node {} is not the leaf of variable {x}",
                            vt.file_id(*v)
                        ),
                    ));
                }
                Placed::One(b.add_literal(*x, *pos).map_err(&err)?)
            }
            Raw::Decision(v, el) => {
                let (left, right) = vtree.children(*v).unwrap();
                let pairs: Vec<(NodeId, NodeId)> = el
                    .iter()
                    .map(|(p, s, _)| (resolve(&placed, *p, left), resolve(&placed, *s, right)))
                    .collect();
                let n = b.add_decision(*v, &pairs).map_err(&err)?;
                if kind != ModelKind::Sdd {
                    params.push((
                        n,
                        el.iter().flat_map(|(_, _, t)| t.iter().copied()).collect(),
                    ));
                }
                Placed::One(n)
            }
        };
        line_of.resize(b.len(), l.ln);
        placed.insert(l.id, p);
    }
    let root = resolve(&placed, root_line.id, vtree.root());
    let total = b.len();
    let circuit = b.finish(root).map_err(located(last))?;
    if circuit.len() != total {
        return Err(parse_err(
            last,
            format!(
                "{} nodes are not reachable from the root (the last node line)",
                total - circuit.len()
            ),
        ));
    }
    circuit.check_partitions(12, 512).map_err(|e| match e {
        CoreError::NotPartition(n) => parse_err(line_of[n.index()], e.to_string()),
        e => parse_err(last, e.to_string()),
    })?;
    Ok(Parsed {
        circuit,
        params,
        line_of,
    })
}

fn param_error(line_of: &[usize], e: CoreError) -> IoError {
    let line = match &e {
        CoreError::InvalidParameters { node, .. } | CoreError::MissingParameters(node) => {
            line_of[node.index()]
        }
        _ => line_of.last().copied().unwrap_or(1),
    };
    parse_err(line, e.to_string())
}

/// Elements with a `⊥` sub must carry exactly zero.
fn check_zeros(p: &Parsed, n: NodeId, values: &[f64], per: usize) -> IoResult<()> {
    for (i, e) in p.circuit.node(n).elements().iter().enumerate() {
        if p.circuit.node(e.sub).is_false()
            && values[i * per..(i + 1) * per].iter().any(|&x| x != 0.0)
        {
            return Err(parse_err(
                p.line_of[n.index()],
                format!(
                    "element {} has a ⊥ sub and must have zero parameters",
                    i + 1
                ),
            ));
        }
    }
    Ok(())
}

pub fn read_sdd(text: &str, vt: &VtreeFile) -> IoResult<Circuit> {
    Ok(parse(text, vt, ModelKind::Sdd)?.circuit)
}

pub fn read_psdd(text: &str, vt: &VtreeFile) -> IoResult<(Circuit, PsddParams)> {
    let parsed = parse(text, vt, ModelKind::Psdd)?;
    let mut table = PsddParams::new(parsed.circuit.len());
    for (n, theta) in &parsed.params {
        let ln = parsed.line_of[n.index()];
        check_zeros(&parsed, *n, theta, 1)?;
        let theta = if parsed.circuit.node(*n).is_true() {
            if !(0.0..=1.0).contains(&theta[0]) {
                return Err(parse_err(ln, format!("θ = {} is outside [0, 1]", theta[0])));
            }
            vec![theta[0], 1.0 - theta[0]]
        } else {
            theta.clone()
        };
        table.set(*n, theta);
    }
    validate_psdd(&parsed.circuit, &table).map_err(|e| param_error(&parsed.line_of, e))?;
    Ok((parsed.circuit, table))
}

pub fn read_csdd(text: &str, vt: &VtreeFile) -> IoResult<(Circuit, CsddParams)> {
    let parsed = parse(text, vt, ModelKind::Csdd)?;
    let mut table = CsddParams::new(parsed.circuit.len());
    for (n, bounds) in &parsed.params {
        let ln = parsed.line_of[n.index()];
        check_zeros(&parsed, *n, bounds, 2)?;
        let (lo, hi): (Vec<f64>, Vec<f64>) = bounds.chunks(2).map(|c| (c[0], c[1])).unzip();
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] > hi[i]) {
            return Err(parse_err(
                ln,
                format!(
                    "interval {} has lower {} above upper {}",
                    i + 1,
                    lo[i],
                    hi[i]
                ),
            ));
        }
        let cs = if parsed.circuit.node(*n).is_true() {
            IntervalCredalSet::binary(lo[0], hi[0])
        } else {
            IntervalCredalSet::new(lo, hi)
        };
        table.set(*n, cs.map_err(located(ln))?);
    }
    validate_csdd(&parsed.circuit, &table).map_err(|e| param_error(&parsed.line_of, e))?;
    Ok((parsed.circuit, table))
}

fn write_with(
    c: &Circuit,
    vt: &VtreeFile,
    kind: ModelKind,
    mut param: impl FnMut(NodeId, usize, &mut String),
) -> String {
    let mut out = String::new();
    writeln!(out, "c children precede parents; the last node is the root").unwrap();
    writeln!(out, "{} {}", kind.magic(), c.len()).unwrap();
    for id in c.ids() {
        let node = c.node(id);
        let v = vt.file_id(node.vtree);
        match &node.kind {
            NodeKind::False => writeln!(out, "F {}", id.0).unwrap(),
            NodeKind::True if kind == ModelKind::Sdd => writeln!(out, "T {}", id.0).unwrap(),
            NodeKind::True => {
                let x = c.vtree().leaf_var(node.vtree).unwrap();
                write!(out, "T {} {v} {x}", id.0).unwrap();
                param(id, 0, &mut out);
                out.push('\n');
            }
            NodeKind::Literal { var, positive } => {
                let lit = if *positive {
                    i64::from(*var)
                } else {
                    -i64::from(*var)
                };
                writeln!(out, "L {} {v} {lit}", id.0).unwrap();
            }
            NodeKind::Decision(el) => {
                write!(out, "D {} {v} {}", id.0, el.len()).unwrap();
                for (i, e) in el.iter().enumerate() {
                    write!(out, " {} {}", e.prime.0, e.sub.0).unwrap();
                    param(id, i, &mut out);
                }
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_sdd(c: &Circuit, vt: &VtreeFile) -> String {
    write_with(c, vt, ModelKind::Sdd, |_, _, _| {})
}

pub fn write_psdd(c: &Circuit, vt: &VtreeFile, p: &PsddParams) -> String {
    write_with(c, vt, ModelKind::Psdd, |n, i, out| {
        let theta = p.get(n).expect("complete parameters");
        write!(out, " {}", fmt_f64(theta[i])).unwrap();
    })
}

pub fn write_csdd(c: &Circuit, vt: &VtreeFile, p: &CsddParams) -> String {
    write_with(c, vt, ModelKind::Csdd, |n, i, out| {
        let cs = p.get(n).expect("complete parameters");
        write!(
            out,
            " {} {}",
            fmt_f64(cs.lower()[i]),
            fmt_f64(cs.upper()[i])
        )
        .unwrap();
    })
}
