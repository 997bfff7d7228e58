use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::sdd::{check_node, node_is_false};
use super::{Circuit, Element, NodeId, NodeKind, SddNode, Var, Vtree, VtreeId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Op {
    And,
    Or,
}

/// Single-writer construction phase of a circuit.
///
/// The `add_*` methods append fresh nodes exactly as given, which is how
/// hand-built circuits keep unshared terminals. The `*_at`, `apply` and
/// `negate` methods go through a unique table and return canonical
/// (compressed) nodes.
#[derive(Clone, Debug)]
pub struct Builder {
    vtree: Vtree,
    nodes: Vec<SddNode>,
    falsy: Vec<bool>,
    unique: BTreeMap<SddNode, NodeId>,
    apply_cache: BTreeMap<(Op, NodeId, NodeId), NodeId>,
    negate_cache: BTreeMap<NodeId, NodeId>,
}

impl Builder {
    pub fn new(vtree: Vtree) -> Builder {
        Builder {
            vtree,
            nodes: Vec::new(),
            falsy: Vec::new(),
            unique: BTreeMap::new(),
            apply_cache: BTreeMap::new(),
            negate_cache: BTreeMap::new(),
        }
    }

    pub fn vtree(&self) -> &Vtree {
        &self.vtree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &SddNode {
        &self.nodes[id.index()]
    }

    pub fn is_false(&self, id: NodeId) -> bool {
        self.falsy[id.index()]
    }

    fn push(&mut self, node: SddNode) -> Result<NodeId> {
        let id = NodeId(self.nodes.len() as u32);
        check_node(&self.vtree, &self.nodes, &self.falsy, id, &node)?;
        self.falsy.push(node_is_false(&self.falsy, &node));
        self.nodes.push(node);
        Ok(id)
    }

    pub fn add_false(&mut self, v: VtreeId) -> Result<NodeId> {
        self.push(SddNode {
            vtree: v,
            kind: NodeKind::False,
        })
    }

    pub fn add_true(&mut self, x: Var) -> Result<NodeId> {
        let v = self.vtree.leaf_of(x)?;
        self.push(SddNode {
            vtree: v,
            kind: NodeKind::True,
        })
    }

    pub fn add_literal(&mut self, x: Var, positive: bool) -> Result<NodeId> {
        let v = self.vtree.leaf_of(x)?;
        self.push(SddNode {
            vtree: v,
            kind: NodeKind::Literal { var: x, positive },
        })
    }

    /// Appends an uncompressed decision node with the given elements.
    pub fn add_decision(&mut self, v: VtreeId, elements: &[(NodeId, NodeId)]) -> Result<NodeId> {
        let el = elements.iter().map(|&(p, s)| Element::new(p, s)).collect();
        self.push(SddNode {
            vtree: v,
            kind: NodeKind::Decision(el),
        })
    }

    fn intern(&mut self, node: SddNode) -> Result<NodeId> {
        if let Some(&id) = self.unique.get(&node) {
            return Ok(id);
        }
        let id = self.push(node.clone())?;
        self.unique.insert(node, id);
        Ok(id)
    }

    pub fn false_at(&mut self, v: VtreeId) -> NodeId {
        self.intern(SddNode {
            vtree: v,
            kind: NodeKind::False,
        })
        .expect("⊥ is valid anywhere")
    }

    pub fn true_at(&mut self, v: VtreeId) -> NodeId {
        match self.vtree.children(v) {
            None => self
                .intern(SddNode {
                    vtree: v,
                    kind: NodeKind::True,
                })
                .expect("⊤ at a leaf"),
            Some((l, r)) => {
                let p = self.true_at(l);
                let s = self.true_at(r);
                self.intern(SddNode {
                    vtree: v,
                    kind: NodeKind::Decision(alloc::vec![Element::new(p, s)]),
                })
                .expect("well-formed ⊤ decision")
            }
        }
    }

    /// Canonical node for literal `x`/`¬x` normalized for `v`.
    pub fn literal_at(&mut self, v: VtreeId, x: Var, positive: bool) -> Result<NodeId> {
        if !self.vtree.contains(v, x) {
            return Err(Error::UnknownVariable(x));
        }
        match self.vtree.children(v) {
            None => self.intern(SddNode {
                vtree: v,
                kind: NodeKind::Literal { var: x, positive },
            }),
            Some((l, r)) => {
                if self.vtree.contains(l, x) {
                    let yes = self.literal_at(l, x, positive)?;
                    let no = self.literal_at(l, x, !positive)?;
                    let t = self.true_at(r);
                    let f = self.false_at(r);
                    self.decision_at(v, &[(yes, t), (no, f)])
                } else {
                    let t = self.true_at(l);
                    let s = self.literal_at(r, x, positive)?;
                    self.decision_at(v, &[(t, s)])
                }
            }
        }
    }

    /// Canonical decision node: drops `⊥` primes, merges elements with equal
    /// subs, and returns `⊥` when every sub is `⊥`.
    pub fn decision_at(&mut self, v: VtreeId, elements: &[(NodeId, NodeId)]) -> Result<NodeId> {
        let (l, _) = self.vtree.children(v).ok_or_else(|| Error::NotNormalized {
            node: NodeId(self.nodes.len() as u32),
            vtree: v,
            reason: "decision node on a vtree leaf".into(),
        })?;
        let mut by_sub: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut order = Vec::new();
        for &(p, s) in elements {
            if self.falsy[p.index()] {
                continue;
            }
            match by_sub.get(&s).copied() {
                Some(q) => {
                    let merged = self.apply_at(l, q, p, Op::Or)?;
                    by_sub.insert(s, merged);
                }
                None => {
                    by_sub.insert(s, p);
                    order.push(s);
                }
            }
        }
        if order.iter().all(|s| self.falsy[s.index()]) {
            return Ok(self.false_at(v));
        }
        let mut el: Vec<Element> = order.iter().map(|s| Element::new(by_sub[s], *s)).collect();
        el.sort();
        self.intern(SddNode {
            vtree: v,
            kind: NodeKind::Decision(el),
        })
    }

    pub fn conjoin(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.apply(a, b, Op::And)
    }

    pub fn disjoin(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.apply(a, b, Op::Or)
    }

    pub fn apply(&mut self, a: NodeId, b: NodeId, op: Op) -> Result<NodeId> {
        for x in [a, b] {
            if x.index() >= self.nodes.len() {
                return Err(Error::UnknownNode(x));
            }
        }
        let (va, vb) = (self.nodes[a.index()].vtree, self.nodes[b.index()].vtree);
        if va != vb {
            return Err(Error::VtreeMismatch(va, vb));
        }
        self.apply_at(va, a, b, op)
    }

    fn apply_at(&mut self, v: VtreeId, a: NodeId, b: NodeId, op: Op) -> Result<NodeId> {
        if a == b {
            return Ok(a);
        }
        match (op, self.falsy[a.index()], self.falsy[b.index()]) {
            (Op::And, true, _) | (Op::Or, _, true) => return Ok(a),
            (Op::And, _, true) | (Op::Or, true, _) => return Ok(b),
            _ => {}
        }
        let key = (op, a.min(b), a.max(b));
        if let Some(&r) = self.apply_cache.get(&key) {
            return Ok(r);
        }
        let r = match self.vtree.children(v) {
            None => {
                let x = self.vtree.leaf_var(v).unwrap();
                let (a0, a1) = truth_pair(&self.nodes[a.index()].kind);
                let (b0, b1) = truth_pair(&self.nodes[b.index()].kind);
                let f = |p: bool, q: bool| match op {
                    Op::And => p && q,
                    Op::Or => p || q,
                };
                match (f(a0, b0), f(a1, b1)) {
                    (false, false) => self.false_at(v),
                    (true, true) => self.true_at(v),
                    (false, true) => self.literal_at(v, x, true)?,
                    (true, false) => self.literal_at(v, x, false)?,
                }
            }
            Some((l, r)) => {
                let ea = self.elements_of(a, l, r);
                let eb = self.elements_of(b, l, r);
                let mut out = Vec::with_capacity(ea.len() * eb.len());
                for &(p, s) in &ea {
                    for &(q, t) in &eb {
                        let pq = self.apply_at(l, p, q, Op::And)?;
                        if self.falsy[pq.index()] {
                            continue;
                        }
                        let st = self.apply_at(r, s, t, op)?;
                        out.push((pq, st));
                    }
                }
                self.decision_at(v, &out)?
            }
        };
        self.apply_cache.insert(key, r);
        Ok(r)
    }

    /// Elements of a node normalized for an internal vtree node.
    fn elements_of(&mut self, n: NodeId, l: VtreeId, r: VtreeId) -> Vec<(NodeId, NodeId)> {
        match &self.nodes[n.index()].kind {
            NodeKind::Decision(el) => el.iter().map(|e| (e.prime, e.sub)).collect(),
            _ => {
                // A ⊥ tag on an internal node; apply handles it before this.
                let t = self.true_at(l);
                let f = self.false_at(r);
                alloc::vec![(t, f)]
            }
        }
    }

    pub fn negate(&mut self, a: NodeId) -> Result<NodeId> {
        if a.index() >= self.nodes.len() {
            return Err(Error::UnknownNode(a));
        }
        if let Some(&r) = self.negate_cache.get(&a) {
            return Ok(r);
        }
        let node = self.nodes[a.index()].clone();
        let v = node.vtree;
        let r = match node.kind {
            NodeKind::False => self.true_at(v),
            NodeKind::True => self.false_at(v),
            NodeKind::Literal { var, positive } => self.literal_at(v, var, !positive)?,
            NodeKind::Decision(el) => {
                let mut out = Vec::with_capacity(el.len());
                for e in el {
                    let s = self.negate(e.sub)?;
                    out.push((e.prime, s));
                }
                self.decision_at(v, &out)?
            }
        };
        self.negate_cache.insert(a, r);
        Ok(r)
    }

    /// Freezes the circuit rooted at `root`; unreachable nodes are dropped.
    pub fn finish(self, root: NodeId) -> Result<Circuit> {
        Circuit::new(self.vtree, self.nodes, root)
    }
}

fn truth_pair(kind: &NodeKind) -> (bool, bool) {
    match kind {
        NodeKind::False => (false, false),
        NodeKind::True => (true, true),
        NodeKind::Literal { positive, .. } => (!*positive, *positive),
        NodeKind::Decision(_) => unreachable!("decision node on a vtree leaf"),
    }
}
