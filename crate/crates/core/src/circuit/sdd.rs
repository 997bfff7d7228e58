use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Evidence, Var, Vtree, VtreeId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub prime: NodeId,
    pub sub: NodeId,
}

impl Element {
    pub fn new(prime: NodeId, sub: NodeId) -> Element {
        Element { prime, sub }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    /// `⊥`. May be tagged with any vtree node.
    False,
    /// `⊤` over the single variable of its leaf.
    True,
    Literal {
        var: Var,
        positive: bool,
    },
    Decision(Vec<Element>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SddNode {
    pub vtree: VtreeId,
    pub kind: NodeKind,
}

impl SddNode {
    pub fn elements(&self) -> &[Element] {
        match &self.kind {
            NodeKind::Decision(e) => e,
            _ => &[],
        }
    }

    pub fn is_decision(&self) -> bool {
        matches!(self.kind, NodeKind::Decision(_))
    }

    pub fn is_true(&self) -> bool {
        matches!(self.kind, NodeKind::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self.kind, NodeKind::False)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectivityClass {
    SinglyConnected,
    MultiplyConnected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport {
    /// Root-to-node path count per node, saturating.
    pub multiplicity: Vec<u64>,
    pub class: ConnectivityClass,
}

impl MultiplicityReport {
    pub fn shared_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.multiplicity
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 1)
            .map(|(i, _)| NodeId(i as u32))
    }
}

/// Checks that `node` (to be stored at `id`) is normalized and refers only to
/// earlier nodes. `falsy` tells which earlier nodes denote `⊥`.
pub(crate) fn check_node(
    vtree: &Vtree,
    nodes: &[SddNode],
    falsy: &[bool],
    id: NodeId,
    node: &SddNode,
) -> Result<()> {
    let v = node.vtree;
    if v.index() >= vtree.len() {
        return Err(Error::NotNormalized {
            node: id,
            vtree: v,
            reason: "vtree node out of range".into(),
        });
    }
    let bad = |reason: &str| {
        Err(Error::NotNormalized {
            node: id,
            vtree: v,
            reason: reason.into(),
        })
    };
    match &node.kind {
        NodeKind::False => Ok(()),
        NodeKind::True => {
            if vtree.is_leaf(v) {
                Ok(())
            } else {
                bad("⊤ terminal on an internal vtree node")
            }
        }
        NodeKind::Literal { var, .. } => {
            if !vtree.has_var(*var) {
                return Err(Error::UnknownVariable(*var));
            }
            if vtree.leaf_var(v) != Some(*var) {
                return bad("literal not at its variable's leaf");
            }
            Ok(())
        }
        NodeKind::Decision(elements) => {
            let Some((l, r)) = vtree.children(v) else {
                return bad("decision node on a vtree leaf");
            };
            if elements.is_empty() {
                return Err(Error::EmptyDecision(id));
            }
            for e in elements {
                for c in [e.prime, e.sub] {
                    if c.index() >= id.index() || c.index() >= nodes.len() {
                        return Err(Error::UnknownNode(c));
                    }
                }
                if nodes[e.prime.index()].vtree != l {
                    return bad(&format!(
                        "prime {} not normalized for the left child",
                        e.prime.0
                    ));
                }
                if nodes[e.sub.index()].vtree != r {
                    return bad(&format!(
                        "sub {} not normalized for the right child",
                        e.sub.0
                    ));
                }
                if falsy[e.prime.index()] {
                    return bad(&format!("prime {} is ⊥", e.prime.0));
                }
            }
            Ok(())
        }
    }
}

pub(crate) fn node_is_false(falsy: &[bool], node: &SddNode) -> bool {
    match &node.kind {
        NodeKind::False => true,
        NodeKind::Decision(el) => el.iter().all(|e| falsy[e.sub.index()]),
        _ => false,
    }
}

/// An immutable, normalized SDD. Node ids are topological (children first)
/// and every node is reachable from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    vtree: Vtree,
    nodes: Vec<SddNode>,
    root: NodeId,
}

impl Circuit {
    /// Validates normalization and drops nodes unreachable from `root`,
    /// renumbering the survivors in their original order.
    pub fn new(vtree: Vtree, nodes: Vec<SddNode>, root: NodeId) -> Result<Circuit> {
        if root.index() >= nodes.len() {
            return Err(Error::UnknownNode(root));
        }
        let mut falsy = Vec::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            check_node(&vtree, &nodes[..i], &falsy, NodeId(i as u32), n)?;
            falsy.push(node_is_false(&falsy, n));
        }
        let mut reach = vec![false; nodes.len()];
        reach[root.index()] = true;
        for i in (0..nodes.len()).rev() {
            if reach[i] {
                for e in nodes[i].elements() {
                    reach[e.prime.index()] = true;
                    reach[e.sub.index()] = true;
                }
            }
        }
        if reach.iter().all(|&r| r) {
            return Ok(Circuit { vtree, nodes, root });
        }
        let mut remap = vec![NodeId(u32::MAX); nodes.len()];
        let mut kept = Vec::new();
        for (i, n) in nodes.into_iter().enumerate() {
            if !reach[i] {
                continue;
            }
            remap[i] = NodeId(kept.len() as u32);
            let kind = match n.kind {
                NodeKind::Decision(el) => NodeKind::Decision(
                    el.into_iter()
                        .map(|e| Element::new(remap[e.prime.index()], remap[e.sub.index()]))
                        .collect(),
                ),
                k => k,
            };
            kept.push(SddNode {
                vtree: n.vtree,
                kind,
            });
        }
        let root = remap[root.index()];
        Ok(Circuit {
            vtree,
            nodes: kept,
            root,
        })
    }

    pub fn vtree(&self) -> &Vtree {
        &self.vtree
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &[SddNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &SddNode {
        &self.nodes[id.index()]
    }

    pub fn get(&self, id: NodeId) -> Result<&SddNode> {
        self.nodes.get(id.index()).ok_or(Error::UnknownNode(id))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.vtree.num_vars()
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn decision_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_decision()).count()
    }

    /// Nodes in topological order (children before parents).
    pub fn topological_order(&self) -> Vec<NodeId> {
        self.ids().collect()
    }

    /// Whether the variable occurs under the node's vtree.
    pub fn mentions(&self, id: NodeId, x: Var) -> bool {
        self.vtree.contains(self.nodes[id.index()].vtree, x)
    }

    fn check_assignment(&self, assignment: &[bool]) -> Result<()> {
        if assignment.len() < self.num_vars() {
            return Err(Error::IncompleteAssignment {
                got: assignment.len(),
                want: self.num_vars(),
            });
        }
        Ok(())
    }

    /// Truth value of `id` under a complete assignment (index `x - 1` holds `x`).
    pub fn evaluate(&self, id: NodeId, assignment: &[bool]) -> Result<bool> {
        self.get(id)?;
        self.check_assignment(assignment)?;
        Ok(self.eval_unchecked(id, assignment))
    }

    pub(crate) fn eval_unchecked(&self, id: NodeId, a: &[bool]) -> bool {
        let mut id = id;
        loop {
            let n = &self.nodes[id.index()];
            match &n.kind {
                NodeKind::False => return false,
                NodeKind::True => return true,
                NodeKind::Literal { var, positive } => return a[*var as usize - 1] == *positive,
                NodeKind::Decision(el) => {
                    match el.iter().find(|e| self.eval_unchecked(e.prime, a)) {
                        Some(e) => id = e.sub,
                        None => return false,
                    }
                }
            }
        }
    }

    /// Per-node flag: does some completion of `e` satisfy the node?
    pub fn consistency(&self, e: &Evidence) -> Vec<bool> {
        let mut ok = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            ok[i] = match &n.kind {
                NodeKind::False => false,
                NodeKind::True => true,
                NodeKind::Literal { var, positive } => e.get(*var).is_none_or(|b| b == *positive),
                NodeKind::Decision(el) => {
                    el.iter().any(|x| ok[x.prime.index()] && ok[x.sub.index()])
                }
            };
        }
        ok
    }

    pub fn is_consistent(&self, e: &Evidence) -> bool {
        self.consistency(e)[self.root.index()]
    }

    /// Models of `id` over the variables under its vtree; other variables are
    /// left `false` in the returned assignments.
    pub fn enumerate_models(&self, id: NodeId) -> Result<Vec<Vec<bool>>> {
        self.get(id)?;
        let vars = self.vtree.vars_under(self.nodes[id.index()].vtree);
        if vars.len() > 24 {
            return Err(Error::TooManyVariables(vars.len()));
        }
        let mut out = Vec::new();
        let mut a = vec![false; self.num_vars()];
        for bits in 0u64..(1u64 << vars.len()) {
            for (j, &x) in vars.iter().enumerate() {
                a[x as usize - 1] = (bits >> j) & 1 == 1;
            }
            if self.eval_unchecked(id, &a) {
                out.push(a.clone());
            }
        }
        Ok(out)
    }

    /// Model count of each node relative to the variables under its vtree.
    pub fn model_counts(&self) -> Vec<u128> {
        let mut c = vec![0u128; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            c[i] = match &n.kind {
                NodeKind::False => 0,
                NodeKind::True => 2,
                NodeKind::Literal { .. } => 1,
                NodeKind::Decision(el) => el
                    .iter()
                    .map(|e| c[e.prime.index()].saturating_mul(c[e.sub.index()]))
                    .fold(0u128, |a, b| a.saturating_add(b)),
            };
        }
        c
    }

    pub fn model_count(&self) -> u128 {
        self.model_counts()[self.root.index()]
    }

    pub fn multiplicity(&self) -> MultiplicityReport {
        let mut m = vec![0u64; self.nodes.len()];
        m[self.root.index()] = 1;
        for i in (0..self.nodes.len()).rev() {
            let mi = m[i];
            if mi == 0 {
                continue;
            }
            for e in self.nodes[i].elements() {
                m[e.prime.index()] = m[e.prime.index()].saturating_add(mi);
                m[e.sub.index()] = m[e.sub.index()].saturating_add(mi);
            }
        }
        let class = if m.iter().all(|&x| x <= 1) {
            ConnectivityClass::SinglyConnected
        } else {
            ConnectivityClass::MultiplyConnected
        };
        MultiplicityReport {
            multiplicity: m,
            class,
        }
    }

    /// Checks the partition property of every decision node. Left variable
    /// sets up to `exhaustive_limit` variables are enumerated; larger ones
    /// are probed with `samples` pseudo-random assignments.
    pub fn check_partitions(&self, exhaustive_limit: usize, samples: usize) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5dd);
        let mut a = vec![false; self.num_vars()];
        for (i, n) in self.nodes.iter().enumerate() {
            let NodeKind::Decision(el) = &n.kind else {
                continue;
            };
            let (l, _) = self
                .vtree
                .children(n.vtree)
                .expect("decision at internal node");
            let vars = self.vtree.vars_under(l);
            let exhaustive = vars.len() <= exhaustive_limit;
            let rounds = if exhaustive {
                1usize << vars.len()
            } else {
                samples
            };
            for r in 0..rounds {
                for (j, &x) in vars.iter().enumerate() {
                    a[x as usize - 1] = if exhaustive {
                        (r >> j) & 1 == 1
                    } else {
                        rng.gen()
                    };
                }
                let hits = el
                    .iter()
                    .filter(|e| self.eval_unchecked(e.prime, &a))
                    .count();
                if hits != 1 {
                    return Err(Error::NotPartition(NodeId(i as u32)));
                }
            }
        }
        Ok(())
    }
}
