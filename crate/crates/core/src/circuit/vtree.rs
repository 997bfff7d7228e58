use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Variables are numbered from 1.
pub type Var = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VtreeId(pub u32);

impl VtreeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VtreeNode {
    Leaf(Var),
    Internal { left: VtreeId, right: VtreeId },
}

/// Nested description of a vtree, used to build one without picking ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Leaf(Var),
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn node(left: Shape, right: Shape) -> Shape {
        Shape::Node(Box::new(left), Box::new(right))
    }

    /// Balanced combination of sub-shapes; the left half gets the smaller share.
    pub fn balanced(mut parts: Vec<Shape>) -> Shape {
        assert!(!parts.is_empty(), "balanced shape of nothing");
        if parts.len() == 1 {
            return parts.pop().unwrap();
        }
        let right = parts.split_off(parts.len() / 2);
        Shape::node(Shape::balanced(parts), Shape::balanced(right))
    }
}

/// Full binary tree whose leaves are in one-to-one correspondence with the
/// variables `1..=n`. Children always have smaller ids than their parent.
#[derive(Clone, Debug)]
pub struct Vtree {
    nodes: Vec<VtreeNode>,
    root: VtreeId,
    parent: Vec<Option<VtreeId>>,
    leaf_of: Vec<VtreeId>,
    position: Vec<u32>,
    span: Vec<(u32, u32)>,
    order: Vec<Var>,
}

impl PartialEq for Vtree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.nodes == other.nodes
    }
}

impl Eq for Vtree {}

impl Vtree {
    pub fn new(nodes: Vec<VtreeNode>, root: VtreeId) -> Result<Vtree> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidVtree("no nodes".into()));
        }
        if root.index() >= n {
            return Err(Error::InvalidVtree(format!("root {} out of range", root.0)));
        }
        let mut parent = vec![None; n];
        let mut vars = BTreeSet::new();
        for (i, node) in nodes.iter().enumerate() {
            match *node {
                VtreeNode::Leaf(v) => {
                    if v == 0 {
                        return Err(Error::InvalidVtree("variable ids start at 1".into()));
                    }
                    if !vars.insert(v) {
                        return Err(Error::InvalidVtree(format!("variable {v} appears twice")));
                    }
                }
                VtreeNode::Internal { left, right } => {
                    for c in [left, right] {
                        if c.index() >= i {
                            return Err(Error::InvalidVtree(format!(
                                "child {} of node {i} does not precede it",
                                c.0
                            )));
                        }
                        if parent[c.index()].is_some() {
                            return Err(Error::InvalidVtree(format!(
                                "node {} has two parents",
                                c.0
                            )));
                        }
                        parent[c.index()] = Some(VtreeId(i as u32));
                    }
                    if left == right {
                        return Err(Error::InvalidVtree(format!("node {i} has equal children")));
                    }
                }
            }
        }
        for (i, p) in parent.iter().enumerate() {
            if p.is_none() && i != root.index() {
                return Err(Error::InvalidVtree(format!(
                    "node {i} is not reachable from the root"
                )));
            }
        }
        if parent[root.index()].is_some() {
            return Err(Error::InvalidVtree("root has a parent".into()));
        }
        let num_vars = vars.len();
        if vars.iter().next_back().copied() != Some(num_vars as Var) {
            return Err(Error::InvalidVtree(
                "variables must be exactly 1..=n".into(),
            ));
        }

        let mut t = Vtree {
            nodes,
            root,
            parent,
            leaf_of: vec![VtreeId(0); num_vars],
            position: vec![0; num_vars],
            span: vec![(0, 0); n],
            order: Vec::with_capacity(num_vars),
        };
        t.index_leaves();
        Ok(t)
    }

    fn index_leaves(&mut self) {
        // Iterative in-order walk; children precede parents so a post-order
        // pass over ids fills spans once the leaf positions are known.
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            match self.nodes[v.index()] {
                VtreeNode::Leaf(x) => {
                    let pos = self.order.len() as u32;
                    self.order.push(x);
                    self.leaf_of[x as usize - 1] = v;
                    self.position[x as usize - 1] = pos;
                    self.span[v.index()] = (pos, pos + 1);
                }
                VtreeNode::Internal { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        for i in 0..self.nodes.len() {
            if let VtreeNode::Internal { left, right } = self.nodes[i] {
                self.span[i] = (self.span[left.index()].0, self.span[right.index()].1);
            }
        }
    }

    pub fn from_shape(shape: &Shape) -> Vtree {
        fn go(s: &Shape, out: &mut Vec<VtreeNode>) -> VtreeId {
            match s {
                Shape::Leaf(v) => out.push(VtreeNode::Leaf(*v)),
                Shape::Node(l, r) => {
                    let left = go(l, out);
                    let right = go(r, out);
                    out.push(VtreeNode::Internal { left, right });
                }
            }
            VtreeId(out.len() as u32 - 1)
        }
        let mut nodes = Vec::new();
        let root = go(shape, &mut nodes);
        Vtree::new(nodes, root).expect("shape must mention each of 1..=n once")
    }

    pub fn balanced(vars: &[Var]) -> Vtree {
        Vtree::from_shape(&Shape::balanced(
            vars.iter().map(|&v| Shape::Leaf(v)).collect(),
        ))
    }

    pub fn right_linear(vars: &[Var]) -> Vtree {
        let mut it = vars.iter().rev();
        let mut s = Shape::Leaf(*it.next().expect("empty variable list"));
        for &v in it {
            s = Shape::node(Shape::Leaf(v), s);
        }
        Vtree::from_shape(&s)
    }

    pub fn left_linear(vars: &[Var]) -> Vtree {
        let mut it = vars.iter();
        let mut s = Shape::Leaf(*it.next().expect("empty variable list"));
        for &v in it {
            s = Shape::node(s, Shape::Leaf(v));
        }
        Vtree::from_shape(&s)
    }

    pub fn root(&self) -> VtreeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[VtreeNode] {
        &self.nodes
    }

    pub fn node(&self, v: VtreeId) -> &VtreeNode {
        &self.nodes[v.index()]
    }

    pub fn num_vars(&self) -> usize {
        self.order.len()
    }

    pub fn is_leaf(&self, v: VtreeId) -> bool {
        matches!(self.nodes[v.index()], VtreeNode::Leaf(_))
    }

    pub fn leaf_var(&self, v: VtreeId) -> Option<Var> {
        match self.nodes[v.index()] {
            VtreeNode::Leaf(x) => Some(x),
            _ => None,
        }
    }

    pub fn children(&self, v: VtreeId) -> Option<(VtreeId, VtreeId)> {
        match self.nodes[v.index()] {
            VtreeNode::Internal { left, right } => Some((left, right)),
            _ => None,
        }
    }

    pub fn parent(&self, v: VtreeId) -> Option<VtreeId> {
        self.parent[v.index()]
    }

    pub fn has_var(&self, x: Var) -> bool {
        x >= 1 && (x as usize) <= self.order.len()
    }

    pub fn leaf_of(&self, x: Var) -> Result<VtreeId> {
        if !self.has_var(x) {
            return Err(Error::UnknownVariable(x));
        }
        Ok(self.leaf_of[x as usize - 1])
    }

    /// Whether variable `x` is a leaf under `v`.
    pub fn contains(&self, v: VtreeId, x: Var) -> bool {
        if !self.has_var(x) {
            return false;
        }
        let p = self.position[x as usize - 1];
        let (lo, hi) = self.span[v.index()];
        lo <= p && p < hi
    }

    /// Whether `a` is `b` or a descendant of it.
    pub fn is_within(&self, a: VtreeId, b: VtreeId) -> bool {
        let (alo, ahi) = self.span[a.index()];
        let (blo, bhi) = self.span[b.index()];
        blo <= alo && ahi <= bhi
    }

    /// Variables under `v` in left-to-right order.
    pub fn vars_under(&self, v: VtreeId) -> &[Var] {
        let (lo, hi) = self.span[v.index()];
        &self.order[lo as usize..hi as usize]
    }

    pub fn var_order(&self) -> &[Var] {
        &self.order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_four() {
        let t = Vtree::balanced(&[1, 2, 3, 4]);
        let (l, r) = t.children(t.root()).unwrap();
        assert_eq!(t.vars_under(l), &[1, 2]);
        assert_eq!(t.vars_under(r), &[3, 4]);
        assert!(t.contains(l, 2));
        assert!(!t.contains(l, 3));
    }

    #[test]
    fn rejects_duplicate_and_gaps() {
        let dup = vec![
            VtreeNode::Leaf(1),
            VtreeNode::Leaf(1),
            VtreeNode::Internal {
                left: VtreeId(0),
                right: VtreeId(1),
            },
        ];
        assert!(Vtree::new(dup, VtreeId(2)).is_err());
        let gap = vec![
            VtreeNode::Leaf(1),
            VtreeNode::Leaf(3),
            VtreeNode::Internal {
                left: VtreeId(0),
                right: VtreeId(1),
            },
        ];
        assert!(Vtree::new(gap, VtreeId(2)).is_err());
        let dangling = vec![VtreeNode::Leaf(1), VtreeNode::Leaf(2)];
        assert!(Vtree::new(dangling, VtreeId(1)).is_err());
    }

    #[test]
    fn linear_shapes() {
        let r = Vtree::right_linear(&[1, 2, 3]);
        let (l, _) = r.children(r.root()).unwrap();
        assert_eq!(r.leaf_var(l), Some(1));
        let l = Vtree::left_linear(&[1, 2, 3]);
        let (_, rr) = l.children(l.root()).unwrap();
        assert_eq!(l.leaf_var(rr), Some(3));
    }
}
