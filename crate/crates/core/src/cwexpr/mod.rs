//! Clique-width expressions.
//!
//! An expression is stored as an arena in post-order: every node's children
//! precede it and the root is the last node. Builders keep the left subtree
//! before the right one, so two structurally equal trees have equal arenas.
//! Vertices are numbered `1..=n` in the order their `Intro` leaves appear.

mod gen;
mod text;

pub use gen::{gen_family, gen_random_expr, gen_random_expr_bounded, FamilyKind};
pub use text::{parse, parse_with_positions, serialize, Position};

use crate::error::{input, Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    /// Fresh vertex with the given label.
    Intro(u32),
    Union(usize, usize),
    /// `Join(i, j, child)` adds all edges between classes `i` and `j`.
    Join(u32, u32, usize),
    /// `Relabel(i, j, child)` moves class `i` into class `j`.
    Relabel(u32, u32, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CwExpr {
    nodes: Vec<Node>,
}

fn check_label(l: u32) -> Result<()> {
    if l == 0 {
        return input("labels start at 1");
    }
    Ok(())
}

fn check_pair(op: &str, i: u32, j: u32) -> Result<()> {
    check_label(i)?;
    check_label(j)?;
    if i == j {
        return input(format!("{op} needs two distinct labels, got {i} and {j}"));
    }
    Ok(())
}

impl CwExpr {
    pub fn vertex(label: u32) -> Result<CwExpr> {
        check_label(label)?;
        Ok(CwExpr {
            nodes: vec![Node::Intro(label)],
        })
    }

    pub fn union(mut left: CwExpr, right: CwExpr) -> CwExpr {
        let off = left.nodes.len();
        let l_root = off - 1;
        left.nodes.extend(right.nodes.into_iter().map(|n| shift(n, off)));
        let r_root = left.nodes.len() - 1;
        left.nodes.push(Node::Union(l_root, r_root));
        left
    }

    pub fn join(i: u32, j: u32, mut child: CwExpr) -> Result<CwExpr> {
        check_pair("eta", i, j)?;
        let c = child.root();
        child.nodes.push(Node::Join(i, j, c));
        Ok(child)
    }

    pub fn relabel(i: u32, j: u32, mut child: CwExpr) -> Result<CwExpr> {
        check_pair("rho", i, j)?;
        let c = child.root();
        child.nodes.push(Node::Relabel(i, j, c));
        Ok(child)
    }

    /// Wraps a raw arena after checking the post-order and label invariants.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<CwExpr> {
        if nodes.is_empty() {
            return input("empty expression");
        }
        let mut used = vec![false; nodes.len()];
        for (idx, n) in nodes.iter().enumerate() {
            let kids: &[usize] = match n {
                Node::Intro(l) => {
                    check_label(*l)?;
                    &[]
                }
                Node::Union(a, b) => &[*a, *b][..],
                Node::Join(i, j, c) => {
                    check_pair("eta", *i, *j)?;
                    std::slice::from_ref(c)
                }
                Node::Relabel(i, j, c) => {
                    check_pair("rho", *i, *j)?;
                    std::slice::from_ref(c)
                }
            };
            for &k in kids {
                if k >= idx || used[k] {
                    return input(format!("node {idx} has an invalid child reference {k}"));
                }
                used[k] = true;
            }
            if let Node::Union(a, b) = n {
                if a >= b {
                    return input(format!("union node {idx} lists its children out of order"));
                }
            }
        }
        if used[..nodes.len() - 1].iter().any(|u| !u) {
            return input("arena contains nodes unreachable from the root");
        }
        Ok(CwExpr { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Largest label mentioned anywhere.
    pub fn width(&self) -> u32 {
        self.nodes
            .iter()
            .map(|n| match *n {
                Node::Intro(l) => l,
                Node::Union(..) => 0,
                Node::Join(i, j, _) | Node::Relabel(i, j, _) => i.max(j),
            })
            .max()
            .unwrap_or(0)
    }

    pub fn vertex_count(&self) -> u32 {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Intro(_)))
            .count() as u32
    }
}

fn shift(n: Node, off: usize) -> Node {
    match n {
        Node::Intro(l) => Node::Intro(l),
        Node::Union(a, b) => Node::Union(a + off, b + off),
        Node::Join(i, j, c) => Node::Join(i, j, c + off),
        Node::Relabel(i, j, c) => Node::Relabel(i, j, c + off),
    }
}

/// A graph together with a label for every vertex (`labels[0]` unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<u32>,
}

impl LabeledGraph {
    pub fn label(&self, v: u32) -> u32 {
        self.labels[v as usize]
    }
}

/// Outcome of a join as seen by the simulator.
#[derive(Debug, Clone, Copy)]
struct JoinCensus {
    existing: usize,
    possible: usize,
}

/// Per-subtree state while replaying an expression.
#[derive(Debug, Clone)]
struct Pending {
    first: u32,
    count: u32,
    classes: Vec<Vec<u32>>,
}

/// Replays an expression node by node, keeping labels and adjacency.
struct Sim {
    width: usize,
    label: Vec<u32>,
    adj: Vec<Vec<u32>>,
    stack: Vec<Pending>,
}

impl Sim {
    fn new(e: &CwExpr) -> Sim {
        let n = e.vertex_count() as usize;
        Sim {
            width: e.width() as usize,
            label: vec![0; n + 1],
            adj: vec![Vec::new(); n + 1],
            stack: Vec::new(),
        }
    }

    fn next_vertex(&self) -> u32 {
        self.stack.last().map_or(1, |p| p.first + p.count)
    }

    /// Census of the join about to be applied at the top of the stack.
    fn census(&self, i: u32, j: u32) -> JoinCensus {
        let top = self.stack.last().expect("join has a child");
        let (ci, cj) = (&top.classes[i as usize], &top.classes[j as usize]);
        let (small, other) = if ci.len() <= cj.len() { (ci, j) } else { (cj, i) };
        let existing = small
            .iter()
            .map(|&v| {
                self.adj[v as usize]
                    .iter()
                    .filter(|&&u| self.label[u as usize] == other)
                    .count()
            })
            .sum();
        JoinCensus {
            existing,
            possible: ci.len() * cj.len(),
        }
    }

    fn step(&mut self, node: Node) {
        match node {
            Node::Intro(l) => {
                let v = self.next_vertex();
                self.label[v as usize] = l;
                let mut classes = vec![Vec::new(); self.width + 1];
                classes[l as usize].push(v);
                self.stack.push(Pending {
                    first: v,
                    count: 1,
                    classes,
                });
            }
            Node::Union(..) => {
                let right = self.stack.pop().expect("union has two children");
                let left = self.stack.last_mut().expect("union has two children");
                left.count += right.count;
                for (l, vs) in right.classes.into_iter().enumerate() {
                    left.classes[l].extend(vs);
                }
            }
            Node::Join(i, j, _) => {
                let top = self.stack.last().expect("join has a child");
                let (ci, cj) = (&top.classes[i as usize], &top.classes[j as usize]);
                // duplicates only arise for redundant joins; consumers dedup
                for &u in ci {
                    for &v in cj {
                        self.adj[u as usize].push(v);
                        self.adj[v as usize].push(u);
                    }
                }
            }
            Node::Relabel(i, j, _) => {
                let top = self.stack.last_mut().expect("relabel has a child");
                let moved = std::mem::take(&mut top.classes[i as usize]);
                for &v in &moved {
                    self.label[v as usize] = j;
                }
                top.classes[j as usize].extend(moved);
            }
        }
    }

    fn labeled_graph(&self, p: &Pending) -> LabeledGraph {
        let lo = p.first;
        let hi = p.first + p.count;
        let mut edges = Vec::new();
        for u in lo..hi {
            for &v in &self.adj[u as usize] {
                if u < v {
                    edges.push((u - lo + 1, v - lo + 1));
                }
            }
        }
        let graph = Graph::new(p.count, edges).expect("subtree edges are in range");
        let mut labels = vec![0];
        labels.extend((lo..hi).map(|v| self.label[v as usize]));
        LabeledGraph { graph, labels }
    }
}

pub fn evaluate(e: &CwExpr) -> LabeledGraph {
    let mut sim = Sim::new(e);
    for &n in &e.nodes {
        sim.step(n);
    }
    let top = sim.stack.last().expect("non-empty expression");
    sim.labeled_graph(top)
}

/// Labeled graph of one subexpression; its local vertex `k` is global
/// vertex `first + k - 1`.
#[derive(Debug, Clone)]
pub struct SubexpressionGraph {
    pub node: usize,
    pub first: u32,
    pub graph: LabeledGraph,
}

/// Labeled graph at every node, in arena order. Quadratic; meant for tests
/// and diagnostics on small expressions.
pub fn subexpression_graphs(e: &CwExpr) -> Vec<SubexpressionGraph> {
    let mut sim = Sim::new(e);
    let mut out = Vec::with_capacity(e.nodes.len());
    for (idx, &n) in e.nodes.iter().enumerate() {
        sim.step(n);
        let top = sim.stack.last().expect("node leaves a subtree");
        out.push(SubexpressionGraph {
            node: idx,
            first: top.first,
            graph: sim.labeled_graph(top),
        });
    }
    out
}

/// A join applied while at least one edge between its classes exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub i: u32,
    pub j: u32,
    pub existing: usize,
    pub possible: usize,
}

impl Violation {
    pub fn into_error(self) -> Error {
        Error::Redundant {
            node: self.node,
            i: self.i,
            j: self.j,
            existing: self.existing,
            possible: self.possible,
        }
    }
}

/// `None` if the expression is irredundant, otherwise the first offending join.
pub fn check_irredundant(e: &CwExpr) -> Option<Violation> {
    let mut sim = Sim::new(e);
    for (idx, &n) in e.nodes.iter().enumerate() {
        if let Node::Join(i, j, _) = n {
            let c = sim.census(i, j);
            if c.existing > 0 {
                return Some(Violation {
                    node: idx,
                    i,
                    j,
                    existing: c.existing,
                    possible: c.possible,
                });
            }
        }
        sim.step(n);
    }
    None
}

pub fn ensure_irredundant(e: &CwExpr) -> Result<()> {
    match check_irredundant(e) {
        None => Ok(()),
        Some(v) => Err(v.into_error()),
    }
}

/// Drops joins that add no edge; fails on joins that add only some.
pub fn normalize(e: &CwExpr) -> Result<CwExpr> {
    let mut sim = Sim::new(e);
    let mut map = vec![usize::MAX; e.nodes.len()];
    let mut out: Vec<Node> = Vec::with_capacity(e.nodes.len());
    for (idx, &n) in e.nodes.iter().enumerate() {
        let mut keep = true;
        if let Node::Join(i, j, c) = n {
            let census = sim.census(i, j);
            if census.existing > 0 {
                if census.existing < census.possible {
                    return Err(Error::PartialRedundancy {
                        node: idx,
                        i,
                        j,
                        existing: census.existing,
                        possible: census.possible,
                    });
                }
                keep = false;
                map[idx] = map[c];
            }
        }
        if keep {
            sim.step(n);
            let m = match n {
                Node::Intro(l) => Node::Intro(l),
                Node::Union(a, b) => Node::Union(map[a], map[b]),
                Node::Join(i, j, c) => Node::Join(i, j, map[c]),
                Node::Relabel(i, j, c) => Node::Relabel(i, j, map[c]),
            };
            map[idx] = out.len();
            out.push(m);
        }
    }
    Ok(CwExpr { nodes: out })
}
