//! Simple undirected graphs with 1-based vertex ids, matchings, and linear
//! arrangements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Simple undirected graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
    weights: Vec<u64>,
    names: BTreeMap<u32, String>,
}

impl Graph {
    /// Builds a graph; edges are normalized to `u < v`, sorted and deduplicated.
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Graph> {
        let mut es = Vec::new();
        for (u, v) in edges {
            if u == v {
                return input(format!("self-loop on vertex {u}"));
            }
            if u == 0 || v == 0 || u > n || v > n {
                return input(format!("edge {{{u},{v}}} outside vertex range 1..={n}"));
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        es.dedup();
        let mut adj = vec![Vec::new(); n as usize + 1];
        for &(u, v) in &es {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Ok(Graph {
            n,
            edges: es,
            adj,
            weights: vec![1; n as usize + 1],
            names: BTreeMap::new(),
        })
    }

    pub fn empty(n: u32) -> Graph {
        Graph::new(n, []).expect("edgeless graph is valid")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == 0 || v == 0 || u > self.n || v > self.n {
            return false;
        }
        let (a, b) = if self.adj[u as usize].len() <= self.adj[v as usize].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a as usize].contains(&b)
    }

    pub fn weight(&self, v: u32) -> u64 {
        self.weights[v as usize]
    }

    /// Vertex weights indexed by id (slot 0 unused).
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn set_weight(&mut self, v: u32, w: u64) -> Result<()> {
        if v == 0 || v > self.n {
            return input(format!("weight for unknown vertex {v}"));
        }
        self.weights[v as usize] = w;
        Ok(())
    }

    pub fn names(&self) -> &BTreeMap<u32, String> {
        &self.names
    }

    pub fn set_name(&mut self, v: u32, name: impl Into<String>) {
        self.names.insert(v, name.into());
    }

    pub fn name(&self, v: u32) -> Option<&str> {
        self.names.get(&v).map(String::as_str)
    }

    pub fn to_json(&self) -> GraphJson {
        let weights = if self.weights[1..].iter().all(|&w| w == 1) {
            None
        } else {
            Some(
                (1..=self.n)
                    .map(|v| (v.to_string(), self.weights[v as usize]))
                    .collect(),
            )
        };
        let names = if self.names.is_empty() {
            None
        } else {
            Some(
                self.names
                    .iter()
                    .map(|(v, s)| (v.to_string(), s.clone()))
                    .collect(),
            )
        };
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            weights,
            names,
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Graph> {
        let mut g = Graph::new(j.n, j.edges.iter().map(|e| (e[0], e[1])))?;
        if let Some(ws) = &j.weights {
            for (k, &w) in ws {
                g.set_weight(parse_id(k)?, w)?;
            }
        }
        if let Some(ns) = &j.names {
            for (k, s) in ns {
                let v = parse_id(k)?;
                if v == 0 || v > g.n {
                    return input(format!("name for unknown vertex {v}"));
                }
                g.set_name(v, s.clone());
            }
        }
        Ok(g)
    }
}

fn parse_id(s: &str) -> Result<u32> {
    s.parse()
        .map_err(|_| Error::Input(format!("vertex id key {s:?} is not an integer")))
}

/// JSON wire form of a [`Graph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: u32,
    pub edges: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<BTreeMap<String, String>>,
}

/// A set of pairwise vertex-disjoint edges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<[u32; 2]>,
}

impl Matching {
    /// Normalizes edge orientation and rejects shared endpoints.
    pub fn new(edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Matching> {
        let mut es: Vec<[u32; 2]> = edges
            .into_iter()
            .map(|(u, v)| [u.min(v), u.max(v)])
            .collect();
        es.sort_unstable();
        let mut seen = std::collections::BTreeSet::new();
        for e in &es {
            if e[0] == e[1] {
                return input(format!("matching edge {{{},{}}} is a loop", e[0], e[1]));
            }
            for v in e {
                if !seen.insert(*v) {
                    return input(format!("vertex {v} is covered twice by the matching"));
                }
            }
        }
        Ok(Matching { edges: es })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

pub fn vertices_of(m: &Matching) -> std::collections::BTreeSet<u32> {
    m.edges.iter().flat_map(|e| e.iter().copied()).collect()
}

fn check_edges_present(g: &Graph, m: &Matching) -> Result<()> {
    for e in &m.edges {
        if !g.has_edge(e[0], e[1]) {
            return input(format!("matching edge {{{},{}}} is not in the graph", e[0], e[1]));
        }
    }
    Ok(())
}

/// True iff `g[V(m)]` is 1-regular.
pub fn is_induced_matching(g: &Graph, m: &Matching) -> Result<bool> {
    check_edges_present(g, m)?;
    let vs = vertices_of(m);
    for &v in &vs {
        let deg = g.neighbors(v).iter().filter(|u| vs.contains(u)).count();
        if deg != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `g[V(m)]` is a forest.
pub fn is_acyclic_matching(g: &Graph, m: &Matching) -> Result<bool> {
    check_edges_present(g, m)?;
    let vs = vertices_of(m);
    let mut dsu = Dsu::new(g.n() as usize + 1);
    for &(u, v) in g.edges() {
        if vs.contains(&u) && vs.contains(&v) && !dsu.union(u as usize, v as usize) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A vertex ordering; `order[k]` is the vertex at position `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearArrangement {
    pub order: Vec<u32>,
}

impl LinearArrangement {
    pub fn identity(n: u32) -> LinearArrangement {
        LinearArrangement {
            order: (1..=n).collect(),
        }
    }

    pub fn reversed(&self) -> LinearArrangement {
        LinearArrangement {
            order: self.order.iter().rev().copied().collect(),
        }
    }
}

/// Maximum number of edges crossing a prefix cut of the arrangement.
pub fn compute_cutwidth(g: &Graph, a: &LinearArrangement) -> Result<usize> {
    let n = g.n() as usize;
    if a.order.len() != n {
        return input(format!(
            "arrangement has {} entries for {} vertices",
            a.order.len(),
            n
        ));
    }
    let mut pos = vec![usize::MAX; n + 1];
    for (k, &v) in a.order.iter().enumerate() {
        if v == 0 || v as usize > n || pos[v as usize] != usize::MAX {
            return input(format!("arrangement is not a bijection (vertex {v})"));
        }
        pos[v as usize] = k;
    }
    // diff[k] counts edges crossing the cut after position k
    let mut diff = vec![0i64; n + 1];
    for &(u, v) in g.edges() {
        let (a, b) = (pos[u as usize].min(pos[v as usize]), pos[u as usize].max(pos[v as usize]));
        diff[a] += 1;
        diff[b] -= 1;
    }
    let mut best = 0i64;
    let mut cur = 0i64;
    for d in diff.iter().take(n) {
        cur += d;
        best = best.max(cur);
    }
    Ok(best as usize)
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
