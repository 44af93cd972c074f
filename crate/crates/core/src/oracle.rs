//! Brute-force reference solvers used to validate the dynamic programs.
//!
//! Both enumerate edge subsets in lexicographic order with early
//! disqualification, so they are only meant for small graphs.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::{Graph, Matching};

/// Size gate for the oracles: an instance is accepted when it is within
/// either bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: u32,
    pub max_edges: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 16,
            max_edges: 24,
        }
    }
}

impl OracleLimits {
    pub fn check(&self, g: &Graph) -> Result<()> {
        if g.n() <= self.max_vertices || g.edge_count() <= self.max_edges {
            Ok(())
        } else {
            Err(Error::Limit(format!(
                "oracle refuses graph with n = {} and {} edges (limits: n <= {} or edges <= {})",
                g.n(),
                g.edge_count(),
                self.max_vertices,
                self.max_edges
            )))
        }
    }
}

/// Non-isolated vertices renumbered to bit positions.
struct Compact {
    // original id of each bit
    ids: Vec<u32>,
    edges: Vec<(usize, usize)>,
    nbr: Vec<u128>,
}

fn compact(g: &Graph) -> Result<Compact> {
    let mut bit = vec![usize::MAX; g.n() as usize + 1];
    let mut ids = Vec::new();
    for v in 1..=g.n() {
        if !g.neighbors(v).is_empty() {
            bit[v as usize] = ids.len();
            ids.push(v);
        }
    }
    if ids.len() > 128 {
        return Err(Error::Limit(format!(
            "oracle supports at most 128 non-isolated vertices, got {}",
            ids.len()
        )));
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (bit[u as usize], bit[v as usize]))
        .collect();
    let mut nbr = vec![0u128; ids.len()];
    for &(a, b) in &edges {
        nbr[a] |= 1 << b;
        nbr[b] |= 1 << a;
    }
    Ok(Compact { ids, edges, nbr })
}

/// Calls `visit` once per induced matching, with the chosen edges as
/// `(u, v)` pairs of original ids.
pub fn for_each_induced_matching(
    g: &Graph,
    limits: OracleLimits,
    mut visit: impl FnMut(&[(u32, u32)]),
) -> Result<()> {
    limits.check(g)?;
    let c = compact(g)?;
    let mut chosen = Vec::new();
    induced_rec(&c, 0, 0, &mut chosen, &mut visit);
    Ok(())
}

fn induced_rec(
    c: &Compact,
    start: usize,
    closed: u128,
    chosen: &mut Vec<(u32, u32)>,
    visit: &mut impl FnMut(&[(u32, u32)]),
) {
    visit(chosen);
    for idx in start..c.edges.len() {
        let (a, b) = c.edges[idx];
        // endpoints must avoid every matched vertex and its neighbourhood
        if closed >> a & 1 == 1 || closed >> b & 1 == 1 {
            continue;
        }
        let next = closed | 1 << a | 1 << b | c.nbr[a] | c.nbr[b];
        chosen.push((c.ids[a], c.ids[b]));
        induced_rec(c, idx + 1, next, chosen, visit);
        chosen.pop();
    }
}

/// Number of induced matchings of each size `0..=n/2`.
pub fn count_induced_oracle(g: &Graph, limits: OracleLimits) -> Result<Vec<BigUint>> {
    let mut counts = vec![0u64; g.n() as usize / 2 + 1];
    for_each_induced_matching(g, limits, |m| counts[m.len()] += 1)?;
    Ok(counts.into_iter().map(BigUint::from).collect())
}

/// Maximum acyclic matching size plus one witness, by branch and bound.
pub fn max_acyclic_oracle(g: &Graph, limits: OracleLimits) -> Result<(usize, Matching)> {
    limits.check(g)?;
    let c = compact(g)?;
    let m = c.edges.len();
    let mut suffix = vec![0u128; m + 1];
    for idx in (0..m).rev() {
        let (a, b) = c.edges[idx];
        suffix[idx] = suffix[idx + 1] | 1 << a | 1 << b;
    }
    let mut s = AcyclicSearch {
        c: &c,
        suffix,
        best: 0,
        best_set: Vec::new(),
        chosen: Vec::new(),
    };
    let parent: Vec<u8> = (0..c.ids.len() as u16).map(|x| x as u8).collect();
    s.rec(0, 0, parent);
    let witness = Matching::new(s.best_set.iter().map(|&(a, b)| (c.ids[a], c.ids[b])))?;
    Ok((s.best, witness))
}

struct AcyclicSearch<'a> {
    c: &'a Compact,
    suffix: Vec<u128>,
    best: usize,
    best_set: Vec<(usize, usize)>,
    chosen: Vec<(usize, usize)>,
}

fn find(parent: &mut [u8], mut x: usize) -> usize {
    while parent[x] as usize != x {
        let p = parent[x] as usize;
        parent[x] = parent[p];
        x = p;
    }
    x
}

impl AcyclicSearch<'_> {
    fn rec(&mut self, idx: usize, covered: u128, parent: Vec<u8>) {
        if self.chosen.len() > self.best {
            self.best = self.chosen.len();
            self.best_set = self.chosen.clone();
        }
        if idx == self.c.edges.len() {
            return;
        }
        let free = (self.suffix[idx] & !covered).count_ones() as usize / 2;
        if self.chosen.len() + free.min(self.c.edges.len() - idx) <= self.best {
            return;
        }
        let (a, b) = self.c.edges[idx];
        if covered >> a & 1 == 0 && covered >> b & 1 == 0 {
            if let Some(p) = self.add_pair(a, b, covered, &parent) {
                self.chosen.push((a, b));
                self.rec(idx + 1, covered | 1 << a | 1 << b, p);
                self.chosen.pop();
            }
        }
        self.rec(idx + 1, covered, parent);
    }

    /// Union-find after adding `a` and `b` to the covered set, or `None`
    /// if the induced subgraph would contain a cycle.
    fn add_pair(&self, a: usize, b: usize, covered: u128, parent: &[u8]) -> Option<Vec<u8>> {
        let mut p = parent.to_vec();
        let mut inside = covered;
        for x in [a, b] {
            let mut nb = self.c.nbr[x] & inside;
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                let (rx, ry) = (find(&mut p, x), find(&mut p, y));
                if rx == ry {
                    return None;
                }
                p[rx] = ry as u8;
            }
            inside |= 1 << x;
        }
        Some(p)
    }
}
