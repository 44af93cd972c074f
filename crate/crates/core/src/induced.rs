//! Counting induced matchings of every size over an irredundant
//! clique-width expression in `O*(3^cw)` table entries.
//!
//! A table maps `(k, σ)` to the number of partial matchings with `k`
//! vertices and signature `σ ∈ {0,1,2}^cw`. After [`zeta_expand`] the digit
//! 1 is read as the merged state "0 or 1"; [`mobius_contract`] undoes it.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::convolution::Convolver;
use crate::cwexpr::{ensure_irredundant, CwExpr, LabeledGraph, Node};
use crate::error::{input, Error, Result};
use crate::stats::SolveStats;

pub const DEFAULT_MAX_WIDTH: u32 = 20;

/// One value in `{0,1,2}` per label; `digits[w]` belongs to label `w + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(pub Vec<u8>);

impl Signature {
    pub fn zeros(width: u32) -> Signature {
        Signature(vec![0; width as usize])
    }

    /// Radix-3 address, label 1 least significant.
    pub fn index(&self) -> usize {
        self.0.iter().rev().fold(0, |acc, &d| acc * 3 + d as usize)
    }

    pub fn from_index(mut idx: usize, width: u32) -> Signature {
        let mut d = Vec::with_capacity(width as usize);
        for _ in 0..width {
            d.push((idx % 3) as u8);
            idx /= 3;
        }
        Signature(d)
    }

    /// Value for label `l` (1-based).
    pub fn get(&self, l: u32) -> u8 {
        self.0[l as usize - 1]
    }
}

fn pow3(e: u32) -> usize {
    3usize.pow(e)
}

fn digit(idx: usize, w: u32) -> u8 {
    (idx / pow3(w) % 3) as u8
}

#[derive(Debug, Clone)]
enum Slice {
    Sparse(BTreeMap<usize, BigUint>),
    Dense { values: Vec<BigUint>, nonzero: usize },
}

impl Slice {
    fn nonzero(&self) -> usize {
        match self {
            Slice::Sparse(m) => m.len(),
            Slice::Dense { nonzero, .. } => *nonzero,
        }
    }

    fn stored(&self) -> usize {
        match self {
            Slice::Sparse(m) => m.len(),
            Slice::Dense { values, .. } => values.len(),
        }
    }

    fn get(&self, idx: usize) -> Option<&BigUint> {
        match self {
            Slice::Sparse(m) => m.get(&idx),
            Slice::Dense { values, .. } => values.get(idx).filter(|v| !v.is_zero()),
        }
    }

    fn iter(&self) -> Box<dyn Iterator<Item = (usize, &BigUint)> + '_> {
        match self {
            Slice::Sparse(m) => Box::new(m.iter().map(|(&k, v)| (k, v))),
            Slice::Dense { values, .. } => Box::new(
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero()),
            ),
        }
    }

    fn add(&mut self, idx: usize, v: &BigUint) {
        if v.is_zero() {
            return;
        }
        match self {
            Slice::Sparse(m) => *m.entry(idx).or_default() += v,
            Slice::Dense { values, nonzero } => {
                if values[idx].is_zero() {
                    *nonzero += 1;
                }
                values[idx] += v;
            }
        }
    }

    fn sub(&mut self, idx: usize, v: &BigUint) -> Result<()> {
        if v.is_zero() {
            return Ok(());
        }
        let slot = match self {
            Slice::Sparse(m) => m.get_mut(&idx),
            Slice::Dense { values, .. } => values.get_mut(idx),
        };
        let Some(slot) = slot.filter(|s| &**s >= v) else {
            return Err(Error::Internal(format!(
                "negative count while contracting signature index {idx}"
            )));
        };
        *slot -= v;
        if slot.is_zero() {
            match self {
                Slice::Sparse(m) => {
                    m.remove(&idx);
                }
                Slice::Dense { nonzero, .. } => *nonzero -= 1,
            }
        }
        Ok(())
    }

    /// Dense once at least 5% of the `full` signatures are populated.
    fn rebalance(&mut self, full: usize) {
        let dense_wanted = self.nonzero() * 20 >= full;
        match self {
            Slice::Sparse(m) if dense_wanted => {
                let mut values = vec![BigUint::zero(); full];
                let nonzero = m.len();
                for (k, v) in std::mem::take(m) {
                    values[k] = v;
                }
                *self = Slice::Dense { values, nonzero };
            }
            Slice::Dense { values, .. } if !dense_wanted => {
                let m = std::mem::take(values)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
                *self = Slice::Sparse(m);
            }
            _ => {}
        }
    }
}

/// Counts indexed by `(k, signature index)`; absent entries are zero.
#[derive(Debug, Clone)]
pub struct SignatureTable {
    width: u32,
    slices: BTreeMap<usize, Slice>,
}

impl PartialEq for SignatureTable {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.entries().eq(other.entries())
    }
}

impl Eq for SignatureTable {}

impl SignatureTable {
    pub fn new(width: u32) -> SignatureTable {
        SignatureTable {
            width,
            slices: BTreeMap::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn get(&self, k: usize, sig: &Signature) -> BigUint {
        self.get_index(k, sig.index())
    }

    pub fn get_index(&self, k: usize, idx: usize) -> BigUint {
        self.slices
            .get(&k)
            .and_then(|s| s.get(idx))
            .cloned()
            .unwrap_or_default()
    }

    pub fn add(&mut self, k: usize, idx: usize, v: &BigUint) {
        if v.is_zero() {
            return;
        }
        self.slices
            .entry(k)
            .or_insert_with(|| Slice::Sparse(BTreeMap::new()))
            .add(idx, v);
    }

    /// Nonzero entries as `(k, index, count)` in increasing order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> + '_ {
        self.slices
            .iter()
            .flat_map(|(&k, s)| s.iter().map(move |(i, v)| (k, i, v)))
    }

    pub fn nonzero_entries(&self) -> usize {
        self.slices.values().map(Slice::nonzero).sum()
    }

    /// Entries held in memory, counting every slot of dense slices.
    pub fn stored_entries(&self) -> usize {
        self.slices.values().map(Slice::stored).sum()
    }

    fn finish(mut self) -> SignatureTable {
        let full = pow3(self.width);
        self.slices.retain(|_, s| s.nonzero() > 0);
        for s in self.slices.values_mut() {
            s.rebalance(full);
        }
        self
    }
}

fn check_label(t: &SignatureTable, l: u32) -> Result<()> {
    if l == 0 || l > t.width {
        return input(format!("label {l} outside 1..={}", t.width));
    }
    Ok(())
}

pub fn dp_singleton(label: u32, width: u32) -> Result<SignatureTable> {
    if label == 0 || label > width {
        return input(format!("label {label} outside 1..={width}"));
    }
    let mut t = SignatureTable::new(width);
    let one = BigUint::from(1u32);
    t.add(0, 0, &one);
    t.add(1, 2 * pow3(label - 1), &one);
    Ok(t.finish())
}

/// Effect of `η_{i,j}`: a pair of unsaturated singletons becomes a matched
/// edge; any other join that touches partial-matching vertices on both
/// sides is infeasible.
pub fn dp_join(t: &SignatureTable, i: u32, j: u32) -> Result<SignatureTable> {
    check_label(t, i)?;
    check_label(t, j)?;
    if i == j {
        return input("join needs distinct labels");
    }
    let (wi, wj) = (i - 1, j - 1);
    let mut out = SignatureTable::new(t.width);
    for (k, idx, v) in t.entries() {
        match (digit(idx, wi), digit(idx, wj)) {
            (0, _) | (_, 0) => out.add(k, idx, v),
            (2, 2) => out.add(k, idx - pow3(wi) - pow3(wj), v),
            _ => {}
        }
    }
    Ok(out.finish())
}

/// Effect of `ρ_{i→j}`.
pub fn dp_relabel(t: &SignatureTable, i: u32, j: u32) -> Result<SignatureTable> {
    check_label(t, i)?;
    check_label(t, j)?;
    if i == j {
        return input("relabel needs distinct labels");
    }
    let (wi, wj) = (i - 1, j - 1);
    let mut out = SignatureTable::new(t.width);
    for (k, idx, v) in t.entries() {
        let (a, b) = (digit(idx, wi), digit(idx, wj));
        let merged = match (a, b) {
            (0, x) | (x, 0) => x,
            (1, 1) => 1,
            _ => continue,
        };
        let base = idx - a as usize * pow3(wi) - b as usize * pow3(wj);
        out.add(k, base + merged as usize * pow3(wj), v);
    }
    Ok(out.finish())
}

/// Per coordinate, the merged state (digit 1) becomes the sum of the
/// exact 0- and 1-entries.
pub fn zeta_expand(t: &SignatureTable) -> SignatureTable {
    let mut out = t.clone();
    for w in 0..t.width {
        let stride = pow3(w);
        for s in out.slices.values_mut() {
            let zeros: Vec<(usize, BigUint)> = s
                .iter()
                .filter(|(idx, _)| digit(*idx, w) == 0)
                .map(|(idx, v)| (idx, v.clone()))
                .collect();
            for (idx, v) in zeros {
                s.add(idx + stride, &v);
            }
        }
    }
    out.finish()
}

/// Inverse of [`zeta_expand`].
pub fn mobius_contract(t: &SignatureTable) -> Result<SignatureTable> {
    let mut out = t.clone();
    for w in 0..t.width {
        let stride = pow3(w);
        for s in out.slices.values_mut() {
            let zeros: Vec<(usize, BigUint)> = s
                .iter()
                .filter(|(idx, _)| digit(*idx, w) == 0)
                .map(|(idx, v)| (idx, v.clone()))
                .collect();
            for (idx, v) in zeros {
                s.sub(idx + stride, &v)?;
            }
        }
    }
    Ok(out.finish())
}

/// Per size `k`, the polynomials `P^r` restricted to exponents of popcount `r`.
type Polys = Vec<(usize, Vec<(u32, Vec<BigUint>)>)>;

fn split_by_popcount(t: &SignatureTable, idx_of: &[usize], d: u32) -> Polys {
    let mut out = Vec::new();
    for (&k, s) in &t.slices {
        let mut by_r: Vec<Vec<BigUint>> = vec![Vec::new(); d as usize + 1];
        for (b, &idx) in idx_of.iter().enumerate() {
            if let Some(v) = s.get(idx) {
                let p = &mut by_r[b.count_ones() as usize];
                if p.len() <= b {
                    p.resize(b + 1, BigUint::zero());
                }
                p[b] = v.clone();
            }
        }
        let polys: Vec<(u32, Vec<BigUint>)> = by_r
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(r, p)| (r as u32, p))
            .collect();
        if !polys.is_empty() {
            out.push((k, polys));
        }
    }
    out
}

/// Combines two expanded tables of disjoint graphs into the expanded table
/// of their union.
///
/// For a set `A` of merged coordinates, the remaining coordinates are
/// encoded as bits (value 2 ↦ 1), lowest label first. Multiplying the
/// popcount-restricted polynomials and keeping exponents whose popcount is
/// `r1 + r2` keeps exactly the carry-free sums, i.e. the pairs that never
/// place a 2 on the same coordinate twice.
pub fn union_convolve(
    ta: &SignatureTable,
    tb: &SignatureTable,
    conv: &Convolver,
) -> Result<SignatureTable> {
    if ta.width != tb.width {
        return input("union of tables with different widths");
    }
    let width = ta.width;
    let parts: Vec<Vec<(usize, usize, BigUint)>> = (0u64..1 << width)
        .into_par_iter()
        .map(|a_mask| {
            let free: Vec<u32> = (0..width).filter(|w| a_mask >> w & 1 == 0).collect();
            let d = free.len() as u32;
            let base: usize = (0..width)
                .filter(|w| a_mask >> w & 1 == 1)
                .map(pow3)
                .sum();
            let idx_of: Vec<usize> = (0..1usize << d)
                .map(|b| {
                    base + free
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| b >> t & 1 == 1)
                        .map(|(_, &w)| 2 * pow3(w))
                        .sum::<usize>()
                })
                .collect();
            let pa = split_by_popcount(ta, &idx_of, d);
            let pb = split_by_popcount(tb, &idx_of, d);
            let mut acc: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
            for (k1, polys1) in &pa {
                for (k2, polys2) in &pb {
                    for (r1, p1) in polys1 {
                        for (r2, p2) in polys2 {
                            let r = r1 + r2;
                            if r > d {
                                continue;
                            }
                            let prod = conv.multiply(p1, p2);
                            for (b, c) in prod.into_iter().enumerate().take(idx_of.len()) {
                                if !c.is_zero() && (b as u64).count_ones() == r {
                                    *acc.entry((k1 + k2, idx_of[b])).or_default() += c;
                                }
                            }
                        }
                    }
                }
            }
            acc.into_iter().map(|((k, i), v)| (k, i, v)).collect()
        })
        .collect();
    let mut out = SignatureTable::new(width);
    for part in parts {
        for (k, idx, v) in part {
            out.add(k, idx, &v);
        }
    }
    Ok(out.finish())
}

pub fn dp_union(ta: &SignatureTable, tb: &SignatureTable, conv: &Convolver) -> Result<SignatureTable> {
    mobius_contract(&union_convolve(&zeta_expand(ta), &zeta_expand(tb), conv)?)
}

/// Signature of `s` in `h`, or `None` where some class is in none of the
/// three states. Vertex ids are those of `h`.
pub fn signature_of(h: &LabeledGraph, width: u32, s: &BTreeSet<u32>) -> Option<Signature> {
    let mut sig = Signature::zeros(width);
    for l in 1..=width {
        let in_class: Vec<u32> = s.iter().copied().filter(|&v| h.label(v) == l).collect();
        if in_class.is_empty() {
            continue;
        }
        let degs: Vec<usize> = in_class
            .iter()
            .map(|&v| h.graph.neighbors(v).iter().filter(|u| s.contains(u)).count())
            .collect();
        sig.0[l as usize - 1] = if degs.iter().all(|&d| d == 1) {
            1
        } else if in_class.len() == 1 && degs[0] == 0 {
            2
        } else {
            return None;
        };
    }
    Some(sig)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InducedConfig {
    pub convolver: Convolver,
    pub max_width: u32,
}

impl Default for InducedConfig {
    fn default() -> Self {
        InducedConfig {
            convolver: Convolver::default(),
            max_width: DEFAULT_MAX_WIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InducedSolution {
    /// `counts[ℓ]` induced matchings with `ℓ` edges, for `ℓ ∈ 0..=n/2`.
    pub counts: Vec<BigUint>,
    pub stats: SolveStats,
}

impl InducedSolution {
    /// Largest `ℓ` with a nonzero count.
    pub fn max_size(&self) -> usize {
        self.counts.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
}

pub fn solve_counts(e: &CwExpr, cfg: &InducedConfig) -> Result<InducedSolution> {
    solve_counts_observed(e, cfg, |_, _| {})
}

/// Like [`solve_counts`], handing every node's table to `observe` in arena order.
pub fn solve_counts_observed(
    e: &CwExpr,
    cfg: &InducedConfig,
    mut observe: impl FnMut(usize, &SignatureTable),
) -> Result<InducedSolution> {
    let width = e.width();
    if width > cfg.max_width {
        return Err(Error::Limit(format!(
            "expression width {width} exceeds the configured maximum {}",
            cfg.max_width
        )));
    }
    ensure_irredundant(e)?;
    let mut stats = SolveStats {
        width,
        vertices: e.vertex_count(),
        ..SolveStats::default()
    };
    let mut tables: Vec<Option<SignatureTable>> = vec![None; e.nodes().len()];
    for (idx, &node) in e.nodes().iter().enumerate() {
        let start = Instant::now();
        let mut take = |c: usize| tables[c].take().expect("child table computed");
        let t = match node {
            Node::Intro(l) => {
                let t = dp_singleton(l, width)?;
                stats.singleton.record(start.elapsed());
                t
            }
            Node::Join(i, j, c) => {
                let t = dp_join(&take(c), i, j)?;
                stats.join.record(start.elapsed());
                t
            }
            Node::Relabel(i, j, c) => {
                let t = dp_relabel(&take(c), i, j)?;
                stats.relabel.record(start.elapsed());
                t
            }
            Node::Union(a, b) => {
                let (ta, tb) = (take(a), take(b));
                let t = dp_union(&ta, &tb, &cfg.convolver)?;
                stats.union.record(start.elapsed());
                t
            }
        };
        stats.peak_table_entries = stats.peak_table_entries.max(t.stored_entries());
        observe(idx, &t);
        tables[idx] = Some(t);
    }
    let root = tables[e.root()].take().expect("root table computed");
    let n = e.vertex_count() as usize;
    let mut counts = vec![BigUint::zero(); n / 2 + 1];
    for (k, idx, v) in root.entries() {
        let matched_only = (0..width).all(|w| digit(idx, w) < 2);
        if k % 2 == 0 && matched_only {
            counts[k / 2] += v;
        }
    }
    Ok(InducedSolution { counts, stats })
}
