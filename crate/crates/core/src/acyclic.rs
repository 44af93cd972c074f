//! Maximum (weighted) acyclic matching over an irredundant clique-width
//! expression.
//!
//! Tables map a Γ-signature to a set of weighted partitions over the live
//! labels (states ~1, 1, ~2, 2) plus atom 0 for the universal vertex `v0`.
//! Every recurrence is applied forward: each child entry pushes its
//! contribution to the output signatures it can produce.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::cwexpr::{ensure_irredundant, CwExpr, Node};
use crate::error::{input, Error, Result};
use crate::partition::{AtomSet, Partition, Reduction, WeightedPartitionSet};
use crate::stats::SolveStats;

pub const DEFAULT_MAX_WIDTH: u32 = 12;

/// Per-label state of a partial solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gamma {
    /// Class untouched.
    Zero,
    /// One vertex, unsaturated.
    OneTilde,
    /// One vertex, saturated.
    One,
    /// At least two vertices, exactly one unsaturated.
    TwoTilde,
    /// At least two vertices, all saturated, awaiting exactly one join.
    Two,
    /// At least two vertices, all saturated, no further join allowed.
    MinusTwo,
}

use Gamma::*;

impl Gamma {
    pub const ALL: [Gamma; 6] = [Zero, OneTilde, One, TwoTilde, Two, MinusTwo];

    pub fn digit(self) -> u64 {
        self as u64
    }

    pub fn from_digit(d: u64) -> Gamma {
        Gamma::ALL[d as usize]
    }

    /// Whether the label is an atom of the partition ground set.
    pub fn is_live(self) -> bool {
        matches!(self, OneTilde | One | TwoTilde | Two)
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Zero => "0",
            OneTilde => "~1",
            One => "1",
            TwoTilde => "~2",
            Two => "2",
            MinusTwo => "-2",
        })
    }
}

/// States after `η_{i,j}` given the states `(a, b)` of `i` and `j` before it.
pub fn f_apply(a: Gamma, b: Gamma) -> &'static [(Gamma, Gamma)] {
    match (a, b) {
        (Zero, Zero) => &[(Zero, Zero)],
        (Zero, OneTilde) => &[(Zero, OneTilde)],
        (Zero, One) => &[(Zero, One)],
        (Zero, TwoTilde) => &[(Zero, TwoTilde)],
        (Zero, Two) => &[(Zero, Two)],
        (Zero, MinusTwo) => &[(Zero, MinusTwo)],
        (OneTilde, Zero) => &[(OneTilde, Zero)],
        (OneTilde, OneTilde) => &[(OneTilde, OneTilde), (One, One)],
        (OneTilde, One) => &[(OneTilde, One)],
        (OneTilde, TwoTilde) => &[(One, MinusTwo)],
        (OneTilde, Two) => &[(OneTilde, MinusTwo)],
        (One, Zero) => &[(One, Zero)],
        (One, OneTilde) => &[(One, OneTilde)],
        (One, One) => &[(One, One)],
        (One, Two) => &[(One, MinusTwo)],
        (TwoTilde, Zero) => &[(TwoTilde, Zero)],
        (TwoTilde, OneTilde) => &[(MinusTwo, One)],
        (Two, Zero) => &[(Two, Zero)],
        (Two, OneTilde) => &[(MinusTwo, OneTilde)],
        (Two, One) => &[(MinusTwo, One)],
        (MinusTwo, Zero) => &[(MinusTwo, Zero)],
        _ => &[],
    }
}

/// All `(a', b')` with `(a, b) ∈ f(a', b')`.
pub fn f_lookup(a: Gamma, b: Gamma) -> Vec<(Gamma, Gamma)> {
    pairs().filter(|&(x, y)| f_apply(x, y).contains(&(a, b))).collect()
}

/// State of a merged class given the states of its two parts.
pub fn g_apply(a: Gamma, b: Gamma) -> &'static [Gamma] {
    match (a, b) {
        (Zero, x) | (x, Zero) => match x {
            Zero => &[Zero],
            OneTilde => &[OneTilde],
            One => &[One],
            TwoTilde => &[TwoTilde],
            Two => &[Two],
            MinusTwo => &[MinusTwo],
        },
        (OneTilde, One) | (One, OneTilde) => &[TwoTilde],
        (OneTilde, Two) | (Two, OneTilde) => &[TwoTilde],
        (One, One) => &[Two, MinusTwo],
        (One, TwoTilde) | (TwoTilde, One) => &[TwoTilde],
        (One, Two) | (Two, One) => &[Two],
        (One, MinusTwo) | (MinusTwo, One) => &[MinusTwo],
        (TwoTilde, Two) | (Two, TwoTilde) => &[TwoTilde],
        (Two, Two) => &[Two],
        (MinusTwo, MinusTwo) => &[MinusTwo],
        _ => &[],
    }
}

/// All `(a', b')` with `c ∈ g(a', b')`.
pub fn g_lookup(c: Gamma) -> Vec<(Gamma, Gamma)> {
    pairs().filter(|&(x, y)| g_apply(x, y).contains(&c)).collect()
}

fn pairs() -> impl Iterator<Item = (Gamma, Gamma)> {
    Gamma::ALL
        .into_iter()
        .flat_map(|x| Gamma::ALL.into_iter().map(move |y| (x, y)))
}

/// A Γ-signature packed as a radix-6 integer, label 1 least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaSignature(pub u64);

impl GammaSignature {
    pub fn zero() -> GammaSignature {
        GammaSignature(0)
    }

    pub fn from_states(states: &[Gamma]) -> GammaSignature {
        GammaSignature(states.iter().rev().fold(0, |acc, g| acc * 6 + g.digit()))
    }

    pub fn states(self, width: u32) -> Vec<Gamma> {
        (1..=width).map(|l| self.get(l)).collect()
    }

    /// State of label `l` (1-based).
    pub fn get(self, l: u32) -> Gamma {
        Gamma::from_digit(self.0 / 6u64.pow(l - 1) % 6)
    }

    pub fn with(self, l: u32, g: Gamma) -> GammaSignature {
        let p = 6u64.pow(l - 1);
        GammaSignature(self.0 - self.get(l).digit() * p + g.digit() * p)
    }

    /// Ground set of the partitions stored under this signature.
    pub fn ground(self, width: u32) -> AtomSet {
        (1..=width)
            .filter(|&l| self.get(l).is_live())
            .fold(1, |m, l| m | 1 << l)
    }

    /// Labels in state γ−2, as an atom set.
    pub fn minus_two(self, width: u32) -> AtomSet {
        (1..=width)
            .filter(|&l| self.get(l) == MinusTwo)
            .fold(0, |m, l| m | 1 << l)
    }
}

/// Sparse table: only signatures with non-empty sets are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicTable {
    width: u32,
    entries: BTreeMap<GammaSignature, WeightedPartitionSet>,
}

impl AcyclicTable {
    pub fn new(width: u32) -> AcyclicTable {
        AcyclicTable {
            width,
            entries: BTreeMap::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn get(&self, s: GammaSignature) -> Option<&WeightedPartitionSet> {
        self.entries.get(&s)
    }

    pub fn entries(&self) -> impl Iterator<Item = (GammaSignature, &WeightedPartitionSet)> + '_ {
        self.entries.iter().map(|(s, w)| (*s, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of weighted partitions over all signatures.
    pub fn pair_count(&self) -> usize {
        self.entries.values().map(WeightedPartitionSet::len).sum()
    }
}

fn check_labels(width: u32, i: u32, j: u32) -> Result<()> {
    if i == 0 || j == 0 || i > width || j > width {
        return input(format!("labels {i},{j} outside 1..={width}"));
    }
    if i == j {
        return input("labels must differ");
    }
    Ok(())
}

/// Pending contributions per output signature.
struct Collector {
    width: u32,
    sets: BTreeMap<GammaSignature, WeightedPartitionSet>,
}

impl Collector {
    fn new(width: u32) -> Collector {
        Collector {
            width,
            sets: BTreeMap::new(),
        }
    }

    fn push(&mut self, s: GammaSignature, set: WeightedPartitionSet) -> Result<()> {
        if set.is_empty() {
            return Ok(());
        }
        if set.ground() != s.ground(self.width) {
            return Err(Error::Internal(format!(
                "set under signature {} has the wrong ground set",
                s.0
            )));
        }
        match self.sets.get_mut(&s) {
            Some(acc) => acc.extend(set),
            None => {
                self.sets.insert(s, set);
                Ok(())
            }
        }
    }

    fn finish(self, how: Reduction) -> AcyclicTable {
        let entries: Vec<(GammaSignature, WeightedPartitionSet)> = self
            .sets
            .into_par_iter()
            .map(|(s, set)| (s, set.acreduce(how)))
            .collect();
        AcyclicTable {
            width: self.width,
            entries: entries.into_iter().filter(|(_, w)| !w.is_empty()).collect(),
        }
    }
}

fn edge_set(i: u32, j: u32) -> WeightedPartitionSet {
    let g = 1 << i | 1 << j;
    WeightedPartitionSet::from_pairs(g, [(Partition::whole(g), 0)]).expect("valid pair")
}

pub fn acdp_singleton(label: u32, weight: u64, width: u32) -> Result<AcyclicTable> {
    if label == 0 || label > width {
        return input(format!("label {label} outside 1..={width}"));
    }
    let mut t = AcyclicTable::new(width);
    let v0 = 1u32;
    let empty = WeightedPartitionSet::from_pairs(v0, [(Partition::whole(v0), 0)])?;
    t.entries.insert(GammaSignature::zero(), empty);
    let g = v0 | 1 << label;
    let one = WeightedPartitionSet::from_pairs(
        g,
        [
            (Partition::whole(g), weight),
            (Partition::singletons(g), weight),
        ],
    )?;
    t.entries
        .insert(GammaSignature::zero().with(label, OneTilde), one);
    Ok(t)
}

pub fn acdp_join(t: &AcyclicTable, i: u32, j: u32, how: Reduction) -> Result<AcyclicTable> {
    let w = t.width;
    check_labels(w, i, j)?;
    let ij = edge_set(i, j);
    let mut out = Collector::new(w);
    for (s, set) in t.entries() {
        let (a, b) = (s.get(i), s.get(j));
        if a == Zero || b == Zero {
            out.push(s, set.clone())?;
            continue;
        }
        for &(x, y) in f_apply(a, b) {
            let target = s.with(i, x).with(j, y);
            let x_set = target.minus_two(w) & (1 << i | 1 << j);
            out.push(target, set.acjoin(&ij).proj(x_set)?)?;
        }
    }
    Ok(out.finish(how))
}

pub fn acdp_relabel(t: &AcyclicTable, i: u32, j: u32, how: Reduction) -> Result<AcyclicTable> {
    let w = t.width;
    check_labels(w, i, j)?;
    let ij = edge_set(i, j);
    let mut out = Collector::new(w);
    for (s, set) in t.entries() {
        let (a, b) = (s.get(i), s.get(j));
        if a == Zero {
            out.push(s, set.clone())?;
        } else if b == Zero {
            let target = s.with(i, Zero).with(j, a);
            let moved = if a == MinusTwo {
                set.clone()
            } else {
                set.acjoin(&ij).proj(1 << i)?
            };
            out.push(target, moved)?;
        } else {
            for &c in g_apply(a, b) {
                let target = s.with(i, Zero).with(j, c);
                let merged = if c == MinusTwo {
                    set.proj((1 << i | 1 << j) & set.ground())?
                } else {
                    set.acjoin(&ij).proj(1 << i)?
                };
                out.push(target, merged)?;
            }
        }
    }
    Ok(out.finish(how))
}

pub fn acdp_union(t1: &AcyclicTable, t2: &AcyclicTable, how: Reduction) -> Result<AcyclicTable> {
    if t1.width != t2.width {
        return input("union of tables with different widths");
    }
    let w = t1.width;
    let right: Vec<(GammaSignature, &WeightedPartitionSet)> = t2.entries().collect();
    let parts: Vec<Result<Vec<(GammaSignature, WeightedPartitionSet)>>> = t1
        .entries
        .par_iter()
        .map(|(&s1, set1)| {
            let mut local = Vec::new();
            for &(s2, set2) in &right {
                let mut options: Vec<&[Gamma]> = Vec::with_capacity(w as usize);
                for l in 1..=w {
                    let g = g_apply(s1.get(l), s2.get(l));
                    if g.is_empty() {
                        break;
                    }
                    options.push(g);
                }
                if options.len() < w as usize {
                    continue;
                }
                let mut targets = vec![GammaSignature::zero()];
                for (k, opts) in options.iter().enumerate() {
                    let l = k as u32 + 1;
                    targets = targets
                        .into_iter()
                        .flat_map(|t| opts.iter().map(move |&g| t.with(l, g)))
                        .collect();
                }
                for s in targets {
                    let x = s.minus_two(w);
                    let a = set1.proj(x & set1.ground())?;
                    let b = set2.proj(x & set2.ground())?;
                    local.push((s, a.acjoin(&b)));
                }
            }
            Ok(local)
        })
        .collect();
    let mut out = Collector::new(w);
    for part in parts {
        for (s, set) in part? {
            out.push(s, set)?;
        }
    }
    Ok(out.finish(how))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcyclicConfig {
    pub reduction: Reduction,
    pub max_width: u32,
}

impl Default for AcyclicConfig {
    fn default() -> Self {
        AcyclicConfig {
            reduction: Reduction::Rmc,
            max_width: DEFAULT_MAX_WIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcyclicSolution {
    /// Maximum total weight of the matched vertices.
    pub max_weight: u64,
    pub stats: SolveStats,
}

impl AcyclicSolution {
    /// Number of matching edges under unit weights.
    pub fn max_matching_size(&self) -> u64 {
        self.max_weight / 2
    }
}

/// Unit vertex weights.
pub fn solve_max_acyclic(e: &CwExpr, cfg: &AcyclicConfig) -> Result<AcyclicSolution> {
    let weights = vec![1; e.vertex_count() as usize + 1];
    solve_max_acyclic_observed(e, &weights, cfg, |_, _| {})
}

/// `weights[v]` is the weight of vertex `v` (slot 0 unused).
pub fn solve_max_acyclic_weighted(
    e: &CwExpr,
    weights: &[u64],
    cfg: &AcyclicConfig,
) -> Result<AcyclicSolution> {
    solve_max_acyclic_observed(e, weights, cfg, |_, _| {})
}

/// Best weight at the root among signatures without ~1, ~2 or 2 states.
pub fn extract_max(root: &AcyclicTable) -> u64 {
    extract_with(root, false)
}

/// As [`extract_max`] but also admitting γ2 states, read as γ−2.
pub fn extract_max_lenient(root: &AcyclicTable) -> u64 {
    extract_with(root, true)
}

fn extract_with(root: &AcyclicTable, allow_two: bool) -> u64 {
    let w = root.width;
    root.entries()
        .filter(|(s, _)| {
            (1..=w).all(|l| match s.get(l) {
                Zero | One | MinusTwo => true,
                Two => allow_two,
                _ => false,
            })
        })
        .filter_map(|(s, set)| {
            let whole = Partition::whole(s.ground(w));
            set.entries()
                .iter()
                .filter(|(p, _)| *p == whole)
                .map(|(_, wt)| *wt)
                .max()
        })
        .max()
        .unwrap_or(0)
}

pub fn solve_max_acyclic_observed(
    e: &CwExpr,
    weights: &[u64],
    cfg: &AcyclicConfig,
    mut observe: impl FnMut(usize, &AcyclicTable),
) -> Result<AcyclicSolution> {
    let width = e.width();
    if width > cfg.max_width || width > 24 {
        return Err(Error::Limit(format!(
            "expression width {width} exceeds the configured maximum {}",
            cfg.max_width.min(24)
        )));
    }
    if weights.len() != e.vertex_count() as usize + 1 {
        return input("weight vector length does not match the vertex count");
    }
    ensure_irredundant(e)?;
    let mut stats = SolveStats {
        width,
        vertices: e.vertex_count(),
        ..SolveStats::default()
    };
    let how = cfg.reduction;
    let mut tables: Vec<Option<AcyclicTable>> = vec![None; e.nodes().len()];
    let mut next_vertex = 1usize;
    for (idx, &node) in e.nodes().iter().enumerate() {
        let start = Instant::now();
        let mut take = |c: usize| tables[c].take().expect("child table computed");
        let t = match node {
            Node::Intro(l) => {
                let t = acdp_singleton(l, weights[next_vertex], width)?;
                next_vertex += 1;
                stats.singleton.record(start.elapsed());
                t
            }
            Node::Join(i, j, c) => {
                let t = acdp_join(&take(c), i, j, how)?;
                stats.join.record(start.elapsed());
                t
            }
            Node::Relabel(i, j, c) => {
                let t = acdp_relabel(&take(c), i, j, how)?;
                stats.relabel.record(start.elapsed());
                t
            }
            Node::Union(a, b) => {
                let (ta, tb) = (take(a), take(b));
                let t = acdp_union(&ta, &tb, how)?;
                stats.union.record(start.elapsed());
                t
            }
        };
        stats.peak_table_entries = stats.peak_table_entries.max(t.pair_count());
        observe(idx, &t);
        tables[idx] = Some(t);
    }
    let root = tables[e.root()].take().expect("root table computed");
    Ok(AcyclicSolution {
        max_weight: extract_max(&root),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwexpr::parse;

    #[test]
    fn f_table_cells() {
        assert_eq!(f_apply(OneTilde, OneTilde), &[(OneTilde, OneTilde), (One, One)]);
        assert_eq!(f_apply(OneTilde, TwoTilde), &[(One, MinusTwo)]);
        assert!(f_apply(MinusTwo, OneTilde).is_empty());
        assert!(f_lookup(MinusTwo, MinusTwo).is_empty());
        assert_eq!(f_lookup(One, One), vec![(OneTilde, OneTilde), (One, One)]);
    }

    #[test]
    fn g_table_cells() {
        assert_eq!(g_apply(One, One), &[Two, MinusTwo]);
        assert_eq!(g_apply(OneTilde, One), &[TwoTilde]);
        assert!(g_apply(OneTilde, OneTilde).is_empty());
        for (a, b) in pairs() {
            assert_eq!(g_apply(a, b), g_apply(b, a));
        }
    }

    #[test]
    fn signature_packing() {
        let s = GammaSignature::from_states(&[One, Zero, MinusTwo]);
        assert_eq!(s.0, 2 + 5 * 36);
        assert_eq!(s.states(3), vec![One, Zero, MinusTwo]);
        assert_eq!(s.with(2, Two).get(2), Two);
        assert_eq!(s.ground(3), 0b11);
        assert_eq!(s.minus_two(3), 0b1000);
    }

    #[test]
    fn singleton_table() {
        let t = acdp_singleton(1, 7, 1).unwrap();
        assert_eq!(t.len(), 2);
        let one = t.get(GammaSignature::zero().with(1, OneTilde)).unwrap();
        assert_eq!(one.len(), 2);
        assert!(one.entries().iter().all(|(_, w)| *w == 7));
        assert!(t.get(GammaSignature::zero().with(1, Two)).is_none());
    }

    #[test]
    fn union_of_empty_signatures_keeps_v0() {
        let a = acdp_singleton(1, 1, 2).unwrap();
        let u = acdp_union(&a, &a, Reduction::Rmc).unwrap();
        let z = u.get(GammaSignature::zero()).unwrap();
        assert_eq!(z.entries(), &[(Partition::whole(1), 0)]);
    }

    #[test]
    fn small_expressions() {
        let cfg = AcyclicConfig::default();
        let s = solve_max_acyclic(&parse("(v 1)").unwrap(), &cfg).unwrap();
        assert_eq!((s.max_weight, s.max_matching_size()), (0, 0));
        let k2 = parse("(eta 1 2 (oplus (v 1) (v 2)))").unwrap();
        assert_eq!(solve_max_acyclic(&k2, &cfg).unwrap().max_weight, 2);
    }

    #[test]
    fn minus_two_pair_cannot_join() {
        let t = acdp_singleton(1, 1, 2).unwrap();
        let mut both = AcyclicTable::new(2);
        let s = GammaSignature::zero().with(1, MinusTwo).with(2, MinusTwo);
        both.entries.insert(s, WeightedPartitionSet::from_pairs(1, [(Partition::whole(1), 4)]).unwrap());
        let j = acdp_join(&both, 1, 2, Reduction::Rmc).unwrap();
        assert!(j.get(s).is_none());
        assert!(acdp_join(&t, 1, 1, Reduction::Rmc).is_err());
    }
}
