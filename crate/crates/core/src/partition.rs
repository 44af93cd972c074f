//! Weighted partitions of a small ground set and the operators used by the
//! acyclic-matching dynamic program.
//!
//! Atoms are integers `0..32`; atom 0 stands for the universal vertex `v0`.
//! Sets of atoms are `u32` bitmasks.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{input, Error, Result};

pub type AtomSet = u32;

pub fn atoms(set: AtomSet) -> impl Iterator<Item = u8> {
    (0..32u8).filter(move |a| set >> a & 1 == 1)
}

fn low(b: u32) -> u32 {
    b & b.wrapping_neg()
}

/// A partition in canonical form: blocks ordered by their smallest atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<AtomSet>,
}

impl Partition {
    pub fn new(mut blocks: Vec<AtomSet>) -> Result<Partition> {
        let mut seen = 0u32;
        for &b in &blocks {
            if b == 0 {
                return input("partition blocks must be non-empty");
            }
            if seen & b != 0 {
                return input("partition blocks must be disjoint");
            }
            seen |= b;
        }
        blocks.sort_unstable_by_key(|&b| low(b));
        Ok(Partition { blocks })
    }

    pub fn from_atoms(blocks: &[&[u8]]) -> Result<Partition> {
        let mut masks = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut m = 0u32;
            for &a in *b {
                if a >= 32 {
                    return input(format!("atom {a} out of range"));
                }
                m |= 1 << a;
            }
            masks.push(m);
        }
        Partition::new(masks)
    }

    /// Finest partition of `ground`.
    pub fn singletons(ground: AtomSet) -> Partition {
        Partition {
            blocks: atoms(ground).map(|a| 1 << a).collect(),
        }
    }

    /// Coarsest partition of `ground` (empty when `ground` is).
    pub fn whole(ground: AtomSet) -> Partition {
        Partition {
            blocks: if ground == 0 { vec![] } else { vec![ground] },
        }
    }

    pub fn blocks(&self) -> &[AtomSet] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground(&self) -> AtomSet {
        self.blocks.iter().fold(0, |a, b| a | b)
    }

    /// `p ↑ Y`: adds a singleton for each atom of `y` outside the ground set.
    pub fn lift(&self, y: AtomSet) -> Partition {
        let extra = y & !self.ground();
        if extra == 0 {
            return self.clone();
        }
        let mut blocks = self.blocks.clone();
        blocks.extend(atoms(extra).map(|a| 1u32 << a));
        blocks.sort_unstable_by_key(|&b| low(b));
        Partition { blocks }
    }

    /// `p ↓ X`: intersects every block with `x`, dropping empty ones.
    pub fn restrict(&self, x: AtomSet) -> Partition {
        Partition {
            blocks: self
                .blocks
                .iter()
                .map(|b| b & x)
                .filter(|&b| b != 0)
                .collect::<Vec<_>>(),
        }
        .recanonical()
    }

    fn recanonical(mut self) -> Partition {
        self.blocks.sort_unstable_by_key(|&b| low(b));
        self
    }

    /// True iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.ground() == other.ground()
            && self
                .blocks
                .iter()
                .all(|b| other.blocks.iter().any(|c| b & c == *b))
    }

    fn join_unchecked(&self, other: &Partition) -> Partition {
        let mut cur = self.blocks.clone();
        for &b in &other.blocks {
            let mut merged = b;
            cur.retain(|&x| {
                if x & merged != 0 {
                    merged |= x;
                    false
                } else {
                    true
                }
            });
            cur.push(merged);
        }
        Partition { blocks: cur }.recanonical()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let names: Vec<String> = atoms(*b)
                .map(|a| if a == 0 { "v0".to_string() } else { a.to_string() })
                .collect();
            write!(f, "{{{}}}", names.join(","))?;
        }
        Ok(())
    }
}

fn same_ground(p: &Partition, q: &Partition) -> Result<AtomSet> {
    let g = p.ground();
    if g != q.ground() {
        return input("partitions are over different ground sets");
    }
    Ok(g)
}

/// Finest common coarsening of two partitions of the same ground set.
pub fn lattice_join(p: &Partition, q: &Partition) -> Result<Partition> {
    same_ground(p, q)?;
    Ok(p.join_unchecked(q))
}

/// Whether the forests realising `p` and `q` can be merged without a cycle:
/// `|L| + |p ⊔ q| = |p| + |q|`.
pub fn acy(p: &Partition, q: &Partition) -> Result<bool> {
    let g = same_ground(p, q)?;
    Ok(acy_unchecked(g, p, q))
}

fn acy_unchecked(g: AtomSet, p: &Partition, q: &Partition) -> bool {
    g.count_ones() as usize + p.join_unchecked(q).block_count() == p.block_count() + q.block_count()
}

/// All partitions of `ground`, via restricted growth strings.
pub fn all_partitions(ground: AtomSet) -> Vec<Partition> {
    let ats: Vec<u8> = atoms(ground).collect();
    let mut out = Vec::new();
    let mut assign = vec![0usize; ats.len()];
    fn rec(k: usize, used: usize, ats: &[u8], assign: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if k == ats.len() {
            let mut blocks = vec![0u32; used];
            for (a, &b) in ats.iter().zip(assign.iter()) {
                blocks[b] |= 1 << a;
            }
            out.push(Partition { blocks }.recanonical());
            return;
        }
        for b in 0..=used {
            assign[k] = b;
            rec(k + 1, used.max(b + 1), ats, assign, out);
        }
    }
    rec(0, 0, &ats, &mut assign, &mut out);
    out
}

/// Strategy for [`WeightedPartitionSet::acreduce`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Only drop dominated duplicates.
    #[default]
    Rmc,
    /// Additionally keep a GF(2) row basis of the cut-consistency matrix
    /// per block count, heaviest rows first.
    Rank,
}

impl std::str::FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Reduction> {
        match s {
            "off" | "rmc" => Ok(Reduction::Rmc),
            "rank" => Ok(Reduction::Rank),
            _ => input(format!("unknown acreduce backend {s:?}")),
        }
    }
}

/// Rank reduction is skipped above this many atoms (the matrix has
/// `2^(|L|-1)` columns).
const RANK_MAX_ATOMS: u32 = 21;

/// Brute-force representation checks enumerate all partitions of at most
/// this many atoms.
pub const BRUTE_MAX_ATOMS: u32 = 8;

/// A set of (partition, weight) pairs over a fixed ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPartitionSet {
    ground: AtomSet,
    entries: Vec<(Partition, u64)>,
}

impl WeightedPartitionSet {
    pub fn empty(ground: AtomSet) -> WeightedPartitionSet {
        WeightedPartitionSet {
            ground,
            entries: Vec::new(),
        }
    }

    pub fn from_pairs(
        ground: AtomSet,
        pairs: impl IntoIterator<Item = (Partition, u64)>,
    ) -> Result<WeightedPartitionSet> {
        let mut s = WeightedPartitionSet::empty(ground);
        for (p, w) in pairs {
            s.insert(p, w)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, p: Partition, w: u64) -> Result<()> {
        if p.ground() != self.ground {
            return input(format!("partition {p} is not over the set's ground"));
        }
        self.entries.push((p, w));
        Ok(())
    }

    pub fn ground(&self) -> AtomSet {
        self.ground
    }

    pub fn entries(&self) -> &[(Partition, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends all pairs of `other` (same ground set).
    pub fn extend(&mut self, other: WeightedPartitionSet) -> Result<()> {
        if other.ground != self.ground && !other.is_empty() {
            return input("union of sets over different ground sets");
        }
        self.entries.extend(other.entries);
        Ok(())
    }

    /// Keeps the maximum weight per partition; output sorted by partition.
    pub fn rmc(&self) -> WeightedPartitionSet {
        let mut best: BTreeMap<&Partition, u64> = BTreeMap::new();
        for (p, w) in &self.entries {
            let e = best.entry(p).or_insert(*w);
            *e = (*e).max(*w);
        }
        WeightedPartitionSet {
            ground: self.ground,
            entries: best.into_iter().map(|(p, w)| (p.clone(), w)).collect(),
        }
    }

    /// `{(p↑L' ⊔ q↑L, w1 + w2) : acy(p↑L', q↑L)}` over `L ∪ L'`.
    pub fn acjoin(&self, other: &WeightedPartitionSet) -> WeightedPartitionSet {
        let ground = self.ground | other.ground;
        let lifted_b: Vec<(Partition, u64)> = other
            .entries
            .iter()
            .map(|(q, w)| (q.lift(self.ground), *w))
            .collect();
        let mut entries = Vec::new();
        for (p, w1) in &self.entries {
            let p = p.lift(other.ground);
            for (q, w2) in &lifted_b {
                if acy_unchecked(ground, &p, q) {
                    entries.push((p.join_unchecked(q), w1 + w2));
                }
            }
        }
        WeightedPartitionSet { ground, entries }
    }

    /// Drops pairs with a block inside `x`, restricts the rest to `L \ x`.
    pub fn proj(&self, x: AtomSet) -> Result<WeightedPartitionSet> {
        if x & !self.ground != 0 {
            return input("projection set is not inside the ground set");
        }
        let keep = self.ground & !x;
        let entries = self
            .entries
            .iter()
            .filter(|(p, _)| p.blocks.iter().all(|&b| b & !x != 0))
            .map(|(p, w)| (p.restrict(keep), *w))
            .collect();
        Ok(WeightedPartitionSet {
            ground: keep,
            entries,
        })
    }

    /// Best weight of a pair `p` with `p ⊔ q` a single block and
    /// `acy(p, q)`; `None` when no pair qualifies.
    pub fn acopt(&self, q: &Partition) -> Result<Option<u64>> {
        if q.ground() != self.ground {
            return input("query partition is not over the set's ground");
        }
        Ok(self
            .entries
            .iter()
            .filter(|(p, _)| {
                p.join_unchecked(q).block_count() == 1 && acy_unchecked(self.ground, p, q)
            })
            .map(|(_, w)| *w)
            .max())
    }

    /// Shrinks the set while preserving `acopt` for every query.
    pub fn acreduce(&self, how: Reduction) -> WeightedPartitionSet {
        let base = self.rmc();
        let m = self.ground.count_ones();
        if how == Reduction::Rmc || m == 0 || m > RANK_MAX_ATOMS {
            return base;
        }
        // acy with a one-block join forces |p| + |q| = |L| + 1, so queries
        // only ever see one block-count class at a time
        let mut by_blocks: BTreeMap<usize, Vec<(Partition, u64)>> = BTreeMap::new();
        for (p, w) in base.entries {
            by_blocks.entry(p.block_count()).or_default().push((p, w));
        }
        let ats: Vec<u8> = atoms(self.ground).collect();
        let cuts = 1usize << (m - 1);
        // right side of every cut; the first atom always stays left
        let right: Vec<u32> = (0..cuts)
            .map(|t| {
                ats[1..]
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| t >> k & 1 == 1)
                    .fold(0u32, |acc, (_, &a)| acc | 1 << a)
            })
            .collect();
        let words = cuts.div_ceil(64);
        let mut entries = Vec::new();
        for (_, mut group) in by_blocks {
            group.sort_by(|(p, w), (q, v)| v.cmp(w).then_with(|| p.cmp(q)));
            let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
            for (p, w) in group {
                let mut row = vec![0u64; words];
                for (t, &r) in right.iter().enumerate() {
                    if p.blocks.iter().all(|&b| b & r == 0 || b & r == b) {
                        row[t / 64] |= 1 << (t % 64);
                    }
                }
                for (pivot, brow) in &basis {
                    if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                        for (x, y) in row.iter_mut().zip(brow) {
                            *x ^= y;
                        }
                    }
                }
                if let Some(pivot) = row
                    .iter()
                    .enumerate()
                    .find(|(_, &x)| x != 0)
                    .map(|(k, &x)| k * 64 + x.trailing_zeros() as usize)
                {
                    for (_, brow) in basis.iter_mut() {
                        if brow[pivot / 64] >> (pivot % 64) & 1 == 1 {
                            for (x, y) in brow.iter_mut().zip(&row) {
                                *x ^= y;
                            }
                        }
                    }
                    basis.push((pivot, row));
                    entries.push((p, w));
                }
            }
        }
        entries.sort();
        WeightedPartitionSet {
            ground: self.ground,
            entries,
        }
    }

    /// Multi-line dump, one `blocks | weight` line per pair.
    pub fn dump(&self) -> String {
        self.entries
            .iter()
            .map(|(p, w)| format!("{p} | {w}\n"))
            .collect()
    }
}

/// Whether `small` answers every `acopt` query exactly like `big`.
/// Exhaustive over all partitions of the ground set.
pub fn ac_represents(small: &WeightedPartitionSet, big: &WeightedPartitionSet) -> Result<bool> {
    if small.ground != big.ground {
        return input("sets are over different ground sets");
    }
    if small.ground.count_ones() > BRUTE_MAX_ATOMS {
        return Err(Error::Limit(format!(
            "representation check limited to {BRUTE_MAX_ATOMS} atoms"
        )));
    }
    for q in all_partitions(small.ground) {
        if small.acopt(&q)? != big.acopt(&q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(blocks: &[&[u8]]) -> Partition {
        Partition::from_atoms(blocks).unwrap()
    }

    fn set(ground: &[u8], pairs: &[(&[&[u8]], u64)]) -> WeightedPartitionSet {
        let g = ground.iter().fold(0u32, |m, a| m | 1 << a);
        WeightedPartitionSet::from_pairs(g, pairs.iter().map(|(b, w)| (p(b), *w))).unwrap()
    }

    #[test]
    fn join_example() {
        let a = p(&[&[1, 2], &[3, 4], &[5]]);
        let b = p(&[&[1], &[2, 3], &[4], &[5]]);
        assert_eq!(lattice_join(&a, &b).unwrap(), p(&[&[1, 2, 3, 4], &[5]]));
        assert!(lattice_join(&a, &p(&[&[1]])).is_err());
    }

    #[test]
    fn acy_examples() {
        let s = p(&[&[1], &[2]]);
        assert!(acy(&s, &s).unwrap());
        let w = p(&[&[1, 2]]);
        assert!(!acy(&w, &w).unwrap());
        assert!(acy(&p(&[&[1, 2], &[3]]), &p(&[&[2, 3], &[1]])).unwrap());
    }

    #[test]
    fn rmc_examples() {
        let s = set(&[1, 2], &[(&[&[1, 2]], 3), (&[&[1, 2]], 5), (&[&[1], &[2]], 4)]);
        assert_eq!(s.rmc(), set(&[1, 2], &[(&[&[1], &[2]], 4), (&[&[1, 2]], 5)]));
        assert_eq!(s.rmc().rmc(), s.rmc());
        assert!(WeightedPartitionSet::empty(3).rmc().is_empty());
    }

    #[test]
    fn acjoin_examples() {
        let a = set(&[1], &[(&[&[1]], 2)]);
        let b = set(&[2], &[(&[&[2]], 3)]);
        assert_eq!(a.acjoin(&b), set(&[1, 2], &[(&[&[1], &[2]], 5)]));
        let c = set(&[1, 2], &[(&[&[1, 2]], 1)]);
        assert!(c.acjoin(&c).is_empty());
        assert!(WeightedPartitionSet::empty(2).acjoin(&a).is_empty());
    }

    #[test]
    fn proj_examples() {
        let s = set(&[1, 2], &[(&[&[1, 2]], 7)]);
        assert_eq!(s.proj(1 << 2).unwrap(), set(&[1], &[(&[&[1]], 7)]));
        let t = set(&[1, 2], &[(&[&[2], &[1]], 7)]);
        assert!(t.proj(1 << 2).unwrap().is_empty());
        assert_eq!(s.proj(0).unwrap(), s);
        assert!(s.proj(1 << 3).is_err());
    }

    #[test]
    fn acopt_examples() {
        let s = set(&[1, 2], &[(&[&[1], &[2]], 5)]);
        assert_eq!(s.acopt(&p(&[&[1, 2]])).unwrap(), Some(5));
        assert_eq!(s.acopt(&p(&[&[1], &[2]])).unwrap(), None);
        assert_eq!(WeightedPartitionSet::empty(6).acopt(&p(&[&[1, 2]])).unwrap(), None);
    }

    #[test]
    fn representation_examples() {
        let a = set(&[1, 2], &[(&[&[1], &[2]], 5), (&[&[1], &[2]], 3), (&[&[1, 2]], 1)]);
        assert!(ac_represents(&a, &a).unwrap());
        assert!(ac_represents(&a.rmc(), &a).unwrap());
        let b = set(&[1, 2], &[(&[&[1], &[2]], 5)]);
        assert!(!ac_represents(&WeightedPartitionSet::empty(b.ground()), &b).unwrap());
        assert_eq!(a.acreduce(Reduction::Rmc), a.rmc());
        assert!(ac_represents(&a.acreduce(Reduction::Rank), &a).unwrap());
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=6).map(|m| all_partitions((1u32 << m) - 1).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn dump_format() {
        let s = set(&[0, 1, 2], &[(&[&[0, 2], &[1]], 4)]);
        assert_eq!(s.dump(), "{v0,2}{1} | 4\n");
    }
}
