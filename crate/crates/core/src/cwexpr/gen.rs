//! Irredundant expression generators: named families and seeded random ones.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CwExpr;
use crate::error::{input, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Path,
    Cycle,
    Complete,
    CompleteBipartite,
    Star,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::Path,
        FamilyKind::Cycle,
        FamilyKind::Complete,
        FamilyKind::CompleteBipartite,
        FamilyKind::Star,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Path => "path",
            FamilyKind::Cycle => "cycle",
            FamilyKind::Complete => "complete",
            FamilyKind::CompleteBipartite => "complete_bipartite",
            FamilyKind::Star => "star",
        }
    }

    /// Smallest `n` the family is defined for.
    pub fn min_n(self) -> u32 {
        match self {
            FamilyKind::Cycle => 3,
            _ => 1,
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyKind> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown family {s:?}")))
    }
}

fn v(label: u32) -> CwExpr {
    CwExpr::vertex(label).expect("positive label")
}

fn join(i: u32, j: u32, e: CwExpr) -> CwExpr {
    CwExpr::join(i, j, e).expect("distinct labels")
}

fn relabel(i: u32, j: u32, e: CwExpr) -> CwExpr {
    CwExpr::relabel(i, j, e).expect("distinct labels")
}

/// Appends a vertex with label 1, joins it to the current end (label 2),
/// retires the old end to label 3 and promotes the new vertex.
fn extend_path(acc: CwExpr) -> CwExpr {
    let e = join(1, 2, CwExpr::union(acc, v(1)));
    relabel(1, 2, relabel(2, 3, e))
}

/// Irredundant expression for a named family on `n` vertices.
///
/// Complete bipartite uses parts of sizes `n/2` and `n - n/2`; the star has
/// vertex 1 as its center.
pub fn gen_family(kind: FamilyKind, n: u32) -> Result<CwExpr> {
    if n < kind.min_n() {
        return input(format!("{} needs n >= {}, got {n}", kind.name(), kind.min_n()));
    }
    Ok(match kind {
        FamilyKind::Path => {
            let mut acc = v(2);
            for _ in 1..n {
                acc = extend_path(acc);
            }
            acc
        }
        FamilyKind::Cycle => {
            // vertex 1 keeps label 4 until the closing join
            let mut acc = join(2, 4, CwExpr::union(v(4), v(2)));
            for _ in 2..n {
                acc = extend_path(acc);
            }
            join(2, 4, acc)
        }
        FamilyKind::Complete => {
            let mut acc = v(1);
            for _ in 1..n {
                acc = relabel(2, 1, join(1, 2, CwExpr::union(acc, v(2))));
            }
            acc
        }
        FamilyKind::CompleteBipartite => {
            let a = n / 2;
            let mut acc = v(if a > 0 { 1 } else { 2 });
            for k in 1..n {
                acc = CwExpr::union(acc, v(if k < a { 1 } else { 2 }));
            }
            if a > 0 && n > a {
                acc = join(1, 2, acc);
            }
            acc
        }
        FamilyKind::Star => {
            let mut acc = v(1);
            for _ in 1..n {
                acc = CwExpr::union(acc, v(2));
            }
            if n > 1 {
                acc = join(1, 2, acc);
            }
            acc
        }
    })
}

/// A partial expression with enough state to keep joins irredundant.
struct Piece {
    expr: CwExpr,
    labels: Vec<u32>,
    edges: Vec<(usize, usize)>,
}

impl Piece {
    fn class(&self, l: u32) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &x)| x == l)
            .map(|(k, _)| k)
    }

    fn joinable(&self, width: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 1..=width {
            for j in i + 1..=width {
                if self.class(i).next().is_none() || self.class(j).next().is_none() {
                    continue;
                }
                let touching = self.edges.iter().any(|&(a, b)| {
                    let (la, lb) = (self.labels[a], self.labels[b]);
                    (la == i && lb == j) || (la == j && lb == i)
                });
                if !touching {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn merge(self, other: Piece) -> Piece {
        let off = self.labels.len();
        let mut labels = self.labels;
        labels.extend(other.labels);
        let mut edges = self.edges;
        edges.extend(other.edges.into_iter().map(|(a, b)| (a + off, b + off)));
        Piece {
            expr: CwExpr::union(self.expr, other.expr),
            labels,
            edges,
        }
    }
}

/// Seeded random irredundant expression over labels `1..=width` built from
/// `ops` random operations. Deterministic for a given argument triple.
pub fn gen_random_expr(width: u32, ops: usize, seed: u64) -> Result<CwExpr> {
    gen_random_expr_bounded(width, ops, usize::MAX, seed)
}

/// Like [`gen_random_expr`] but introduces at most `max_vertices` vertices.
pub fn gen_random_expr_bounded(
    width: u32,
    ops: usize,
    max_vertices: usize,
    seed: u64,
) -> Result<CwExpr> {
    if width == 0 {
        return input("width must be at least 1");
    }
    if max_vertices == 0 {
        return input("max_vertices must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<Piece> = Vec::new();
    let mut vertices = 0usize;
    for _ in 0..ops {
        let first = rng.gen_range(0..11u32);
        let order: [u32; 4] = match first {
            0..=2 => [0, 1, 2, 3],
            3..=5 => [1, 2, 0, 3],
            6..=8 => [2, 1, 3, 0],
            _ => [3, 2, 1, 0],
        };
        let mut done = false;
        for action in order {
            done = match action {
                0 if vertices < max_vertices => {
                    let l = rng.gen_range(1..=width);
                    pool.push(Piece {
                        expr: v(l),
                        labels: vec![l],
                        edges: Vec::new(),
                    });
                    vertices += 1;
                    true
                }
                1 if pool.len() >= 2 => {
                    let a = pool.swap_remove(rng.gen_range(0..pool.len()));
                    let b = pool.swap_remove(rng.gen_range(0..pool.len()));
                    pool.push(a.merge(b));
                    true
                }
                2 if !pool.is_empty() => {
                    let k = rng.gen_range(0..pool.len());
                    let cands = pool[k].joinable(width);
                    match cands.choose(&mut rng) {
                        Some(&(i, j)) => {
                            let p = &mut pool[k];
                            let ci: Vec<usize> = p.class(i).collect();
                            let cj: Vec<usize> = p.class(j).collect();
                            for &a in &ci {
                                for &b in &cj {
                                    p.edges.push((a, b));
                                }
                            }
                            let (i, j) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                            p.expr = join(i, j, std::mem::replace(&mut p.expr, v(1)));
                            true
                        }
                        None => false,
                    }
                }
                3 if !pool.is_empty() && width >= 2 => {
                    let k = rng.gen_range(0..pool.len());
                    let p = &mut pool[k];
                    let mut present: Vec<u32> = p.labels.clone();
                    present.sort_unstable();
                    present.dedup();
                    let i = *present.choose(&mut rng).expect("piece has a vertex");
                    let mut j = rng.gen_range(1..width);
                    if j >= i {
                        j += 1;
                    }
                    for l in p.labels.iter_mut() {
                        if *l == i {
                            *l = j;
                        }
                    }
                    p.expr = relabel(i, j, std::mem::replace(&mut p.expr, v(1)));
                    true
                }
                _ => false,
            };
            if done {
                break;
            }
        }
        if !done {
            break;
        }
    }
    if pool.is_empty() {
        let l = rng.gen_range(1..=width);
        pool.push(Piece {
            expr: v(l),
            labels: vec![l],
            edges: Vec::new(),
        });
    }
    let mut acc = pool.remove(0);
    for p in pool {
        acc = acc.merge(p);
    }
    Ok(acc.expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwexpr::{check_irredundant, evaluate};

    fn edges_of(e: &CwExpr) -> Vec<(u32, u32)> {
        evaluate(e).graph.edges().to_vec()
    }

    #[test]
    fn small_families() {
        assert_eq!(edges_of(&gen_family(FamilyKind::Path, 2).unwrap()), vec![(1, 2)]);
        assert_eq!(
            edges_of(&gen_family(FamilyKind::Cycle, 4).unwrap()),
            vec![(1, 2), (1, 4), (2, 3), (3, 4)]
        );
        let k3 = gen_family(FamilyKind::Complete, 3).unwrap();
        assert_eq!(edges_of(&k3), vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(check_irredundant(&k3), None);
        assert_eq!(
            edges_of(&gen_family(FamilyKind::Star, 4).unwrap()),
            vec![(1, 2), (1, 3), (1, 4)]
        );
        assert_eq!(
            edges_of(&gen_family(FamilyKind::CompleteBipartite, 5).unwrap()),
            vec![(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]
        );
        assert!(gen_family(FamilyKind::Cycle, 2).is_err());
    }

    #[test]
    fn families_match_definitions() {
        for n in 1..=32u32 {
            for kind in FamilyKind::ALL {
                if n < kind.min_n() {
                    continue;
                }
                let e = gen_family(kind, n).unwrap();
                assert_eq!(check_irredundant(&e), None, "{} {n}", kind.name());
                assert!(e.width() <= 4);
                let mut want: Vec<(u32, u32)> = Vec::new();
                for a in 1..=n {
                    for b in a + 1..=n {
                        let adjacent = match kind {
                            FamilyKind::Path => b == a + 1,
                            FamilyKind::Cycle => b == a + 1 || (a == 1 && b == n),
                            FamilyKind::Complete => true,
                            FamilyKind::CompleteBipartite => a <= n / 2 && b > n / 2,
                            FamilyKind::Star => a == 1,
                        };
                        if adjacent {
                            want.push((a, b));
                        }
                    }
                }
                assert_eq!(edges_of(&e), want, "{} {n}", kind.name());
            }
        }
    }

    #[test]
    fn random_is_deterministic_and_irredundant() {
        assert_eq!(gen_random_expr(2, 5, 7).unwrap(), gen_random_expr(2, 5, 7).unwrap());
        for seed in 0..200 {
            let e = gen_random_expr_bounded(4, 30, 9, seed).unwrap();
            assert_eq!(check_irredundant(&e), None);
            assert!(e.width() <= 4);
            assert!(e.vertex_count() <= 9);
        }
    }
}
