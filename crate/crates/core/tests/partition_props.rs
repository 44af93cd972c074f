use matchwidth::partition::{
    ac_represents, acy, all_partitions, atoms, lattice_join, AtomSet, Partition, Reduction,
    WeightedPartitionSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Each block becomes a star centred on its smallest atom; acy holds iff the
/// two edge sets are disjoint and their union is a forest.
fn forest_oracle(p: &Partition, q: &Partition) -> bool {
    let star = |x: &Partition| -> Vec<(u8, u8)> {
        x.blocks()
            .iter()
            .flat_map(|&b| {
                let c = b.trailing_zeros() as u8;
                atoms(b).filter(move |&a| a != c).map(move |a| (c, a))
            })
            .collect()
    };
    let (ep, eq) = (star(p), star(q));
    if ep.iter().any(|e| eq.contains(e)) {
        return false;
    }
    let mut parent: Vec<u8> = (0..32).collect();
    fn find(p: &mut [u8], x: u8) -> u8 {
        if p[x as usize] == x { x } else { let r = find(p, p[x as usize]); p[x as usize] = r; r }
    }
    for (a, b) in ep.into_iter().chain(eq) {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra as usize] = rb;
    }
    true
}

fn random_partition(rng: &mut ChaCha8Rng, ground: AtomSet) -> Partition {
    let k = ground.count_ones() as usize;
    let mut blocks = vec![0u32; k.max(1)];
    for a in atoms(ground) {
        blocks[rng.gen_range(0..k)] |= 1 << a;
    }
    Partition::new(blocks.into_iter().filter(|&b| b != 0).collect()).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, ground: AtomSet, max_len: usize) -> WeightedPartitionSet {
    let len = rng.gen_range(0..=max_len);
    WeightedPartitionSet::from_pairs(
        ground,
        (0..len).map(|_| (random_partition(rng, ground), rng.gen_range(0..20))),
    )
    .unwrap()
}

fn small_grounds() -> Vec<AtomSet> {
    vec![0, 0b1, 0b11, 0b111, 0b1111, 0b1011, 0b10101]
}

fn join(p: &Partition, q: &Partition) -> Partition {
    lattice_join(p, q).unwrap()
}

#[test]
fn acy_matches_forest_oracle() {
    for g in small_grounds() {
        let ps = all_partitions(g);
        for p in &ps {
            for q in &ps {
                assert_eq!(acy(p, q).unwrap(), forest_oracle(p, q), "{p} {q}");
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let (p, q) = (random_partition(&mut rng, 0b111111), random_partition(&mut rng, 0b111111));
        assert_eq!(acy(&p, &q).unwrap(), forest_oracle(&p, &q));
    }
}

fn exchange_holds(p: &Partition, q: &Partition, r: &Partition) -> bool {
    let lhs = acy(p, q).unwrap() && acy(&join(p, q), r).unwrap();
    let rhs = acy(q, r).unwrap() && acy(p, &join(q, r)).unwrap();
    lhs == rhs
}

#[test]
fn exchange_identity() {
    for g in small_grounds() {
        let ps = all_partitions(g);
        for p in &ps {
            for q in &ps {
                for r in &ps {
                    assert!(exchange_holds(p, q, r), "{p} {q} {r}");
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let g = 0b111111;
        let (p, q, r) = (
            random_partition(&mut rng, g),
            random_partition(&mut rng, g),
            random_partition(&mut rng, g),
        );
        assert!(exchange_holds(&p, &q, &r));
    }
}

fn lifting_holds(p: &Partition, q: &Partition, l: AtomSet, x: AtomSet) -> bool {
    let up = p.lift(x);
    let down = q.restrict(l & !x);
    let one_l = Partition::whole(l);
    let one_rest = Partition::whole(l & !x);
    (join(&up, q) == one_l) == (join(p, &down) == one_rest)
        && acy(&up, q).unwrap() == acy(p, &down).unwrap()
}

#[test]
fn lifting_identities() {
    let mut checked = 0usize;
    for l in small_grounds() {
        let mut x = l;
        loop {
            for q in all_partitions(l) {
                if q.blocks().iter().any(|&b| b & !x == 0) {
                    continue;
                }
                for p in all_partitions(l & !x) {
                    assert!(lifting_holds(&p, &q, l, x), "{p} {q} {x:b}");
                    checked += 1;
                }
            }
            if x == 0 {
                break;
            }
            x = (x - 1) & l;
        }
    }
    assert!(checked > 600);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let l = 0b111111;
    let mut done = 0;
    while done < 10_000 {
        let x = rng.gen_range(0..64u32) & l;
        let q = random_partition(&mut rng, l);
        if q.blocks().iter().any(|&b| b & !x == 0) {
            continue;
        }
        let p = random_partition(&mut rng, l & !x);
        assert!(lifting_holds(&p, &q, l, x));
        done += 1;
    }
}

#[test]
fn join_algebra() {
    for g in [0b111, 0b1111] {
        let ps = all_partitions(g);
        let bottom = Partition::singletons(g);
        for p in &ps {
            assert_eq!(&join(p, p), p);
            assert_eq!(&join(p, &bottom), p);
            assert!(acy(p, &bottom).unwrap());
            for q in &ps {
                assert_eq!(join(p, q), join(q, p));
                assert_eq!(acy(p, q).unwrap(), acy(q, p).unwrap());
                assert!(p.refines(&join(p, q)));
                for r in &ps {
                    assert_eq!(join(&join(p, q), r), join(p, &join(q, r)));
                    if p.refines(q) {
                        assert!(join(p, r).refines(&join(q, r)));
                    }
                }
            }
        }
    }
}

#[test]
fn partitions_are_enumerated_once() {
    let bell = [1usize, 1, 2, 5, 15, 52, 203];
    for (m, &b) in bell.iter().enumerate() {
        let ps = all_partitions((1u32 << m) - 1);
        let uniq: std::collections::BTreeSet<_> = ps.iter().cloned().collect();
        assert_eq!((ps.len(), uniq.len()), (b, b));
    }
}

#[test]
fn acreduce_represents_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for t in 0..500 {
        let g = small_grounds()[t % 5 + 1];
        let s = random_set(&mut rng, g, 40);
        for how in [Reduction::Rmc, Reduction::Rank] {
            let r = s.acreduce(how);
            assert!(ac_represents(&r, &s).unwrap(), "{how:?}\n{}", s.dump());
            assert!(r.entries().iter().all(|e| s.entries().contains(e)));
        }
    }
}

#[test]
fn rank_reduction_meets_size_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for m in 1..=6u32 {
        let g = (1u32 << m) - 1;
        for _ in 0..40 {
            let s = random_set(&mut rng, g, 300);
            let r = s.acreduce(Reduction::Rank);
            assert!(r.len() <= (m as usize) << (m - 1), "m={m} len={}", r.len());
            if m <= 5 {
                assert!(ac_represents(&r, &s).unwrap());
            }
        }
    }
}

#[test]
fn operator_size_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..300 {
        let a = random_set(&mut rng, 0b0111, 12);
        let b = random_set(&mut rng, 0b1101, 12);
        assert!(a.acjoin(&b).len() <= a.len() * b.len());
        assert!(a.rmc().len() <= a.len());
        let x = rng.gen_range(0..16u32) & a.ground();
        assert!(a.proj(x).unwrap().len() <= a.len());
        assert_eq!(a.acjoin(&b).ground(), 0b1111);
    }
}

#[test]
fn representation_examples() {
    let g = 0b110;
    let a = WeightedPartitionSet::from_pairs(g, [(Partition::singletons(g), 5)]).unwrap();
    assert!(ac_represents(&a, &a).unwrap());
    assert!(ac_represents(&a.rmc(), &a).unwrap());
    assert!(!ac_represents(&WeightedPartitionSet::empty(g), &a).unwrap());
    assert!(ac_represents(&WeightedPartitionSet::empty(0x1ff), &WeightedPartitionSet::empty(0x1ff)).is_err());
}
