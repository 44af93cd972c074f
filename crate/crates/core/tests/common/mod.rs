#![allow(dead_code)]

use std::collections::BTreeMap;

use matchwidth::gadgets::{Constraint, CspInstance, VarClass, Variable};

pub type Cons<'a> = [(&'a [u32], &'a [&'a [u8]], usize)];

pub fn csp(b: u8, vars: &[(u32, u8)], bags: &[&[u32]], cons: &Cons) -> CspInstance {
    CspInstance {
        b,
        vars: vars
            .iter()
            .map(|&(id, c)| Variable { id, class: if c == 1 { VarClass::V1 } else { VarClass::V2 } })
            .collect(),
        bags: bags.iter().map(|b| b.to_vec()).collect(),
        constraints: cons
            .iter()
            .map(|(vs, al, bag)| Constraint {
                vars: vs.to_vec(),
                allowed: al.iter().map(|t| t.to_vec()).collect(),
                bag: *bag,
            })
            .collect(),
    }
}

/// Induced fixtures (B = 3); every generated graph has at most 16 vertices.
pub fn induced_fixtures() -> Vec<(&'static str, CspInstance)> {
    vec![
        ("v1-alone", csp(3, &[(1, 1)], &[&[1]], &[])),
        ("v2-alone", csp(3, &[(1, 2)], &[&[1]], &[])),
        ("v1-unary-2", csp(3, &[(1, 1)], &[&[1]], &[(&[1], &[&[2]], 1)])),
        ("v1-unary-13", csp(3, &[(1, 1)], &[&[1]], &[(&[1], &[&[1], &[3]], 1)])),
        ("v1-unary-empty", csp(3, &[(1, 1)], &[&[1]], &[(&[1], &[], 1)])),
        ("v2-unary-3", csp(3, &[(1, 2)], &[&[1]], &[(&[1], &[&[3]], 1)])),
        ("v2-unary-empty", csp(3, &[(1, 2)], &[&[1]], &[(&[1], &[], 1)])),
        ("nullary-sat", csp(3, &[(1, 1)], &[&[1]], &[(&[], &[&[]], 1)])),
        ("nullary-unsat", csp(3, &[(1, 1)], &[&[1]], &[(&[], &[], 1)])),
        (
            "v1-pair-neq",
            csp(3, &[(1, 1), (2, 1)], &[&[1], &[1, 2]], &[(&[1, 2], &[&[1, 2], &[2, 1]], 2)]),
        ),
        (
            "v1-decreasing",
            csp(3, &[(1, 1), (2, 1)], &[&[1], &[1, 2]], &[(&[1], &[&[3]], 1), (&[1, 2], &[&[1, 1]], 2)]),
        ),
        (
            "v2-pair-eq",
            csp(3, &[(1, 2), (2, 2)], &[&[1], &[1, 2]], &[(&[1, 2], &[&[1, 1], &[2, 2], &[3, 3]], 2)]),
        ),
        (
            "v2-inconsistent",
            csp(3, &[(1, 2), (2, 2)], &[&[1], &[1, 2]], &[(&[1], &[&[1]], 1), (&[1, 2], &[&[2, 1]], 2)]),
        ),
        (
            "mixed-sat",
            csp(3, &[(1, 1), (2, 2)], &[&[1], &[1, 2]], &[(&[1, 2], &[&[2, 3], &[3, 1]], 2)]),
        ),
        (
            "mixed-decreasing",
            csp(3, &[(1, 1), (2, 2)], &[&[1], &[1, 2]], &[(&[1], &[&[3]], 1), (&[1, 2], &[&[2, 1]], 2)]),
        ),
        (
            "v2-neq-one-bag",
            csp(3, &[(1, 2), (2, 2)], &[&[1, 2]], &[(&[1, 2], &[&[1, 2], &[2, 3], &[3, 1]], 1)]),
        ),
        ("v1-two-bags", csp(3, &[(1, 1), (2, 2)], &[&[1], &[1, 2]], &[])),
    ]
}

/// Acyclic fixtures (B = 5); every generated graph has at most 20 vertices.
pub fn acyclic_fixtures() -> Vec<(&'static str, CspInstance)> {
    vec![
        ("empty", csp(5, &[], &[], &[])),
        ("nullary-sat", csp(5, &[], &[&[]], &[(&[], &[&[]], 1)])),
        ("nullary-unsat", csp(5, &[], &[&[]], &[(&[], &[], 1)])),
        ("v1-alone", csp(5, &[(1, 1)], &[&[1]], &[])),
    ]
}

/// Whether a monotone multi-assignment that is consistent on V2 satisfies
/// every constraint.
pub fn multi_satisfiable(c: &CspInstance) -> bool {
    let per_var: Vec<(u32, Vec<usize>, Vec<Vec<u8>>)> = c
        .vars
        .iter()
        .map(|v| {
            let js = c.bags_of(v.id);
            let seqs = match v.class {
                VarClass::V2 => (1..=c.b).map(|x| vec![x; js.len()]).collect(),
                VarClass::V1 => nondecreasing(js.len(), c.b),
            };
            (v.id, js, seqs)
        })
        .collect();
    let mut pick = vec![0usize; per_var.len()];
    loop {
        let mut sigma: BTreeMap<(u32, usize), u8> = BTreeMap::new();
        for (k, (id, js, seqs)) in per_var.iter().enumerate() {
            for (j, &x) in js.iter().zip(&seqs[pick[k]]) {
                sigma.insert((*id, *j), x);
            }
        }
        let ok = c.constraints.iter().all(|con| {
            let t: Vec<u8> = con.vars.iter().map(|x| sigma[&(*x, con.bag)]).collect();
            con.allowed.contains(&t)
        });
        if ok {
            return true;
        }
        let mut k = pick.len();
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < per_var[k].2.len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

fn nondecreasing(len: usize, b: u8) -> Vec<Vec<u8>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for s in nondecreasing(len - 1, b) {
        let lo = s.last().copied().unwrap_or(1);
        for x in lo..=b {
            let mut t = s.clone();
            t.push(x);
            out.push(t);
        }
    }
    out
}

/// Cutwidth family: `p` V1 variables introduced one per bag, a binary
/// constraint between consecutive variables at each introduction, then
/// forgotten in order.
pub fn chain_csp(p: u32) -> CspInstance {
    let mut bags: Vec<Vec<u32>> = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    let mut cons = Vec::new();
    for x in 1..=p {
        cur.push(x);
        bags.push(cur.clone());
        if x > 1 {
            cons.push(Constraint {
                vars: vec![x - 1, x],
                allowed: vec![vec![1, 2], vec![2, 3], vec![3, 3]],
                bag: bags.len(),
            });
        }
    }
    for _ in 1..p {
        cur.remove(0);
        bags.push(cur.clone());
    }
    CspInstance {
        b: 3,
        vars: (1..=p).map(|id| Variable { id, class: VarClass::V1 }).collect(),
        bags,
        constraints: cons,
    }
}
