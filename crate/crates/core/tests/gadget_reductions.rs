mod common;

use common::{acyclic_fixtures, chain_csp, csp, induced_fixtures, multi_satisfiable};
use matchwidth::gadgets::{
    acyclic_witness, csp_brute_solve, gen_acyclic_instance, gen_induced_instance, induced_witness,
    validate_csp, VarClass,
};
use matchwidth::graph::{compute_cutwidth, is_acyclic_matching, is_induced_matching};
use matchwidth::oracle::{count_induced_oracle, max_acyclic_oracle, OracleLimits};

fn acyclic_limits() -> OracleLimits {
    OracleLimits { max_vertices: 20, max_edges: 24 }
}

#[test]
fn fixtures_are_well_formed() {
    for (name, c) in induced_fixtures().into_iter().chain(acyclic_fixtures()) {
        assert!(validate_csp(&c).is_ok(), "{name}: {:?}", validate_csp(&c).violations);
        // fixtures must not separate single assignments from the relaxation
        assert_eq!(csp_brute_solve(&c).unwrap().is_some(), multi_satisfiable(&c), "{name}");
    }
}

#[test]
fn induced_threshold() {
    for (name, c) in induced_fixtures() {
        let inst = gen_induced_instance(&c).unwrap();
        assert!(inst.graph.n() <= 16, "{name}");
        let counts = count_induced_oracle(&inst.graph, OracleLimits::default()).unwrap();
        let best = counts.iter().rposition(|x| *x != 0u32.into()).unwrap() as u64;
        match csp_brute_solve(&c).unwrap() {
            Some(a) => {
                assert!(best >= inst.ell, "{name}");
                let m = induced_witness(&c, &a).unwrap();
                assert_eq!(m.len() as u64, inst.ell, "{name}");
                assert!(is_induced_matching(&inst.graph, &m).unwrap(), "{name}");
            }
            None => assert!(best < inst.ell, "{name}: best {best}, ell {}", inst.ell),
        }
    }
}

#[test]
fn acyclic_threshold() {
    for (name, c) in acyclic_fixtures() {
        let inst = gen_acyclic_instance(&c).unwrap();
        assert!(inst.graph.n() <= 20, "{name}");
        let (best, m) = max_acyclic_oracle(&inst.graph, acyclic_limits()).unwrap();
        assert!(is_acyclic_matching(&inst.graph, &m).unwrap());
        match csp_brute_solve(&c).unwrap() {
            Some(a) => {
                assert!(best as u64 >= inst.ell, "{name}");
                let w = acyclic_witness(&c, &a).unwrap();
                assert_eq!(w.len() as u64, inst.ell, "{name}");
                assert!(is_acyclic_matching(&inst.graph, &w).unwrap(), "{name}");
            }
            None => assert!((best as u64) < inst.ell, "{name}"),
        }
    }
}

#[test]
fn acyclic_witnesses_on_larger_instances() {
    // beyond oracle reach: only the explicit witness is checked
    let cases = [
        csp(5, &[(1, 1), (2, 2)], &[&[1], &[1, 2], &[2]], &[(&[1, 2], &[&[1, 4], &[3, 2], &[5, 5]], 2)]),
        csp(5, &[(1, 1), (2, 1)], &[&[1], &[1, 2], &[2]], &[(&[1, 2], &[&[2, 1], &[4, 4]], 2)]),
        csp(5, &[(1, 2), (2, 2)], &[&[1], &[1, 2]], &[(&[1], &[&[3]], 1), (&[1, 2], &[&[3, 1]], 2)]),
    ];
    for c in cases {
        let inst = gen_acyclic_instance(&c).unwrap();
        let mut checked = 0;
        for v in 1..=5u8 {
            for u in 1..=5u8 {
                let a = [(1, v), (2, u)].into_iter().collect();
                let Ok(m) = acyclic_witness(&c, &a) else { continue };
                assert_eq!(m.len() as u64, inst.ell);
                assert!(is_acyclic_matching(&inst.graph, &m).unwrap(), "{v} {u}");
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn named_instances() {
    let p4 = gen_induced_instance(&csp(3, &[(1, 1)], &[&[1]], &[])).unwrap();
    assert_eq!((p4.graph.edge_count(), p4.ell), (3, 1));
    let k4 = gen_induced_instance(&csp(3, &[(1, 2)], &[&[1]], &[])).unwrap();
    assert_eq!((k4.graph.edge_count(), k4.ell), (6, 1));
    let e = gen_acyclic_instance(&csp(5, &[], &[], &[])).unwrap();
    assert_eq!((e.graph.n(), e.graph.edges(), e.ell), (2, &[(1, 2)][..], 1));
    let one = gen_acyclic_instance(&csp(5, &[(1, 1)], &[&[1]], &[])).unwrap();
    assert_eq!((one.graph.n(), one.ell), (20, 7));
    let (best, _) = max_acyclic_oracle(&one.graph, acyclic_limits()).unwrap();
    assert_eq!(best, 7);
}

#[test]
fn structural_counts() {
    for (_, c) in induced_fixtures().into_iter().chain([("chain", chain_csp(6))]) {
        let inst = gen_induced_instance(&c).unwrap();
        let mut n = 0u64;
        let mut e = 0u64;
        for v in &c.vars {
            let q = c.bags_of(v.id).len() as u64;
            match v.class {
                VarClass::V1 => {
                    n += 3 * q + 1;
                    e += 3 * q;
                }
                VarClass::V2 => {
                    n += 4 * q;
                    e += 6 * q + 6 * (q - 1);
                }
            }
        }
        for con in &c.constraints {
            let s = con.satisfying().len() as u64;
            n += 1 + s;
            e += s * (s + 1) / 2;
            for t in con.satisfying() {
                for (x, val) in con.vars.iter().zip(t) {
                    let class = c.vars.iter().find(|v| v.id == *x).unwrap().class;
                    e += match (class, val) {
                        (VarClass::V1, 2) | (VarClass::V2, _) => 2,
                        _ => 1,
                    };
                }
            }
        }
        assert_eq!((inst.graph.n() as u64, inst.graph.edge_count() as u64), (n, e));
        assert_eq!(inst.ell, inst.counts.l1 + inst.counts.l2 + inst.counts.m);
    }
    for c in [chain_csp(2), csp(5, &[(1, 2)], &[&[1], &[]], &[]), csp(5, &[(1, 2), (2, 1)], &[&[1], &[1, 2]], &[])] {
        let c = matchwidth::gadgets::CspInstance { b: 5, ..c };
        let inst = gen_acyclic_instance(&c).unwrap();
        let (mut n, mut xor) = (2u64, 0u64);
        for v in &c.vars {
            let q = c.bags_of(v.id).len() as u64;
            match v.class {
                VarClass::V1 => {
                    n += 9 * q + 1;
                    xor += 4 * q;
                }
                VarClass::V2 => {
                    n += 6 * q;
                    xor += 10 * q + 20 * (q - 1);
                }
            }
        }
        for con in &c.constraints {
            let s = con.satisfying().len() as u64;
            n += 1 + s;
            xor += s * (s - 1) / 2 + s * 4 * con.vars.len() as u64;
        }
        n += 2 * xor;
        assert_eq!((inst.graph.n() as u64, inst.counts.xor), (n, xor));
        assert_eq!(inst.ell, 1 + xor + 2 * inst.counts.l1 + inst.counts.l2 + inst.counts.m);
    }
}

#[test]
fn provenance_names_cover_every_vertex() {
    let c = csp(5, &[(1, 1), (2, 2)], &[&[1], &[1, 2]], &[(&[1, 2], &[&[1, 4]], 2)]);
    let inst = gen_acyclic_instance(&c).unwrap();
    assert_eq!(inst.graph.names().len(), inst.graph.n() as usize);
    assert!(inst.graph.names().values().any(|s| s == "c1/sigma(1,4)/v"));
    let names: std::collections::BTreeSet<_> = inst.graph.names().values().collect();
    assert_eq!(names.len(), inst.graph.n() as usize);
}

#[test]
fn cutwidth_excess_stays_flat() {
    let mut excess = Vec::new();
    for p in [2u32, 4, 8, 16, 32, 64] {
        let c = chain_csp(p);
        assert_eq!(c.max_v1_per_bag(), p as usize);
        let inst = gen_induced_instance(&c).unwrap();
        let ctw = compute_cutwidth(&inst.graph, inst.ordering.as_ref().unwrap()).unwrap() as i64;
        excess.push(ctw - p as i64);
    }
    eprintln!("cutwidth excess: {excess:?}");
    let steps: Vec<i64> = excess.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.windows(2).all(|s| s[1] <= s[0]), "excess {excess:?}");
    assert!(*excess.last().unwrap() <= 20, "excess {excess:?}");
}
