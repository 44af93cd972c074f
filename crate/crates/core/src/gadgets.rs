//! CSP instances over a path decomposition and the two lower-bound
//! constructions that turn them into matching instances.
//!
//! Bag indices in constraints are 1-based. Vertex ids of generated graphs
//! follow creation order; every vertex carries a name such as
//! `x3/bag5/p2` or `c2/sigma(1,2)/y`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Graph, GraphJson, LinearArrangement, Matching};

/// Largest search space accepted by [`csp_brute_solve`].
pub const BRUTE_MAX_ASSIGNMENTS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum VarClass {
    V1,
    V2,
}

impl TryFrom<u8> for VarClass {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(VarClass::V1),
            2 => Ok(VarClass::V2),
            _ => Err(format!("variable class must be 1 or 2, got {v}")),
        }
    }
}

impl From<VarClass> for u8 {
    fn from(c: VarClass) -> u8 {
        match c {
            VarClass::V1 => 1,
            VarClass::V2 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub id: u32,
    pub class: VarClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub vars: Vec<u32>,
    /// Satisfying tuples, values in `1..=B`, positions aligned with `vars`.
    pub allowed: Vec<Vec<u8>>,
    /// 1-based bag index.
    pub bag: usize,
}

impl Constraint {
    /// Deduplicated allowed tuples in lexicographic order.
    pub fn satisfying(&self) -> Vec<Vec<u8>> {
        let set: BTreeSet<Vec<u8>> = self.allowed.iter().cloned().collect();
        set.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspInstance {
    #[serde(rename = "B")]
    pub b: u8,
    pub vars: Vec<Variable>,
    pub bags: Vec<Vec<u32>>,
    pub constraints: Vec<Constraint>,
}

impl CspInstance {
    pub fn from_json_str(s: &str) -> Result<CspInstance> {
        serde_json::from_str(s).map_err(|e| Error::Input(format!("invalid CSP JSON: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("CSP serializes")
    }

    fn class_of(&self, id: u32) -> Option<VarClass> {
        self.vars.iter().find(|v| v.id == id).map(|v| v.class)
    }

    /// 1-based bag indices containing `id`, in order.
    pub fn bags_of(&self, id: u32) -> Vec<usize> {
        (1..=self.bags.len())
            .filter(|&j| self.bags[j - 1].contains(&id))
            .collect()
    }

    /// Largest number of V1 variables in a single bag.
    pub fn max_v1_per_bag(&self) -> usize {
        self.max_per_bag(VarClass::V1)
    }

    pub fn max_v2_per_bag(&self) -> usize {
        self.max_per_bag(VarClass::V2)
    }

    fn max_per_bag(&self, class: VarClass) -> usize {
        self.bags
            .iter()
            .map(|b| b.iter().filter(|&&x| self.class_of(x) == Some(class)).count())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CspReport {
    pub violations: Vec<String>,
    pub max_v2_per_bag: usize,
}

impl CspReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_csp(c: &CspInstance) -> CspReport {
    let mut v = Vec::new();
    if c.b < 2 {
        v.push(format!("alphabet size {} is below 2", c.b));
    }
    let mut ids = BTreeSet::new();
    for var in &c.vars {
        if !ids.insert(var.id) {
            v.push(format!("variable {} declared twice", var.id));
        }
    }
    for (k, bag) in c.bags.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for x in bag {
            if !ids.contains(x) {
                v.push(format!("bag {} lists unknown variable {x}", k + 1));
            }
            if !seen.insert(*x) {
                v.push(format!("bag {} lists variable {x} twice", k + 1));
            }
        }
    }
    for k in 1..c.bags.len() {
        let a: BTreeSet<u32> = c.bags[k - 1].iter().copied().collect();
        let b: BTreeSet<u32> = c.bags[k].iter().copied().collect();
        let added = b.difference(&a).count();
        let removed = a.difference(&b).count();
        if added + removed != 1 {
            v.push(format!(
                "bags {} and {} differ by {added} insertions and {removed} deletions",
                k,
                k + 1
            ));
        }
    }
    for &id in &ids {
        let js = c.bags_of(id);
        if js.is_empty() {
            v.push(format!("variable {id} is in no bag"));
        } else if js[js.len() - 1] - js[0] + 1 != js.len() {
            v.push(format!("bags of variable {id} are not contiguous"));
        }
    }
    let mut used_bags = BTreeSet::new();
    for (k, con) in c.constraints.iter().enumerate() {
        let name = format!("constraint {}", k + 1);
        if con.vars.len() > 4 {
            v.push(format!("{name} has {} variables (at most 4)", con.vars.len()));
        }
        let distinct: BTreeSet<u32> = con.vars.iter().copied().collect();
        if distinct.len() != con.vars.len() {
            v.push(format!("{name} repeats a variable"));
        }
        if con.bag == 0 || con.bag > c.bags.len() {
            v.push(format!("{name} points at bag {} outside 1..={}", con.bag, c.bags.len()));
        } else {
            if !used_bags.insert(con.bag) {
                v.push(format!("{name} shares bag {} with another constraint", con.bag));
            }
            for x in &con.vars {
                if !c.bags[con.bag - 1].contains(x) {
                    v.push(format!("{name} uses variable {x} outside its bag {}", con.bag));
                }
            }
        }
        for t in &con.allowed {
            if t.len() != con.vars.len() {
                v.push(format!("{name} has a tuple of length {}", t.len()));
            } else if t.iter().any(|&x| x == 0 || x > c.b) {
                v.push(format!("{name} has a tuple value outside 1..={}", c.b));
            }
        }
    }
    CspReport {
        violations: v,
        max_v2_per_bag: c.max_v2_per_bag(),
    }
}

/// Exhaustive search for a single (not multi-) assignment. Returns the
/// lexicographically first satisfying assignment in variable declaration
/// order, or `None`.
pub fn csp_brute_solve(c: &CspInstance) -> Result<Option<BTreeMap<u32, u8>>> {
    let report = validate_csp(c);
    if !report.is_ok() {
        return input(format!("invalid CSP: {}", report.violations.join("; ")));
    }
    let n = c.vars.len() as u32;
    let space = (c.b as u64).checked_pow(n).unwrap_or(u64::MAX);
    if space > BRUTE_MAX_ASSIGNMENTS {
        return Err(Error::Limit(format!(
            "{space} assignments exceed the brute-force limit {BRUTE_MAX_ASSIGNMENTS}"
        )));
    }
    let pos: BTreeMap<u32, usize> = c.vars.iter().enumerate().map(|(k, v)| (v.id, k)).collect();
    let checks: Vec<(Vec<usize>, HashSet<Vec<u8>>)> = c
        .constraints
        .iter()
        .map(|con| {
            (
                con.vars.iter().map(|x| pos[x]).collect(),
                con.allowed.iter().cloned().collect(),
            )
        })
        .collect();
    let mut val = vec![1u8; n as usize];
    loop {
        let ok = checks.iter().all(|(vs, allowed)| {
            let t: Vec<u8> = vs.iter().map(|&k| val[k]).collect();
            allowed.contains(&t)
        });
        if ok {
            return Ok(Some(c.vars.iter().map(|v| v.id).zip(val).collect()));
        }
        let mut k = val.len();
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            if val[k] < c.b {
                val[k] += 1;
                break;
            }
            val[k] = 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetKind {
    Induced,
    Acyclic,
}

impl FromStr for GadgetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<GadgetKind> {
        match s {
            "induced" => Ok(GadgetKind::Induced),
            "acyclic" => Ok(GadgetKind::Acyclic),
            _ => input(format!("unknown gadget kind {s:?} (expected induced or acyclic)")),
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GadgetKind::Induced => "induced",
            GadgetKind::Acyclic => "acyclic",
        })
    }
}

/// Block and gadget counts entering the target value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GadgetCounts {
    pub l1: u64,
    pub l2: u64,
    pub m: u64,
    /// XOR gadgets; always 0 for the induced construction.
    pub xor: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GadgetInstance {
    pub graph: Graph,
    pub ell: u64,
    pub kind: GadgetKind,
    pub ordering: Option<LinearArrangement>,
    pub counts: GadgetCounts,
}

/// Wire form: graph fields flattened next to `ell`, `kind` and `ordering`.
#[derive(Debug, Clone, Serialize)]
pub struct GadgetJson {
    #[serde(flatten)]
    pub graph: GraphJson,
    pub ell: u64,
    pub kind: GadgetKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<u32>>,
}

impl GadgetInstance {
    pub fn to_json(&self) -> GadgetJson {
        GadgetJson {
            graph: self.graph.to_json(),
            ell: self.ell,
            kind: self.kind,
            ordering: self.ordering.as_ref().map(|o| o.order.clone()),
        }
    }
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    edges: Vec<(u32, u32)>,
    xor_privates: Vec<(u32, u32)>,
}

impl Builder {
    fn vertex(&mut self, name: String) -> u32 {
        self.names.push(name);
        self.names.len() as u32
    }

    fn edge(&mut self, u: u32, v: u32) {
        self.edges.push((u, v));
    }

    fn xor(&mut self, u: u32, v: u32) {
        let base = format!(
            "xor({},{})",
            self.names[u as usize - 1],
            self.names[v as usize - 1]
        );
        let p1 = self.vertex(format!("{base}/p1"));
        let p2 = self.vertex(format!("{base}/p2"));
        self.edge(u, v);
        self.edge(u, p1);
        self.edge(p1, p2);
        self.edge(p2, v);
        self.xor_privates.push((p1, p2));
    }

    fn finish(self) -> Result<Graph> {
        let mut g = Graph::new(self.names.len() as u32, self.edges)?;
        for (k, name) in self.names.into_iter().enumerate() {
            g.set_name(k as u32 + 1, name);
        }
        Ok(g)
    }
}

fn check_for(c: &CspInstance, b: u8) -> Result<()> {
    let report = validate_csp(c);
    if !report.is_ok() {
        return input(format!("invalid CSP: {}", report.violations.join("; ")));
    }
    if c.b != b {
        return input(format!("construction needs B = {b}, got {}", c.b));
    }
    Ok(())
}

fn sigma_name(t: &[u8]) -> String {
    let vals: Vec<String> = t.iter().map(u8::to_string).collect();
    format!("sigma({})", vals.join(","))
}

/// Allowed tuples with the vertex created for each.
type TupleVertices = Vec<(Vec<u8>, u32)>;

/// Vertex ids of the induced construction.
struct InducedLayout {
    builder: Builder,
    /// `[p1, p2, p3, p4]` for V1 blocks, `[p, p1, p2, p3]` for V2 blocks.
    blocks: BTreeMap<(u32, usize), [u32; 4]>,
    /// `(w_c, [(σ, y_{c,σ})])` per constraint.
    constraints: Vec<(u32, TupleVertices)>,
    counts: GadgetCounts,
}

fn build_induced(c: &CspInstance) -> Result<InducedLayout> {
    check_for(c, 3)?;
    let mut bld = Builder::default();
    let mut blocks: BTreeMap<(u32, usize), [u32; 4]> = BTreeMap::new();
    let mut constraints = Vec::new();
    let mut counts = GadgetCounts::default();
    let by_bag: BTreeMap<usize, usize> =
        c.constraints.iter().enumerate().map(|(k, con)| (con.bag, k)).collect();
    for j in 1..=c.bags.len() {
        for &x in &c.bags[j - 1] {
            let prev = blocks.get(&(x, j - 1)).copied();
            let name = |s: &str| format!("x{x}/bag{j}/{s}");
            let block = match c.class_of(x).expect("validated") {
                VarClass::V1 => {
                    counts.l1 += 1;
                    let p1 = match prev {
                        Some(b) => b[3],
                        None => bld.vertex(name("p1")),
                    };
                    let p2 = bld.vertex(name("p2"));
                    let p3 = bld.vertex(name("p3"));
                    let p4 = bld.vertex(name("p4"));
                    bld.edge(p1, p2);
                    bld.edge(p2, p3);
                    bld.edge(p3, p4);
                    [p1, p2, p3, p4]
                }
                VarClass::V2 => {
                    counts.l2 += 1;
                    let b = [name("p"), name("p1"), name("p2"), name("p3")].map(|s| bld.vertex(s));
                    for a in 0..4 {
                        for d in a + 1..4 {
                            bld.edge(b[a], b[d]);
                        }
                    }
                    if let Some(pb) = prev {
                        for (k, &u) in pb.iter().enumerate().skip(1) {
                            for (k2, &v) in b.iter().enumerate().skip(1) {
                                if k != k2 {
                                    bld.edge(u, v);
                                }
                            }
                        }
                    }
                    b
                }
            };
            blocks.insert((x, j), block);
        }
        if let Some(&k) = by_bag.get(&j) {
            counts.m += 1;
            let con = &c.constraints[k];
            let w = bld.vertex(format!("c{}/w", k + 1));
            let mut ys = Vec::new();
            for t in con.satisfying() {
                let y = bld.vertex(format!("c{}/{}/y", k + 1, sigma_name(&t)));
                ys.push((t, y));
            }
            let clique: Vec<u32> = std::iter::once(w).chain(ys.iter().map(|p| p.1)).collect();
            for a in 0..clique.len() {
                for d in a + 1..clique.len() {
                    bld.edge(clique[a], clique[d]);
                }
            }
            for (t, y) in &ys {
                for (&x, &val) in con.vars.iter().zip(t) {
                    let b = blocks[&(x, j)];
                    let targets: Vec<u32> = match (c.class_of(x).expect("validated"), val) {
                        (VarClass::V1, 1) => vec![b[2]],
                        (VarClass::V1, 2) => vec![b[0], b[3]],
                        (VarClass::V1, _) => vec![b[1]],
                        (VarClass::V2, k) => {
                            (1..4).filter(|&q| q != k as usize).map(|q| b[q]).collect()
                        }
                    };
                    for v in targets {
                        bld.edge(*y, v);
                    }
                }
            }
            constraints.push((w, ys));
        }
    }
    Ok(InducedLayout {
        builder: bld,
        blocks,
        constraints,
        counts,
    })
}

/// Induced-matching instance for a CSP with `B = 3`. Vertices are numbered
/// in the order of the cutwidth arrangement, so the emitted ordering is the
/// identity.
pub fn gen_induced_instance(c: &CspInstance) -> Result<GadgetInstance> {
    let layout = build_induced(c)?;
    let counts = layout.counts;
    let graph = layout.builder.finish()?;
    let n = graph.n();
    Ok(GadgetInstance {
        graph,
        ell: counts.l1 + counts.l2 + counts.m,
        kind: GadgetKind::Induced,
        ordering: Some(LinearArrangement::identity(n)),
        counts,
    })
}

fn check_assignment(c: &CspInstance, a: &BTreeMap<u32, u8>) -> Result<()> {
    for v in &c.vars {
        match a.get(&v.id) {
            Some(&x) if x >= 1 && x <= c.b => {}
            _ => return input(format!("assignment has no valid value for variable {}", v.id)),
        }
    }
    Ok(())
}

/// Restriction of `a` to the variables of `con`, if it is allowed.
fn restricted(con: &Constraint, a: &BTreeMap<u32, u8>) -> Result<Vec<u8>> {
    let t: Vec<u8> = con.vars.iter().map(|x| a[x]).collect();
    if !con.allowed.contains(&t) {
        return input("assignment violates a constraint");
    }
    Ok(t)
}

/// The matching of size ℓ built from a satisfying assignment.
pub fn induced_witness(c: &CspInstance, a: &BTreeMap<u32, u8>) -> Result<Matching> {
    check_assignment(c, a)?;
    let layout = build_induced(c)?;
    let mut edges = Vec::new();
    for (&(x, _), b) in &layout.blocks {
        let k = a[&x] as usize;
        match c.class_of(x).expect("validated") {
            VarClass::V1 => edges.push((b[k - 1], b[k])),
            VarClass::V2 => edges.push((b[0], b[k])),
        }
    }
    for (con, (w, ys)) in c.constraints_in_bag_order().zip(&layout.constraints) {
        let t = restricted(con, a)?;
        let y = ys.iter().find(|(s, _)| *s == t).expect("allowed tuple has a vertex").1;
        edges.push((y, *w));
    }
    Matching::new(edges)
}

impl CspInstance {
    fn constraints_in_bag_order(&self) -> impl Iterator<Item = &Constraint> {
        let mut cs: Vec<&Constraint> = self.constraints.iter().collect();
        cs.sort_by_key(|con| con.bag);
        cs.into_iter()
    }
}

struct AcyclicLayout {
    builder: Builder,
    root: (u32, u32),
    /// V1: `[a, a', χ1, χ2, y1, y2, b1, b2, l1, l2]`;
    /// V2: `[u, u1, u2, u3, u4, u5, 0, 0, 0, 0]`.
    blocks: BTreeMap<(u32, usize), [u32; 10]>,
    /// `(v_c, [(σ, v_{c,σ})])` per constraint, in bag order.
    constraints: Vec<(u32, TupleVertices)>,
    counts: GadgetCounts,
}

const A: usize = 0;
const A2: usize = 1;
const CHI1: usize = 2;
const CHI2: usize = 3;
const Y1: usize = 4;
const Y2: usize = 5;
const B1: usize = 6;
const B2: usize = 7;
const L1: usize = 8;
const L2: usize = 9;

fn build_acyclic(c: &CspInstance) -> Result<AcyclicLayout> {
    check_for(c, 5)?;
    let mut bld = Builder::default();
    let r = bld.vertex("r".into());
    let r2 = bld.vertex("r'".into());
    bld.edge(r, r2);
    let mut blocks: BTreeMap<(u32, usize), [u32; 10]> = BTreeMap::new();
    let mut constraints = Vec::new();
    let mut counts = GadgetCounts::default();
    let by_bag: BTreeMap<usize, usize> =
        c.constraints.iter().enumerate().map(|(k, con)| (con.bag, k)).collect();
    for j in 1..=c.bags.len() {
        for &x in &c.bags[j - 1] {
            let prev = blocks.get(&(x, j - 1)).copied();
            let name = |s: &str| format!("x{x}/bag{j}/{s}");
            let block = match c.class_of(x).expect("validated") {
                VarClass::V1 => {
                    counts.l1 += 1;
                    let a = match prev {
                        Some(b) => b[A2],
                        None => bld.vertex(name("a")),
                    };
                    let mut b = [0u32; 10];
                    b[A] = a;
                    for (slot, s) in [
                        (A2, "a'"),
                        (CHI1, "chi1"),
                        (CHI2, "chi2"),
                        (Y1, "y1"),
                        (Y2, "y2"),
                        (B1, "b1"),
                        (B2, "b2"),
                        (L1, "l1"),
                        (L2, "l2"),
                    ] {
                        b[slot] = bld.vertex(name(s));
                    }
                    for (u, v) in [
                        (CHI1, L1),
                        (CHI2, L2),
                        (A, CHI1),
                        (A, Y1),
                        (A2, CHI2),
                        (A2, Y2),
                        (B1, B2),
                    ] {
                        bld.edge(b[u], b[v]);
                    }
                    bld.edge(r, b[CHI1]);
                    bld.edge(r, b[CHI2]);
                    for (u, v) in [(A, B1), (A2, B2), (CHI1, CHI2), (Y1, Y2)] {
                        bld.xor(b[u], b[v]);
                    }
                    b
                }
                VarClass::V2 => {
                    counts.l2 += 1;
                    let mut b = [0u32; 10];
                    b[0] = bld.vertex(name("u"));
                    for k in 1..=5 {
                        b[k] = bld.vertex(name(&format!("u{k}")));
                        bld.edge(b[0], b[k]);
                    }
                    for k1 in 1..=5 {
                        for k2 in k1 + 1..=5 {
                            bld.xor(b[k1], b[k2]);
                        }
                    }
                    if let Some(pb) = prev {
                        for (k1, &u) in pb.iter().enumerate().take(6).skip(1) {
                            for (k2, &v) in b.iter().enumerate().take(6).skip(1) {
                                if k1 != k2 {
                                    bld.xor(u, v);
                                }
                            }
                        }
                    }
                    b
                }
            };
            blocks.insert((x, j), block);
        }
        if let Some(&k) = by_bag.get(&j) {
            counts.m += 1;
            let con = &c.constraints[k];
            let mut vs = Vec::new();
            for t in con.satisfying() {
                let v = bld.vertex(format!("c{}/{}/v", k + 1, sigma_name(&t)));
                vs.push((t, v));
            }
            for a in 0..vs.len() {
                for d in a + 1..vs.len() {
                    bld.xor(vs[a].1, vs[d].1);
                }
            }
            let vc = bld.vertex(format!("c{}/v", k + 1));
            for (_, v) in &vs {
                bld.edge(vc, *v);
            }
            for (t, v) in &vs {
                for (&x, &val) in con.vars.iter().zip(t) {
                    let b = blocks[&(x, j)];
                    let targets: Vec<u32> = match (c.class_of(x).expect("validated"), val) {
                        (VarClass::V1, 1) => vec![b[B1], b[B2], b[CHI2], b[Y2]],
                        (VarClass::V1, 2) => vec![b[B1], b[B2], b[CHI1], b[Y2]],
                        (VarClass::V1, 3) => vec![b[A], b[A2], b[Y1], b[Y2]],
                        (VarClass::V1, 4) => vec![b[B1], b[B2], b[CHI2], b[Y1]],
                        (VarClass::V1, _) => vec![b[B1], b[B2], b[CHI1], b[Y1]],
                        (VarClass::V2, k) => {
                            (1..=5).filter(|&q| q != k as usize).map(|q| b[q]).collect()
                        }
                    };
                    for u in targets {
                        bld.xor(*v, u);
                    }
                }
            }
            constraints.push((vc, vs));
        }
    }
    counts.xor = bld.xor_privates.len() as u64;
    Ok(AcyclicLayout {
        builder: bld,
        root: (r, r2),
        blocks,
        constraints,
        counts,
    })
}

/// Acyclic-matching instance for a CSP with `B = 5`.
pub fn gen_acyclic_instance(c: &CspInstance) -> Result<GadgetInstance> {
    let layout = build_acyclic(c)?;
    let k = layout.counts;
    Ok(GadgetInstance {
        graph: layout.builder.finish()?,
        ell: 1 + k.xor + 2 * k.l1 + k.l2 + k.m,
        kind: GadgetKind::Acyclic,
        ordering: None,
        counts: k,
    })
}

pub fn acyclic_witness(c: &CspInstance, a: &BTreeMap<u32, u8>) -> Result<Matching> {
    check_assignment(c, a)?;
    let layout = build_acyclic(c)?;
    let mut edges = vec![layout.root];
    edges.extend(layout.builder.xor_privates.iter().copied());
    for (con, (vc, vs)) in c.constraints_in_bag_order().zip(&layout.constraints) {
        let t = restricted(con, a)?;
        let v = vs.iter().find(|(s, _)| *s == t).expect("allowed tuple has a vertex").1;
        edges.push((*vc, v));
    }
    for (&(x, _), b) in &layout.blocks {
        let k = a[&x];
        match c.class_of(x).expect("validated") {
            VarClass::V2 => edges.push((b[0], b[k as usize])),
            VarClass::V1 => {
                let pair = match k {
                    1 => [(Y1, A), (CHI1, L1)],
                    2 => [(Y1, A), (CHI2, L2)],
                    3 => [(B1, B2), (CHI1, L1)],
                    4 => [(Y2, A2), (CHI1, L1)],
                    _ => [(Y2, A2), (CHI2, L2)],
                };
                for (u, v) in pair {
                    edges.push((b[u], b[v]));
                }
            }
        }
    }
    Matching::new(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Cons<'a> = [(&'a [u32], &'a [&'a [u8]], usize)];

    fn csp(b: u8, vars: &[(u32, u8)], bags: &[&[u32]], cons: &Cons) -> CspInstance {
        CspInstance {
            b,
            vars: vars
                .iter()
                .map(|&(id, c)| Variable { id, class: VarClass::try_from(c).unwrap() })
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

    #[test]
    fn validation_examples() {
        assert!(validate_csp(&csp(3, &[(1, 1), (2, 2)], &[&[1], &[1, 2]], &[])).is_ok());
        let jump = csp(3, &[(1, 1), (2, 1)], &[&[], &[1, 2]], &[]);
        assert_eq!(validate_csp(&jump).violations.len(), 1);
        let outside = csp(3, &[(1, 1), (2, 1)], &[&[1], &[1, 2]], &[(&[2], &[&[1]], 1)]);
        assert!(!validate_csp(&outside).is_ok());
        let gap = csp(3, &[(1, 1), (2, 1)], &[&[1], &[1, 2], &[2], &[1, 2]], &[]);
        assert!(validate_csp(&gap).violations.iter().any(|v| v.contains("contiguous")));
    }

    #[test]
    fn brute_examples() {
        let one = csp(3, &[(1, 1)], &[&[1]], &[(&[1], &[&[2]], 1)]);
        assert_eq!(csp_brute_solve(&one).unwrap(), Some(BTreeMap::from([(1, 2)])));
        let none = csp(3, &[(1, 1)], &[&[1]], &[(&[1], &[], 1)]);
        assert_eq!(csp_brute_solve(&none).unwrap(), None);
        let neq = csp(3, &[(1, 1), (2, 1)], &[&[1], &[1, 2]], &[(&[1, 2], &[&[1, 2], &[2, 1]], 2)]);
        assert!(csp_brute_solve(&neq).unwrap().is_some());
        let big = CspInstance {
            b: 5,
            vars: (1..=11).map(|id| Variable { id, class: VarClass::V1 }).collect(),
            bags: vec![(1..=11).collect()],
            constraints: vec![],
        };
        assert!(matches!(csp_brute_solve(&big), Err(Error::Limit(_))));
    }

    #[test]
    fn induced_single_blocks() {
        let p4 = gen_induced_instance(&csp(3, &[(1, 1)], &[&[1]], &[])).unwrap();
        assert_eq!((p4.graph.n(), p4.graph.edges(), p4.ell), (4, &[(1, 2), (2, 3), (3, 4)][..], 1));
        let k4 = gen_induced_instance(&csp(3, &[(1, 2)], &[&[1]], &[])).unwrap();
        assert_eq!((k4.graph.n(), k4.graph.edge_count(), k4.ell), (4, 6, 1));
        assert_eq!(k4.graph.name(1), Some("x1/bag1/p"));
    }

    #[test]
    fn acyclic_small_counts() {
        let empty = gen_acyclic_instance(&csp(5, &[], &[], &[])).unwrap();
        assert_eq!((empty.graph.n(), empty.graph.edge_count(), empty.ell), (2, 1, 1));
        let one = gen_acyclic_instance(&csp(5, &[(1, 1)], &[&[1]], &[])).unwrap();
        assert_eq!((one.graph.n(), one.counts.xor, one.ell), (20, 4, 7));
    }

    #[test]
    fn wrong_alphabet_is_rejected() {
        assert!(gen_induced_instance(&csp(5, &[], &[], &[])).is_err());
        assert!(gen_acyclic_instance(&csp(3, &[], &[], &[])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = csp(3, &[(1, 1), (2, 2)], &[&[1], &[1, 2]], &[(&[1, 2], &[&[1, 3]], 2)]);
        let s = c.to_json_string();
        assert!(s.contains("\"B\":3") && s.contains("\"class\":2"));
        assert_eq!(CspInstance::from_json_str(&s).unwrap(), c);
        assert!(CspInstance::from_json_str(r#"{"B":3,"vars":[{"id":1,"class":3}],"bags":[],"constraints":[]}"#).is_err());
    }
}
