//! Benchmark suites: a JSON list of cases, each solved `repeat` times.
//!
//! ```json
//! {"repeat": 3, "cases": [
//!   {"name": "k50", "problem": "induced", "family": {"kind": "complete", "n": 50}},
//!   {"name": "r1", "problem": "acyclic",
//!    "random": {"width": 3, "ops": 40, "max_vertices": 10, "seed": 1}},
//!   {"name": "p5", "problem": "induced", "expr": "p5.cwe"}
//! ]}
//! ```
//! Relative `expr` paths are resolved against the suite file's directory.

use std::path::Path;
use std::time::Instant;

use serde::Deserialize;
use serde_json::{json, Value};

use matchwidth::acyclic::{solve_max_acyclic, AcyclicConfig};
use matchwidth::cwexpr::{gen_family, gen_random_expr_bounded, parse_with_positions, CwExpr, FamilyKind};
use matchwidth::induced::{solve_counts, InducedConfig};

use crate::report::{read_input, CmdResult, Failure, InputDigest};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default = "one")]
    pub repeat: usize,
    pub cases: Vec<Case>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub problem: Problem,
    #[serde(default)]
    pub expr: Option<String>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub random: Option<RandomSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Induced,
    Acyclic,
}

#[derive(Debug, Deserialize)]
pub struct FamilySpec {
    pub kind: String,
    pub n: u32,
}

#[derive(Debug, Deserialize)]
pub struct RandomSpec {
    pub width: u32,
    pub ops: usize,
    #[serde(default)]
    pub max_vertices: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn case_expr(c: &Case, base: &Path, inputs: &mut Vec<InputDigest>) -> CmdResult<CwExpr> {
    match (&c.expr, &c.family, &c.random) {
        (Some(p), None, None) => {
            let path = base.join(p);
            let text = read_input(&path, inputs)?;
            let (e, pos) = parse_with_positions(&text).map_err(|e| Failure::lib(e, None))?;
            matchwidth::cwexpr::ensure_irredundant(&e).map_err(|e| Failure::lib(e, Some(&pos)))?;
            Ok(e)
        }
        (None, Some(f), None) => {
            let kind: FamilyKind = f.kind.parse()?;
            Ok(gen_family(kind, f.n)?)
        }
        (None, None, Some(r)) => Ok(gen_random_expr_bounded(
            r.width,
            r.ops,
            r.max_vertices.unwrap_or(usize::MAX),
            r.seed,
        )?),
        _ => Err(Failure::input(format!(
            "case {:?} needs exactly one of expr, family, random",
            c.name
        ))),
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Runs a suite; returns `(cases answer, perf block)`.
pub fn run_suite(
    suite_path: &Path,
    text: &str,
    induced: &InducedConfig,
    acyclic: &AcyclicConfig,
    inputs: &mut Vec<InputDigest>,
) -> CmdResult<(Value, Value)> {
    let suite: Suite = serde_json::from_str(text)
        .map_err(|e| Failure::input(format!("invalid suite JSON: {e}")))?;
    if suite.repeat == 0 {
        return Err(Failure::input("repeat must be at least 1"));
    }
    let base = suite_path.parent().unwrap_or(Path::new("."));
    let mut answers = Vec::new();
    let mut perf = Vec::new();
    for case in &suite.cases {
        let e = case_expr(case, base, inputs)?;
        let mut samples = Vec::with_capacity(suite.repeat);
        let mut answer = Value::Null;
        let mut stats = Value::Null;
        for _ in 0..suite.repeat {
            let start = Instant::now();
            let (a, s) = match case.problem {
                Problem::Induced => {
                    let sol = solve_counts(&e, induced)?;
                    let counts: Vec<String> = sol.counts.iter().map(|c| c.to_string()).collect();
                    (
                        json!({"counts": counts, "max_size": sol.max_size()}),
                        serde_json::to_value(&sol.stats).expect("stats serialize"),
                    )
                }
                Problem::Acyclic => {
                    let sol = solve_max_acyclic(&e, acyclic)?;
                    (
                        json!({"max_weight": sol.max_weight, "max_matching_size": sol.max_matching_size()}),
                        serde_json::to_value(&sol.stats).expect("stats serialize"),
                    )
                }
            };
            samples.push(start.elapsed().as_secs_f64());
            answer = a;
            stats = s;
        }
        answers.push(json!({
            "name": case.name,
            "problem": match case.problem { Problem::Induced => "induced", Problem::Acyclic => "acyclic" },
            "width": e.width(),
            "vertices": e.vertex_count(),
            "answer": answer,
        }));
        let med = median(&mut samples.clone());
        perf.push(json!({
            "name": case.name,
            "median_seconds": med,
            "samples": samples,
            "stats": stats,
        }));
    }
    Ok((json!(answers), json!({"cases": perf})))
}
