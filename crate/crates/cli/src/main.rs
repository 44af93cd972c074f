mod bench;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use matchwidth::acyclic::{self, solve_max_acyclic_weighted, AcyclicConfig};
use matchwidth::convolution::{Backend, Convolver};
use matchwidth::cwexpr::{
    ensure_irredundant, evaluate, gen_family, gen_random_expr_bounded, normalize,
    parse_with_positions, serialize, CwExpr, FamilyKind, Position,
};
use matchwidth::gadgets::{gen_acyclic_instance, gen_induced_instance, CspInstance, GadgetKind};
use matchwidth::graph::Graph;
use matchwidth::induced::{self, solve_counts, InducedConfig};
use matchwidth::oracle::{count_induced_oracle, max_acyclic_oracle, OracleLimits};
use matchwidth::partition::Reduction;

use report::{read_input, to_map, write_json, CmdResult, Failure, InputDigest, Report};

#[derive(Debug, Parser)]
#[command(name = "matchwidth", version, about = "Exact induced and acyclic matching solvers over clique-width expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Union-node convolution backend for the induced solver.
    #[arg(long, global = true, default_value = "ntt", value_parser = parse_backend)]
    convolution: Backend,
    /// Product length below which the NTT backend multiplies directly.
    #[arg(long, global = true, default_value_t = 64)]
    ntt_threshold: usize,
    /// Weighted-partition reduction for the acyclic solver: off (rmc only) or rank.
    #[arg(long, global = true, default_value = "off", value_parser = parse_reduction)]
    acreduce: Reduction,
    /// Largest accepted expression width.
    #[arg(long, global = true)]
    max_width: Option<u32>,
    /// Worker threads for the dynamic programs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pretty-print JSON with this many spaces per level.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "2")]
    json_indent: Option<usize>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: matchwidth::Error| e.to_string())
}

fn parse_reduction(s: &str) -> Result<Reduction, String> {
    s.parse().map_err(|e: matchwidth::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a solver on a clique-width expression.
    Solve {
        #[command(subcommand)]
        problem: SolveCmd,
    },
    /// Brute-force reference solvers on small graphs.
    Oracle {
        #[command(subcommand)]
        problem: OracleCmd,
    },
    /// Inspect or rewrite expressions.
    Expr {
        #[command(subcommand)]
        action: ExprCmd,
    },
    /// Generate expressions and reduction instances.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Run a benchmark suite.
    Bench {
        #[arg(long)]
        suite: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum SolveCmd {
    /// Count induced matchings of every size.
    Induced {
        #[arg(long)]
        expr: PathBuf,
    },
    /// Maximum acyclic matching.
    Acyclic {
        #[arg(long)]
        expr: PathBuf,
        /// JSON object mapping vertex ids to weights (default 1).
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct OracleOpts {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = OracleLimits::default().max_vertices)]
    max_vertices: u32,
    #[arg(long, default_value_t = OracleLimits::default().max_edges)]
    max_edges: usize,
}

#[derive(Debug, Subcommand)]
enum OracleCmd {
    Induced(OracleOpts),
    Acyclic(OracleOpts),
}

#[derive(Debug, Subcommand)]
enum ExprCmd {
    /// Parse and check irredundancy.
    Check {
        #[arg(long)]
        expr: PathBuf,
    },
    /// Drop joins whose edges all exist already.
    Normalize {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the graph the expression generates.
    Eval {
        #[arg(long)]
        expr: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum GenCmd {
    /// Expression for a standard graph family.
    Family {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduction instance from a CSP.
    Gadget {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        csp: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random irredundant expression (uses --seed).
    Random {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        ops: usize,
        #[arg(long)]
        max_vertices: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Ctx<'a> {
    global: &'a Global,
    inputs: Vec<InputDigest>,
}

impl Ctx<'_> {
    fn induced_cfg(&self) -> InducedConfig {
        InducedConfig {
            convolver: Convolver {
                backend: self.global.convolution,
                threshold: self.global.ntt_threshold,
            },
            max_width: self.global.max_width.unwrap_or(induced::DEFAULT_MAX_WIDTH),
        }
    }

    fn acyclic_cfg(&self) -> AcyclicConfig {
        AcyclicConfig {
            reduction: self.global.acreduce,
            max_width: self.global.max_width.unwrap_or(acyclic::DEFAULT_MAX_WIDTH),
        }
    }

    fn read(&mut self, p: &Path) -> CmdResult<String> {
        read_input(p, &mut self.inputs)
    }

    fn expr(&mut self, p: &Path) -> CmdResult<(CwExpr, Vec<Position>)> {
        let text = self.read(p)?;
        parse_with_positions(&text).map_err(|e| Failure::lib(e, None))
    }

    /// Parsed expression that passed the irredundancy check.
    fn checked_expr(&mut self, p: &Path) -> CmdResult<CwExpr> {
        let (e, pos) = self.expr(p)?;
        ensure_irredundant(&e).map_err(|err| Failure::lib(err, Some(&pos)))?;
        Ok(e)
    }

    fn graph(&mut self, p: &Path) -> CmdResult<Graph> {
        let text = self.read(p)?;
        let j = serde_json::from_str(&text)
            .map_err(|e| Failure::input(format!("invalid graph JSON in {}: {e}", p.display())))?;
        Ok(Graph::from_json(&j)?)
    }
}

fn write_out(path: &Path, text: &str) -> CmdResult<()> {
    std::fs::write(path, text)
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Solve { problem: SolveCmd::Induced { .. } } => "solve induced",
        Command::Solve { problem: SolveCmd::Acyclic { .. } } => "solve acyclic",
        Command::Oracle { problem: OracleCmd::Induced(_) } => "oracle induced",
        Command::Oracle { problem: OracleCmd::Acyclic(_) } => "oracle acyclic",
        Command::Expr { action: ExprCmd::Check { .. } } => "expr check",
        Command::Expr { action: ExprCmd::Normalize { .. } } => "expr normalize",
        Command::Expr { action: ExprCmd::Eval { .. } } => "expr eval",
        Command::Gen { what: GenCmd::Family { .. } } => "gen family",
        Command::Gen { what: GenCmd::Gadget { .. } } => "gen gadget",
        Command::Gen { what: GenCmd::Random { .. } } => "gen random",
        Command::Bench { .. } => "bench",
    }
    .to_string()
}

fn counts_answer<T: std::fmt::Display>(counts: &[T]) -> Map<String, Value> {
    let strs: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    let max = strs.iter().rposition(|c| c != "0").unwrap_or(0);
    to_map(json!({"counts": strs, "max_size": max}))
}

fn load_weights(ctx: &mut Ctx, path: Option<&Path>, n: u32) -> CmdResult<Vec<u64>> {
    let mut w = vec![1u64; n as usize + 1];
    let Some(p) = path else { return Ok(w) };
    let text = ctx.read(p)?;
    let map: BTreeMap<String, u64> = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("invalid weights JSON in {}: {e}", p.display())))?;
    for (k, v) in map {
        let id: u32 = k
            .parse()
            .map_err(|_| Failure::input(format!("weight key {k:?} is not a vertex id")))?;
        if id == 0 || id > n {
            return Err(Failure::input(format!("weight for vertex {id} outside 1..={n}")));
        }
        w[id as usize] = v;
    }
    Ok(w)
}

/// Runs one command; returns the answer map and an optional perf block.
fn dispatch(cmd: &Command, ctx: &mut Ctx) -> CmdResult<(Map<String, Value>, Option<Value>)> {
    let start = Instant::now();
    let timed = |stats: Value| json!({"wall_seconds": start.elapsed().as_secs_f64(), "stats": stats});
    match cmd {
        Command::Solve { problem: SolveCmd::Induced { expr } } => {
            let e = ctx.checked_expr(expr)?;
            let sol = solve_counts(&e, &ctx.induced_cfg())?;
            let stats = serde_json::to_value(&sol.stats).expect("stats serialize");
            Ok((counts_answer(&sol.counts), Some(timed(stats))))
        }
        Command::Solve { problem: SolveCmd::Acyclic { expr, weights } } => {
            let e = ctx.checked_expr(expr)?;
            let w = load_weights(ctx, weights.as_deref(), e.vertex_count())?;
            let sol = solve_max_acyclic_weighted(&e, &w, &ctx.acyclic_cfg())?;
            let stats = serde_json::to_value(&sol.stats).expect("stats serialize");
            let answer = json!({"max_weight": sol.max_weight, "max_matching_size": sol.max_matching_size()});
            Ok((to_map(answer), Some(timed(stats))))
        }
        Command::Oracle { problem } => {
            let (opts, induced) = match problem {
                OracleCmd::Induced(o) => (o, true),
                OracleCmd::Acyclic(o) => (o, false),
            };
            let g = ctx.graph(&opts.graph)?;
            let limits = OracleLimits { max_vertices: opts.max_vertices, max_edges: opts.max_edges };
            let answer = if induced {
                counts_answer(&count_induced_oracle(&g, limits)?)
            } else {
                let (k, m) = max_acyclic_oracle(&g, limits)?;
                to_map(json!({"max_matching_size": k, "matching": m}))
            };
            Ok((answer, Some(timed(Value::Null))))
        }
        Command::Expr { action: ExprCmd::Check { expr } } => {
            let e = ctx.checked_expr(expr)?;
            let answer = json!({
                "irredundant": true,
                "width": e.width(),
                "vertices": e.vertex_count(),
                "nodes": e.nodes().len(),
            });
            Ok((to_map(answer), None))
        }
        Command::Expr { action: ExprCmd::Normalize { expr, out } } => {
            let (e, pos) = ctx.expr(expr)?;
            let norm = normalize(&e).map_err(|err| Failure::lib(err, Some(&pos)))?;
            let text = serialize(&norm);
            if let Some(o) = out {
                write_out(o, &format!("{text}\n"))?;
            }
            let answer = json!({
                "expr": text,
                "removed_joins": e.nodes().len() - norm.nodes().len(),
            });
            Ok((to_map(answer), None))
        }
        Command::Expr { action: ExprCmd::Eval { expr } } => {
            let (e, _) = ctx.expr(expr)?;
            let lg = evaluate(&e);
            let mut m = to_map(lg.graph.to_json());
            let labels: BTreeMap<String, u32> =
                (1..=lg.graph.n()).map(|v| (v.to_string(), lg.label(v))).collect();
            m.insert("labels".into(), json!(labels));
            Ok((m, None))
        }
        Command::Gen { what: GenCmd::Family { kind, n, out } } => {
            let k: FamilyKind = kind.parse()?;
            let e = gen_family(k, *n)?;
            Ok((expr_answer(&e, out.as_deref())?, None))
        }
        Command::Gen { what: GenCmd::Random { width, ops, max_vertices, out } } => {
            let e = gen_random_expr_bounded(*width, *ops, max_vertices.unwrap_or(usize::MAX), ctx.global.seed)?;
            Ok((expr_answer(&e, out.as_deref())?, None))
        }
        Command::Gen { what: GenCmd::Gadget { kind, csp, out } } => {
            let k: GadgetKind = kind.parse()?;
            let text = ctx.read(csp)?;
            let c = CspInstance::from_json_str(&text)?;
            let inst = match k {
                GadgetKind::Induced => gen_induced_instance(&c)?,
                GadgetKind::Acyclic => gen_acyclic_instance(&c)?,
            };
            let j = inst.to_json();
            if let Some(o) = out {
                let graph = serde_json::to_string(&j.graph).expect("graph serializes");
                write_out(o, &format!("{graph}\n"))?;
            }
            let mut m = to_map(j);
            m.insert("counts".into(), json!(inst.counts));
            Ok((m, None))
        }
        Command::Bench { suite } => {
            let text = ctx.read(suite)?;
            let (icfg, acfg) = (ctx.induced_cfg(), ctx.acyclic_cfg());
            let (cases, perf) = bench::run_suite(suite, &text, &icfg, &acfg, &mut ctx.inputs)?;
            let mut m = Map::new();
            m.insert("cases".into(), cases);
            Ok((m, Some(perf)))
        }
    }
}

fn expr_answer(e: &CwExpr, out: Option<&Path>) -> CmdResult<Map<String, Value>> {
    let text = serialize(e);
    if let Some(o) = out {
        write_out(o, &format!("{text}\n"))?;
    }
    Ok(to_map(json!({
        "expr": text,
        "width": e.width(),
        "vertices": e.vertex_count(),
    })))
}

fn run_block(cli: &Cli, inputs: &[InputDigest]) -> Value {
    let g = &cli.global;
    json!({
        "command": command_name(&cli.command),
        "inputs": inputs,
        "options": {
            "convolution": match g.convolution { Backend::Ntt => "ntt", Backend::Schoolbook => "schoolbook" },
            "ntt_threshold": g.ntt_threshold,
            "acreduce": match g.acreduce { Reduction::Rmc => "off", Reduction::Rank => "rank" },
            "max_width": g.max_width,
            "seed": g.seed,
        },
    })
}

fn execute(cli: &Cli) -> CmdResult<Value> {
    let mut ctx = Ctx { global: &cli.global, inputs: Vec::new() };
    let (answer, perf) = dispatch(&cli.command, &mut ctx)?;
    let run = run_block(cli, &ctx.inputs);
    Ok(Report { answer, run, perf }.to_value())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.global.threads {
        Some(0) => Err(Failure::input("--threads must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Failure { code: 1, body: json!({"kind": "internal", "message": e.to_string()}) }),
        },
        None => execute(&cli),
    };
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(v) => {
            if write_json(&v, cli.global.json_indent, &mut stdout).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            let _ = write_json(&json!({"error": f.body}), cli.global.json_indent, &mut stdout);
            ExitCode::from(f.code as u8)
        }
    }
}
