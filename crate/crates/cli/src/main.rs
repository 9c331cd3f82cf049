//! `tqp` command line: generate, bound, solve and oracle-check ternary
//! quadratic programs.
//!
//! Exit codes: 0 success, 1 IO/parse/solver failure, 2 invalid flags or an
//! instance too large for the oracle, 3 time or node limit reached.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::{BenchRow, RunReport};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use tqp::bnb::{self, dinkelbach, BnbConfig};
use tqp::instances::{self, GeneratorKind, GeneratorSpec, InstanceFile, ORACLE_LIMIT};
use tqp::vns::{model_for, vns, VnsParams};
use tqp::{relative_gap, Error, ProblemInstance};

#[derive(Parser)]
#[command(name = "tqp", version, about = "Exact solver for ternary quadratic programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Solve an instance to optimality with branch-and-bound.
    Solve(SolveArgs),
    /// Root relaxation bound before and after the cutting-plane loop.
    Bound(BoundArgs),
    /// Exact optimum by enumeration (n <= 14).
    Oracle(OracleArgs),
    /// Best value found by variable neighborhood search.
    Heuristic(HeuristicArgs),
    /// Generate and solve a seeded sweep, one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Direct,
    Dinkelbach,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Dinkelbach => "dinkelbach",
        }
    }
}

fn parse_kind(s: &str) -> Result<GeneratorKind, String> {
    GeneratorKind::parse(s).ok_or_else(|| {
        "expected one of type1, type2, type3, quto-type1, quto-type2, quto-type3, ratio".to_string()
    })
}

fn parse_percent(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(0.0..=100.0).contains(&v) {
        return Err(format!("{v} is outside [0, 100]"));
    }
    Ok(v)
}

fn parse_dim(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))?;
    if v < 2 {
        return Err("n must be at least 2".into());
    }
    Ok(v)
}

#[derive(Args)]
struct SeedArg {
    /// Random seed.
    #[arg(long, env = "TQP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: GeneratorKind,
    #[arg(long, value_parser = parse_dim)]
    n: usize,
    /// Percentage parameter of the Type-k generators.
    #[arg(long, value_parser = parse_percent, conflicts_with = "d")]
    p: Option<f64>,
    /// Density percentage of the ratio generator.
    #[arg(long, value_parser = parse_percent)]
    d: Option<f64>,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Args)]
struct SolverFlags {
    /// Relative gap at which a node is fathomed.
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    /// Minimum violation for a cut to be added.
    #[arg(long, default_value_t = 1e-3)]
    cut_tol: f64,
    /// Maximum cuts added per round.
    #[arg(long, default_value_t = 5000)]
    max_cuts: usize,
    /// Comma separated cut families, or `none`.
    #[arg(long, default_value = "triangle,pair,rlt,split,pentagonal,heptagonal")]
    cuts: String,
    /// Simulated annealing runs for pentagonal separation.
    #[arg(long, default_value_t = 500)]
    sa_runs_5: usize,
    /// Simulated annealing runs for heptagonal separation.
    #[arg(long, default_value_t = 1000)]
    sa_runs_7: usize,
    /// Seconds before giving up with the best known point.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
    /// Worker threads for the tree search.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
    /// VNS restarts for the initial upper bound.
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    /// Branching rule: most-fractional or ratio-score.
    #[arg(long)]
    branching: Option<String>,
    /// Keep the balance equality instead of projecting it out.
    #[arg(long)]
    no_facial_reduction: bool,
    #[command(flatten)]
    seed: SeedArg,
}

impl SolverFlags {
    fn config(&self) -> Result<BnbConfig, CliError> {
        if !(self.gap > 0.0) {
            return Err(CliError::usage("--gap must be positive"));
        }
        if !(self.cut_tol > 0.0) {
            return Err(CliError::usage("--cut-tol must be positive"));
        }
        if self.time_limit.is_some_and(|t| !(t >= 0.0)) {
            return Err(CliError::usage("--time-limit must be non-negative"));
        }
        let families = parse_families(&self.cuts)?;
        if let Some(b) = &self.branching {
            if !bnb::BRANCHING_NAMES.contains(&b.as_str()) {
                return Err(CliError::usage(format!(
                    "--branching: unknown rule '{b}' (expected {})",
                    bnb::BRANCHING_NAMES.join(", ")
                )));
            }
        }
        let mut cfg = BnbConfig {
            gap_tol: self.gap,
            cut_tol: self.cut_tol,
            max_cuts_per_round: self.max_cuts,
            time_limit: self.time_limit,
            node_limit: self.node_limit,
            cut_families: families,
            threads: self.threads as usize,
            seed: self.seed.seed,
            vns: VnsParams { restarts: self.restarts, ..VnsParams::default() },
            facial_reduction: !self.no_facial_reduction,
            branching: self.branching.clone(),
            ..BnbConfig::default()
        };
        cfg.kgonal_runs = BTreeMap::from([(5, self.sa_runs_5), (7, self.sa_runs_7)]);
        Ok(cfg)
    }
}

fn parse_families(s: &str) -> Result<Vec<String>, CliError> {
    if s.trim() == "none" || s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for f in s.split(',').map(str::trim) {
        if !tqp::cuts::SEPARATOR_NAMES.contains(&f) {
            return Err(CliError::usage(format!(
                "--cuts: unknown family '{f}' (expected {} or none)",
                tqp::cuts::SEPARATOR_NAMES.join(", ")
            )));
        }
        out.push(f.to_string());
    }
    Ok(out)
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// How ratio instances are solved.
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    method: Method,
    #[command(flatten)]
    flags: SolverFlags,
    /// Write a JSON run report here.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    file: PathBuf,
    #[command(flatten)]
    flags: SolverFlags,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    file: PathBuf,
}

#[derive(Args)]
struct HeuristicArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[arg(long, default_value_t = 2)]
    s_min: usize,
    /// Defaults to n.
    #[arg(long)]
    s_max: Option<usize>,
    #[arg(long, default_value_t = 2)]
    s_step: usize,
    #[arg(long, default_value_t = 3)]
    iter_max: usize,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma separated generator kinds.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind, default_value = "type1")]
    kinds: Vec<GeneratorKind>,
    /// Comma separated dimensions.
    #[arg(long, value_delimiter = ',', value_parser = parse_dim, default_value = "8")]
    sizes: Vec<usize>,
    /// Comma separated percentages (p for Type-k, d for ratio).
    #[arg(long, value_delimiter = ',', value_parser = parse_percent, default_value = "50")]
    p: Vec<f64>,
    /// Instances per (kind, n, p); seeds 0..count.
    #[arg(long, default_value_t = 5)]
    count: u64,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    method: Method,
    #[command(flatten)]
    flags: SolverFlags,
    /// CSV destination; stdout when omitted.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
    fn fatal(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::fatal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Generate(a) => cmd_generate(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Bound(a) => cmd_bound(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Heuristic(a) => cmd_heuristic(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn load(path: &Path) -> Result<InstanceFile, CliError> {
    instances::read_instance(path).map_err(|e| CliError::fatal(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, report: &RunReport) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::fatal(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::fatal(format!("{}: {e}", path.display())))
}

fn cmd_generate(a: &GenerateArgs) -> Result<u8, CliError> {
    let p = match (a.kind, a.p, a.d) {
        (GeneratorKind::Ratio, None, Some(d)) => d,
        (GeneratorKind::Ratio, Some(_), _) => return Err(CliError::usage("--p: use --d for ratio instances")),
        (GeneratorKind::Ratio, None, None) => return Err(CliError::usage("--d is required for ratio instances")),
        (_, Some(p), None) => p,
        (_, None, Some(_)) => return Err(CliError::usage("--d: only ratio instances take a density")),
        (_, None, None) => return Err(CliError::usage("--p is required")),
        (_, Some(_), Some(_)) => unreachable!("clap rejects --p with --d"),
    };
    let spec = GeneratorSpec { kind: a.kind, n: a.n, p_or_d: p, seed: a.seed.seed };
    let inst = instances::generate(&spec).map_err(|e| CliError::usage(e.to_string()))?;
    let meta = instances::meta_for(&spec);
    instances::write_instance(&inst, Some(&meta), &a.output)
        .map_err(|e| CliError::fatal(format!("{}: {e}", a.output.display())))?;
    println!("{}", a.output.display());
    println!("kind {} n {} generator {} p {} seed {}", inst.kind(), inst.dim(), a.kind.name(), p, spec.seed);
    Ok(0)
}

fn exit_for(status: &str) -> u8 {
    match status {
        "time-limit" | "node-limit" => 3,
        _ => 0,
    }
}

/// Solves `inst` with the configured method. Also used by `bench`.
fn run_solve(
    file: &InstanceFile,
    source: &str,
    method: Method,
    cfg: &BnbConfig,
) -> Result<RunReport, CliError> {
    let inst = &file.instance;
    let start = Instant::now();
    let mut report = RunReport::new(source, file, method.name(), cfg);
    match (method, inst) {
        (Method::Dinkelbach, ProblemInstance::Ratio(r)) => match dinkelbach(r, cfg, None) {
            Ok(res) => {
                report.value = Some(res.solution.value);
                report.bound = Some(res.solution.value);
                report.gap = Some(0.0);
                report.nodes = res.inner.iter().map(|s| s.nodes_explored).sum();
                for s in &res.inner {
                    for (k, v) in &s.cuts_added {
                        *report.cuts.entry(k.clone()).or_default() += v;
                    }
                }
                report.status = "optimal".into();
                report.iterations = Some(res.iterations);
                report.x = Some(res.solution.x.values().to_vec());
            }
            Err(Error::InnerSolverFailure(msg)) if msg.contains("limit") => {
                // keep the heuristic point when a parametric solve runs out of budget
                let model = model_for(inst)?;
                let s = vns(model.as_ref(), &VnsParams { seed: cfg.seed, ..cfg.vns });
                report.value = Some(s.value);
                report.status = if msg.contains("node-limit") { "node-limit" } else { "time-limit" }.into();
                report.x = Some(s.x.values().to_vec());
            }
            Err(e) => return Err(e.into()),
        },
        (Method::Dinkelbach, _) => {
            return Err(CliError::usage("--method: dinkelbach needs a ratio instance"));
        }
        (Method::Direct, _) => {
            let res = bnb::solve(inst, cfg)?;
            let st = &res.stats;
            report.value = res.solution.as_ref().map(|s| s.value);
            report.bound = st.lower_bound.is_finite().then_some(st.lower_bound);
            report.gap = st.final_gap.is_finite().then_some(st.final_gap);
            report.root_bound = st.root_bound.is_finite().then_some(st.root_bound);
            report.nodes = st.nodes_explored;
            report.cuts = st.cuts_added.clone();
            report.status = st.status.name().into();
            report.x = res.solution.map(|s| s.x.values().to_vec());
        }
    }
    if report.gap.is_none() {
        if let (Some(v), Some(b)) = (report.value, report.bound) {
            report.gap = Some(relative_gap(v, b));
        }
    }
    report.time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.10}"))
}

fn print_table(r: &RunReport) {
    println!("{:<10} {:>18} {:>18} {:>10} {:>8} {:>9} {:>12}", "status", "value", "bound", "gap(%)", "nodes", "time(s)", "cuts");
    println!(
        "{:<10} {:>18} {:>18} {:>10} {:>8} {:>9.2} {:>12}",
        r.status,
        fmt_opt(r.value),
        fmt_opt(r.bound),
        r.gap.map_or_else(|| "-".into(), |g| format!("{:.4}", 100.0 * g)),
        r.nodes,
        r.time_s,
        r.cuts.values().sum::<usize>()
    );
    if let Some(x) = &r.x {
        println!("x = {}", tqp::TernaryVector::new(x.clone()).map(|t| t.to_string()).unwrap_or_default());
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<u8, CliError> {
    let cfg = a.flags.config()?;
    let file = load(&a.file)?;
    if a.method == Method::Dinkelbach && !matches!(file.instance, ProblemInstance::Ratio(_)) {
        return Err(CliError::usage("--method: dinkelbach needs a ratio instance"));
    }
    let report = run_solve(&file, &a.file.display().to_string(), a.method, &cfg)?;
    print_table(&report);
    if let Some(p) = &a.json_out {
        write_json(p, &report)?;
    }
    if report.status == "infeasible" {
        return Err(CliError::fatal("no feasible point exists"));
    }
    Ok(exit_for(&report.status))
}

fn cmd_bound(a: &BoundArgs) -> Result<u8, CliError> {
    let cfg = a.flags.config()?;
    let file = load(&a.file)?;
    let start = Instant::now();
    let plain = bnb::root_bound(&file.instance, &cfg.clone().without_cuts())?;
    let out = if cfg.cut_families.is_empty() { plain.clone() } else { bnb::root_bound(&file.instance, &cfg)? };
    println!("bound before cuts {}", fmt_opt(Some(plain.bound)));
    println!("bound after cuts  {}", fmt_opt(Some(out.bound)));
    println!("rounds {}", out.round_bounds.len().saturating_sub(1));
    for (fam, k) in &out.added {
        println!("  {fam:<12} {k}");
    }
    if out.infeasible {
        println!("relaxation infeasible");
    }
    if let Some(p) = &a.json_out {
        let mut report = RunReport::new(&a.file.display().to_string(), &file, "bound", &cfg);
        report.bound = Some(out.bound);
        report.root_bound = Some(plain.bound);
        report.cuts = out.added.clone();
        report.round_bounds = out.round_bounds.clone();
        report.status = if out.timed_out { "time-limit" } else { "bound" }.into();
        report.time_s = start.elapsed().as_secs_f64();
        write_json(p, &report)?;
    }
    Ok(if out.timed_out { 3 } else { 0 })
}

fn cmd_oracle(a: &OracleArgs) -> Result<u8, CliError> {
    let file = load(&a.file)?;
    let n = file.instance.dim();
    if n > ORACLE_LIMIT {
        return Err(CliError::usage(format!("n = {n} exceeds the oracle limit {ORACLE_LIMIT}")));
    }
    let s = instances::brute_force(&file.instance)?;
    println!("value {}", instances::format_number(s.value));
    println!("x = {}", s.x);
    Ok(0)
}

fn cmd_heuristic(a: &HeuristicArgs) -> Result<u8, CliError> {
    let file = load(&a.file)?;
    let model = model_for(&file.instance)?;
    let params = VnsParams {
        s_min: a.s_min,
        s_max: a.s_max,
        s_step: a.s_step,
        iter_max: a.iter_max,
        restarts: a.restarts,
        seed: a.seed.seed,
    };
    let s = vns(model.as_ref(), &params);
    if !s.value.is_finite() {
        return Err(CliError::fatal("no feasible point found"));
    }
    // report the exact value rather than the incrementally updated one
    let value = file.instance.evaluate(&s.x)?;
    println!("value {}", instances::format_number(value));
    println!("x = {}", s.x);
    Ok(0)
}

fn cmd_bench(a: &BenchArgs) -> Result<u8, CliError> {
    let cfg = a.flags.config()?;
    let sink: Box<dyn std::io::Write> = match &a.output {
        Some(p) => Box::new(
            std::fs::File::create(p).map_err(|e| CliError::fatal(format!("{}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut worst = 0;
    for &kind in &a.kinds {
        let method = if kind == GeneratorKind::Ratio { a.method } else { Method::Direct };
        for &n in &a.sizes {
            for &p in &a.p {
                for seed in 0..a.count {
                    let spec = GeneratorSpec { kind, n, p_or_d: p, seed };
                    let inst = instances::generate(&spec).map_err(|e| CliError::usage(e.to_string()))?;
                    let file = InstanceFile { instance: inst, meta: Some(instances::meta_for(&spec)) };
                    let source = format!("{}-n{}-p{}-s{}", kind.name(), n, p, seed);
                    let r = run_solve(&file, &source, method, &cfg)?;
                    worst = worst.max(exit_for(&r.status));
                    w.serialize(BenchRow::from_report(&r)).map_err(|e| CliError::fatal(e.to_string()))?;
                    w.flush().map_err(|e| CliError::fatal(e.to_string()))?;
                }
            }
        }
    }
    Ok(worst)
}
