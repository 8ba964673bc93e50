//! Command-line front end. Every report is a JSON document carrying the
//! command, its parameters, the master seed and the library version, so a
//! rerun of the same command line reproduces it byte for byte.
//!
//! Exit codes: 0 success, 1 a bench criterion failed, 2 invalid input,
//! 3 an enumeration or search budget was exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{self, CriterionOutcome, ALL_CRITERIA};
use crate::error::{Error, Result};
use crate::estimators::{build_oracle, rrs_estimate, size_for_guarantee, OracleConfig, OracleMode, RrsMode};
use crate::exact::{audit_variance_bound, c_value, exact_report, single_node_influences};
use crate::families;
use crate::graph::SeedSet;
use crate::io::{load_model, save_model};
use crate::maximize::{
    adaptive_maximize, brute_force_oracle, greedy_explicit, greedy_sketched, im_oracle_config, maximize_im, BaseAlgorithm,
    MaximizerResult,
};
use crate::model::DiffusionModel;
use crate::reach::reach_value;
use crate::rng::{derive_seed, Domain};
use crate::sketches::{build_sketches, SketchSet, SketchedOracle};

#[derive(Debug, Parser)]
#[command(name = "im-oracle", version, about = "Influence estimation and maximization with statistical guarantees")]
pub struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output path (the artifact for `gen` and `sketch-build`, else the report).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores). Never changes numeric output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a benchmark-family model file.
    Gen(GenArgs),
    /// Sample simulations and report reachability of a seed set in each.
    Simulate(SimulateArgs),
    /// Exact influence, variance and step profile by enumeration.
    Exact(QueryArgs),
    /// Averaging or median-of-averages estimate.
    Estimate(EstimateArgs),
    /// Build reachability sketches over a pool of simulations.
    SketchBuild(SketchBuildArgs),
    /// Query a sketch file.
    SketchQuery(SketchQueryArgs),
    /// Seed-set maximization.
    Maximize(MaximizeArgs),
    /// Check Var <= c * I * max(I, OPT_1) by enumeration.
    AuditVariance(AuditArgs),
    /// Full-simulation vs marginal-edge reverse search estimates.
    RrsCompare(RrsArgs),
    /// Run the acceptance suite.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Tree,
    Star,
    Polysimu,
    Mixture,
    Random,
    MaxCover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RandomKind {
    Ic,
    Lt,
    Bdep,
    Mixture,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Tree depth.
    #[arg(long, default_value_t = 3)]
    pub tau: u32,
    #[arg(long, default_value_t = 200)]
    pub leaves: usize,
    /// Star edges form one all-or-nothing group.
    #[arg(long)]
    pub dependent: bool,
    /// Node count (polysimu, random).
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Edge count (random).
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = RandomKind::Ic)]
    pub kind: RandomKind,
    #[arg(long, default_value_t = 2)]
    pub b: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.9)]
    pub p_max: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct QueryArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Comma-separated node ids.
    #[arg(long)]
    pub seeds: String,
    #[arg(long)]
    pub tau: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub query: QueryArgs,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Index of the first simulation.
    #[arg(long, default_value_t = 0)]
    pub start: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Avg,
    Moa,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub query: QueryArgs,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Moa)]
    pub mode: ModeArg,
    /// Overrides the model's variance constant.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, conflicts_with_all = ["eps", "delta"])]
    pub pools: Option<usize>,
    #[arg(long, conflicts_with_all = ["eps", "delta"])]
    pub pool_size: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SketchBuildArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub tau: u32,
    #[arg(long, default_value_t = 64)]
    pub k: usize,
    #[arg(long)]
    pub pool_size: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SketchQueryArgs {
    #[arg(long)]
    pub sketch: PathBuf,
    #[arg(long)]
    pub seeds: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    /// Brute force when at most a million candidate sets exist, else greedy.
    Auto,
    Brute,
    Greedy,
    Sketched,
    Adaptive,
}

#[derive(Debug, Args, Serialize)]
pub struct MaximizeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub tau: u32,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Base algorithm for `--method adaptive`.
    #[arg(long, value_enum, default_value_t = BaseArg::Greedy)]
    pub base: BaseArg,
    /// Sketch size for `--method sketched`.
    #[arg(long, default_value_t = 64)]
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BaseArg {
    Brute,
    Greedy,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub query: QueryArgs,
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct RrsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub tau: u32,
    #[arg(long, default_value_t = 100_000)]
    pub searches: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Comma-separated criterion ids (default: all).
    #[arg(long)]
    pub criteria: Option<String>,
    /// Worker count for the determinism rerun.
    #[arg(long, default_value_t = 2)]
    pub alt_threads: usize,
}

#[derive(Serialize)]
struct Versions {
    im_oracle: &'static str,
}

#[derive(Serialize)]
struct Report<'a, P: Serialize, R: Serialize> {
    command: &'a str,
    parameters: &'a P,
    master_seed: u64,
    versions: Versions,
    result: R,
}

struct Output {
    text: String,
    failed: bool,
}

fn report<P: Serialize, R: Serialize>(command: &str, parameters: &P, seed: u64, result: R) -> Result<Output> {
    let doc = Report {
        command,
        parameters,
        master_seed: seed,
        versions: Versions { im_oracle: env!("CARGO_PKG_VERSION") },
        result,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(Output { text, failed: false })
}

fn csv_only_for_tables(format: Format, command: &str) -> Result<()> {
    if format == Format::Csv {
        return Err(Error::InvalidParameter(format!("`{command}` has no tabular output; use --format json")));
    }
    Ok(())
}

fn load(path: &std::path::Path) -> Result<DiffusionModel> {
    load_model(path)
}

fn seeds_for(model: &DiffusionModel, text: &str) -> Result<SeedSet> {
    SeedSet::parse(text, model.n())
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(failed) => failed as i32,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_budget() {
                3
            } else {
                2
            }
        }
    }
}

/// Run a parsed command line, writing its output. Returns whether a bench
/// criterion failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let exec = || -> Result<Option<Output>> { dispatch(cli) };
    let out = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(exec)?,
        None => exec()?,
    };
    let Some(out) = out else { return Ok(false) };
    match (&cli.out, &cli.command) {
        (_, Command::Gen(_) | Command::SketchBuild(_)) | (None, _) => print!("{}", out.text),
        (Some(path), _) => fs::write(path, &out.text)?,
    }
    Ok(out.failed)
}

fn dispatch(cli: &Cli) -> Result<Option<Output>> {
    let seed = cli.seed;
    let out = match &cli.command {
        Command::Gen(a) => {
            csv_only_for_tables(cli.format, "gen")?;
            let path = cli.out.as_ref().ok_or_else(|| Error::InvalidParameter("gen needs --out PATH".into()))?;
            let model = generate(a, seed)?;
            let files: Vec<String> = save_model(&model, path)?.iter().map(|p| p.display().to_string()).collect();
            #[derive(Serialize)]
            struct Gen {
                files: Vec<String>,
                nodes: usize,
                kind: crate::model::ModelKind,
            }
            report("gen", a, seed, Gen { files, nodes: model.n(), kind: model.kind() })?
        }
        Command::Simulate(a) => simulate(a, seed, cli.format)?,
        Command::Exact(a) => {
            csv_only_for_tables(cli.format, "exact")?;
            let model = load(&a.model)?;
            let seeds = seeds_for(&model, &a.seeds)?;
            report("exact", a, seed, exact_report(&model, &seeds, a.tau)?)?
        }
        Command::Estimate(a) => estimate(a, seed, cli.format)?,
        Command::SketchBuild(a) => {
            csv_only_for_tables(cli.format, "sketch-build")?;
            let path =
                cli.out.as_ref().ok_or_else(|| Error::InvalidParameter("sketch-build needs --out PATH".into()))?;
            let model = load(&a.model)?;
            let pool = model.sample_range(seed, 0, a.pool_size);
            let rank_seed = derive_seed(seed, Domain::SketchRank as u64);
            let set = build_sketches(&model, &pool, a.tau, a.k, rank_seed)?;
            let mut text = serde_json::to_string(&set)?;
            text.push('\n');
            fs::write(path, text)?;
            #[derive(Serialize)]
            struct Built {
                path: String,
                nodes: usize,
                entries: usize,
                rank_seed: u64,
            }
            let entries = set.sketches.iter().map(|s| s.entries.len()).sum();
            report("sketch-build", a, seed, Built { path: path.display().to_string(), nodes: set.n(), entries, rank_seed })?
        }
        Command::SketchQuery(a) => {
            csv_only_for_tables(cli.format, "sketch-query")?;
            let set: SketchSet = serde_json::from_str(&crate::io::read_text(&a.sketch)?)?;
            let seeds = SeedSet::parse(&a.seeds, set.n())?;
            let merged = set.merged(&seeds)?.len();
            #[derive(Serialize)]
            struct Query {
                estimate: f64,
                k: usize,
                pool_size: usize,
                merged_size: usize,
                lossless: bool,
            }
            let q = Query { estimate: set.query(&seeds)?, k: set.k, pool_size: set.pool_size, merged_size: merged, lossless: merged < set.k };
            report("sketch-query", a, seed, q)?
        }
        Command::Maximize(a) => {
            csv_only_for_tables(cli.format, "maximize")?;
            report("maximize", a, seed, maximize(a, seed)?)?
        }
        Command::AuditVariance(a) => {
            csv_only_for_tables(cli.format, "audit-variance")?;
            let model = load(&a.query.model)?;
            let seeds = seeds_for(&model, &a.query.seeds)?;
            let c = match a.c {
                Some(c) => c,
                None => c_value(&model, a.query.tau)?,
            };
            report("audit-variance", a, seed, audit_variance_bound(&model, &seeds, a.query.tau, c)?)?
        }
        Command::RrsCompare(a) => rrs_compare(a, seed, cli.format)?,
        Command::Bench(a) => bench_cmd(a, seed, cli.format)?,
    };
    Ok(Some(out))
}

fn generate(a: &GenArgs, seed: u64) -> Result<DiffusionModel> {
    let p = (a.p_min, a.p_max);
    match a.family {
        FamilyArg::Tree => families::gen_tree(a.tau),
        FamilyArg::Star => families::gen_star(a.leaves, a.dependent),
        FamilyArg::Polysimu => families::gen_polysimu(a.n),
        FamilyArg::Mixture => families::gen_two_world_mixture(),
        FamilyArg::MaxCover => families::gen_max_cover_fixture(),
        FamilyArg::Random => match a.kind {
            RandomKind::Ic => families::gen_random_ic(a.n, a.m, p, (1.0, 1.0), seed),
            RandomKind::Lt => families::gen_random_lt(a.n, a.m, seed),
            RandomKind::Bdep => families::gen_random_bdep(a.n, a.m, a.b, p, seed),
            RandomKind::Mixture => families::gen_random_mixture(a.n, a.m, p, seed),
        },
    }
}

fn simulate(a: &SimulateArgs, seed: u64, format: Format) -> Result<Output> {
    let model = load(&a.query.model)?;
    let seeds = seeds_for(&model, &a.query.seeds)?;
    #[derive(Serialize)]
    struct Row {
        index: u64,
        component: usize,
        live_edges: usize,
        reach: f64,
    }
    let rows = model
        .sample_range(seed, a.start, a.count)
        .iter()
        .map(|sim| {
            Ok(Row {
                index: sim.provenance().1,
                component: sim.component(),
                live_edges: sim.live_count(),
                reach: reach_value(model.graph_for(sim), sim, &seeds, a.query.tau)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if format == Format::Csv {
        let mut text = String::from("index,component,live_edges,reach\n");
        for r in &rows {
            text.push_str(&format!("{},{},{},{}\n", r.index, r.component, r.live_edges, r.reach));
        }
        return Ok(Output { text, failed: false });
    }
    let mean = rows.iter().map(|r| r.reach).sum::<f64>() / rows.len().max(1) as f64;
    #[derive(Serialize)]
    struct Sims {
        mean_reach: f64,
        simulations: Vec<Row>,
    }
    report("simulate", a, seed, Sims { mean_reach: mean, simulations: rows })
}

fn estimate(a: &EstimateArgs, seed: u64, format: Format) -> Result<Output> {
    csv_only_for_tables(format, "estimate")?;
    let model = load(&a.query.model)?;
    let seeds = seeds_for(&model, &a.query.seeds)?;
    let tau = a.query.tau;
    let config = match (a.eps, a.delta, a.pools, a.pool_size) {
        (Some(eps), Some(delta), None, None) => {
            let c = match a.c {
                Some(c) => c,
                None => c_value(&model, tau)?,
            };
            let mode = match a.mode {
                ModeArg::Avg => OracleMode::Averaging,
                ModeArg::Moa => OracleMode::MedianOfAverages,
            };
            size_for_guarantee(eps, delta, c, mode)?
        }
        (None, None, pools, Some(size)) => OracleConfig::new(pools.unwrap_or(1), size, tau, seed)?,
        _ => {
            return Err(Error::InvalidParameter(
                "give either --eps and --delta, or --pool-size (and optionally --pools)".into(),
            ))
        }
    }
    .with_tau(tau)
    .with_seed(seed);
    let oracle = build_oracle(&model, config)?;
    let pool_averages = oracle.pool_averages(&seeds)?;
    #[derive(Serialize)]
    struct Estimate {
        estimate: f64,
        config: OracleConfig,
        pool_averages: Vec<f64>,
    }
    let estimate = crate::estimators::median_odd(&pool_averages);
    report("estimate", a, seed, Estimate { estimate, config, pool_averages })
}

fn maximize(a: &MaximizeArgs, seed: u64) -> Result<MaximizerResult> {
    let model = load(&a.model)?;
    match a.method {
        MethodArg::Auto => maximize_im(&model, a.s, a.tau, a.eps, a.delta, seed),
        MethodArg::Brute | MethodArg::Greedy | MethodArg::Sketched => {
            let c = c_value(&model, a.tau)?;
            let cfg = im_oracle_config(model.n(), a.s, a.eps, a.delta, c, a.tau)?.with_seed(seed);
            let oracle = build_oracle(&model, cfg)?;
            if a.method == MethodArg::Brute {
                brute_force_oracle(&oracle, a.s)
            } else if a.method == MethodArg::Greedy {
                greedy_explicit(&oracle, a.s)
            } else {
                let sketched = SketchedOracle::from_oracle(&oracle, a.k, derive_seed(seed, Domain::SketchRank as u64))?;
                let mut r = greedy_sketched(&sketched, a.s)?;
                r.simulations_used = cfg.total_simulations();
                r.config = Some(cfg);
                Ok(r)
            }
        }
        MethodArg::Adaptive => {
            let base = match a.base {
                BaseArg::Brute => BaseAlgorithm::Brute,
                BaseArg::Greedy => BaseAlgorithm::Greedy,
            };
            adaptive_maximize(&model, a.s, a.tau, a.eps, a.delta, base, seed)
        }
    }
}

fn rrs_compare(a: &RrsArgs, seed: u64, format: Format) -> Result<Output> {
    let model = load(&a.model)?;
    let full = rrs_estimate(&model, RrsMode::FullSimulation, a.searches, a.tau, seed)?;
    let marginal = rrs_estimate(&model, RrsMode::Marginal, a.searches, a.tau, seed)?;
    // enumeration is optional: large models report estimates only
    let optional = |r: Result<Vec<f64>>| match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_budget() => Ok(None),
        Err(e) => Err(e),
    };
    let exact = optional(single_node_influences(&model, a.tau))?;
    let marginal_expected = optional(model.marginal_ic().and_then(|m| single_node_influences(&m, a.tau)))?;
    #[derive(Serialize)]
    struct Node {
        node: usize,
        exact: Option<f64>,
        full_simulation: f64,
        full_simulation_se: f64,
        marginal: f64,
        marginal_expected: Option<f64>,
    }
    let se = full.std_errors();
    let nodes: Vec<Node> = (0..model.n())
        .map(|v| Node {
            node: v,
            exact: exact.as_ref().map(|x| x[v]),
            full_simulation: full.estimates[v],
            full_simulation_se: se[v],
            marginal: marginal.estimates[v],
            marginal_expected: marginal_expected.as_ref().map(|x| x[v]),
        })
        .collect();
    if format == Format::Csv {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        let mut text = String::from("node,exact,full_simulation,full_simulation_se,marginal,marginal_expected\n");
        for n in &nodes {
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                n.node,
                opt(n.exact),
                n.full_simulation,
                n.full_simulation_se,
                n.marginal,
                opt(n.marginal_expected)
            ));
        }
        return Ok(Output { text, failed: false });
    }
    #[derive(Serialize)]
    struct Compare {
        searches: u64,
        exact_argmax: Option<usize>,
        full_simulation_argmax: usize,
        marginal_argmax: usize,
        marginal_expected_argmax: Option<usize>,
        nodes: Vec<Node>,
    }
    let argmax = crate::estimators::argmax_lowest;
    let c = Compare {
        searches: a.searches,
        exact_argmax: exact.as_deref().map(argmax),
        full_simulation_argmax: full.argmax(),
        marginal_argmax: marginal.argmax(),
        marginal_expected_argmax: marginal_expected.as_deref().map(argmax),
        nodes,
    };
    report("rrs-compare", a, seed, c)
}

fn bench_cmd(a: &BenchArgs, seed: u64, format: Format) -> Result<Output> {
    let ids: Vec<u32> = match &a.criteria {
        None => ALL_CRITERIA.to_vec(),
        Some(list) => list
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::InvalidParameter(format!("bad criterion id {t:?}"))))
            .collect::<Result<_>>()?,
    };
    let outcomes = bench::run_suite(&ids, seed, a.alt_threads)?;
    for o in &outcomes {
        eprintln!("{}", o.line());
    }
    let failed = outcomes.iter().any(|o| !o.passed);
    if format == Format::Csv {
        return Ok(Output { text: bench::to_csv(&outcomes), failed });
    }
    #[derive(Serialize)]
    struct Row<'a> {
        id: u32,
        name: &'a str,
        passed: bool,
        summary: &'a str,
        metrics: &'a std::collections::BTreeMap<String, f64>,
    }
    let rows: Vec<Row> = outcomes
        .iter()
        .map(|o: &CriterionOutcome| Row { id: o.id, name: &o.name, passed: o.passed, summary: &o.summary, metrics: &o.metrics })
        .collect();
    let mut out = report("bench", a, seed, rows)?;
    out.failed = failed;
    Ok(out)
}
