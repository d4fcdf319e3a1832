use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use effres::exact::{count_spanning_trees, effective_resistance_exact, spectral_lambda, TreeCount, DEFAULT_DENSE_CAP};
use effres::graph::generate::{random_connected, to_edge_list};
use effres::graph::load_path;
use effres::rng::master;
use effres::walker::WalkEngine;
use effres::{EstimatorParams, LoadOptions};
use effres_bench::report::{describe, emit_csv, preflight, read_pairs};
use effres_bench::{run_bench, Algo, BenchConfig, GroundTruth, LambdaSource, QueryMode};

#[derive(Parser)]
#[command(name = "effres", version, about = "Local estimators of s-t effective resistance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimator over a batch of queries and write per-query CSV.
    Bench(Box<BenchArgs>),
    /// Print the dense-oracle resistance, λ and spanning-tree count.
    Exact(ExactArgs),
    /// Write the edge list of a random connected simple graph.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Keep repeated edges as parallel edges.
    #[arg(long)]
    keep_multi: bool,
    /// Keep every connected component instead of the largest one.
    #[arg(long)]
    all_components: bool,
}

impl GraphArgs {
    fn options(&self) -> LoadOptions {
        LoadOptions {
            largest_component: !self.all_components,
            keep_multi: self.keep_multi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    PerWalk,
    Aggregated,
}

#[derive(Args)]
struct BenchArgs {
    /// SNAP-style edge list (or a binary cache written by this tool).
    dataset: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Mixing parameter; computed by the dense oracle when omitted.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    delta: f64,
    /// Number of edges sampled with replacement as queries.
    #[arg(long, default_value_t = 1000, conflicts_with = "pairs_file")]
    queries: usize,
    /// File of explicit `s t` pairs (original ids) instead of sampled edges.
    #[arg(long)]
    pairs_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Largest vertex count the dense oracle accepts.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    exact_cap: usize,
    #[arg(long, value_enum, default_value_t = GroundTruth::None)]
    ground_truth: GroundTruth,
    #[arg(long, value_enum, default_value_t = Engine::PerWalk)]
    engine: Engine,
    /// Run this many queries concurrently.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Odd number of runs per query combined by their median.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Step cap of the Monte Carlo walks.
    #[arg(long)]
    step_cap: Option<u64>,
    /// Comma-separated β schedule for tpc.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    #[arg(long)]
    override_walk_length: Option<usize>,
    #[arg(long)]
    override_walks: Option<u64>,
    #[arg(long)]
    override_collision_walks: Option<u64>,
    #[arg(long)]
    override_commute_walks: Option<u64>,
    #[arg(long)]
    override_edge_walks: Option<u64>,
    #[arg(long)]
    override_tree_r: Option<u64>,
    #[arg(long)]
    override_tree_iterations: Option<u64>,
    #[arg(long)]
    override_tree_degree_samples: Option<u64>,
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args)]
struct ExactArgs {
    dataset: PathBuf,
    /// Original ids of the pair.
    s: u64,
    t: u64,
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    exact_cap: usize,
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench(args) => bench(*args),
        Command::Exact(args) => exact(args),
        Command::Generate(args) => {
            if args.n < 2 || args.m < args.n - 1 {
                bail!("need n >= 2 and m >= n - 1");
            }
            let g = random_connected(args.n, args.m, &mut master(args.seed));
            fs::write(&args.out, to_edge_list(&g)).with_context(|| format!("writing {}", args.out.display()))
        }
    }
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut params = EstimatorParams {
        epsilon: args.eps,
        gamma: args.gamma,
        delta: args.delta,
        beta_schedule: args.beta,
        step_cap: args.step_cap,
        engine: match args.engine {
            Engine::PerWalk => WalkEngine::PerWalk,
            Engine::Aggregated => WalkEngine::Aggregated,
        },
        seed: args.seed,
        ..EstimatorParams::default()
    };
    let o = &mut params.overrides;
    o.walk_length = args.override_walk_length;
    o.walks = args.override_walks;
    o.collision_walks = args.override_collision_walks;
    o.commute_walks = args.override_commute_walks;
    o.edge_walks = args.override_edge_walks;
    o.tree_r = args.override_tree_r;
    o.tree_iterations = args.override_tree_iterations;
    o.tree_degree_samples = args.override_tree_degree_samples;

    let queries = match &args.pairs_file {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            QueryMode::Pairs(read_pairs(&text)?)
        }
        None => QueryMode::SampledEdges(args.queries),
    };

    let mut config = BenchConfig::new(args.dataset, args.algo, args.out);
    config.load = args.graph.options();
    config.queries = queries;
    config.params = params;
    config.lambda = args.lambda.map_or(LambdaSource::Exact, LambdaSource::Given);
    config.repeats = args.repeats;
    config.ground_truth = args.ground_truth;
    config.exact_cap = args.exact_cap;
    config.parallel = args.parallel.max(1);
    config.seed = args.seed;

    preflight(&config.out)?;
    let output = run_bench(&config)?;
    emit_csv(&output.records, &output.summary, &config.out)?;
    println!("{}", describe(&output.summary, &config.out));
    Ok(())
}

fn exact(args: ExactArgs) -> Result<()> {
    let g = load_path(&args.dataset, &args.graph.options())?;
    let index = g.original_index();
    let (Some(&s), Some(&t)) = (index.get(&args.s), index.get(&args.t)) else {
        bail!("pair ({}, {}) references a vertex not in the graph", args.s, args.t);
    };
    let r = effective_resistance_exact(&g, s, t, args.exact_cap)?;
    let spectral = spectral_lambda(&g, args.exact_cap)?;
    println!("n = {}, m = {}", g.vertex_count(), g.edge_count());
    println!("R({}, {}) = {r}", args.s, args.t);
    if spectral.periodic {
        println!("lambda = {} (periodic walk)", spectral.lambda);
    } else {
        println!("lambda = {}", spectral.lambda);
    }
    match count_spanning_trees(&g, args.exact_cap)? {
        TreeCount::Disconnected => println!("disconnected: no spanning trees"),
        TreeCount::Connected { exact: Some(count), .. } => println!("spanning trees = {count}"),
        TreeCount::Connected { ln, exact: None } => println!("ln(spanning trees) = {ln}"),
    }
    Ok(())
}
