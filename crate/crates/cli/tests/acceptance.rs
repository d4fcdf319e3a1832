//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Set `EFFRES_ACCEPT_FULL_MC2=1` to time all 1,000 first-arrival queries on
//! the large graph instead of a prefix of them (several hours on one core).

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use effres::estimators::budget::edge_walks;
use effres::estimators::{
    app_num_st, est_mc, est_mc2, est_spantree_with, est_tranprob, est_tranprob_collision, EstimatorParams,
    LogTreeDensity,
};
use effres::exact::{
    commute_time_sim, count_spanning_trees, factorize_lifted_laplacian, spectral_lambda, ExactError, ResistanceOracle,
    DEFAULT_DENSE_CAP,
};
use effres::graph::generate::{complete, cycle, cycle5_with_chord, path, random_connected, to_edge_list};
use effres::rng::{master, substream};
use effres::walker::WalkEngine;
use effres::{AdjacencyList, EstimateError, Graph};
use effres_bench::report::{emit_csv, quantile, read_records, summary_path};
use effres_bench::{run_bench, sample_edge_queries, Algo, BenchConfig, GroundTruth, LambdaSource, QueryMode};
use rand::Rng;

// Pinned tolerances and budgets.
const IDENTITY_TOL: f64 = 1e-9;
const FOSTER_TOL: f64 = 1e-6;
const TRANPROB_EPS: f64 = 0.2;
const TRANPROB_RUNS: usize = 100;
const TRANPROB_MIN_HITS: usize = 85;
const SIGMAS: f64 = 3.0;
const MC_WALKS: u64 = 100_000;
const COMMUTE_TRIALS: u64 = 100_000;
const TREE_RATIO_TOL: f64 = 1e-9;
const APPNUMST_R: u64 = 2_000;
const APPNUMST_EPS: f64 = 0.15;
const APPNUMST_DELTA: f64 = 0.25;
const APPNUMST_TOL: f64 = 0.15;
const APPNUMST_RUNS: u64 = 100;
const APPNUMST_MIN_HITS: usize = 70;
/// Hits out of 100 observed when the K5 run was first calibrated.
const APPNUMST_BASELINE_HITS: usize = 100;
const LARGE_N: usize = 100_000;
const LARGE_M: usize = 500_000;
const BENCH_QUERIES: usize = 1_000;
const SPEEDUP: f64 = 100.0;
const MC2_SAMPLE: usize = 10;
const QUERY_GROWTH: f64 = 2.0;

struct Report {
    pass: bool,
    detail: String,
    /// Every random estimate the criterion produced, for the determinism check.
    estimates: Vec<f64>,
}

fn within(limit: Duration, started: Instant) -> (bool, String) {
    let took = started.elapsed();
    (
        took < limit,
        format!("{:.1}s (limit {}s)", took.as_secs_f64(), limit.as_secs()),
    )
}

fn resistance(g: &Graph, s: usize, t: usize) -> f64 {
    ResistanceOracle::new(g, DEFAULT_DENSE_CAP)
        .unwrap()
        .resistance(s, t)
        .unwrap()
}

fn criterion_1() -> Report {
    let started = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, g, s, t, want) in [
        ("K2", complete(2), 0, 1, 1.0),
        ("path-3 ends", path(3), 0, 2, 2.0),
        ("K3 edge", complete(3), 0, 1, 2.0 / 3.0),
        ("K4 pair", complete(4), 0, 3, 0.5),
    ] {
        let r = resistance(&g, s, t);
        if (r - want).abs() > IDENTITY_TOL {
            pass = false;
            notes.push(format!("{name}: {r} vs {want}"));
        }
    }
    let mut rng = master(101);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(10..=100);
        let m = rng.gen_range(n - 1..=3 * n);
        let g = random_connected(n, m, &mut rng);
        let oracle = ResistanceOracle::new(&g, DEFAULT_DENSE_CAP).unwrap();
        let total: f64 = g.edges().map(|(u, v)| oracle.resistance(u, v).unwrap()).sum();
        worst = worst.max((total - (n - 1) as f64).abs());
    }
    pass &= worst <= FOSTER_TOL;
    let (fast, took) = within(Duration::from_secs(5), started);
    notes.push(format!("Foster worst deviation {worst:.2e} over 20 graphs, {took}"));
    Report {
        pass: pass && fast,
        detail: notes.join("; "),
        estimates: Vec::new(),
    }
}

/// K3, K5, the chorded 5-cycle and five random connected graphs on 12 to 40 vertices.
fn tranprob_suite() -> Vec<(String, Graph)> {
    let mut graphs = vec![
        ("K3".to_string(), complete(3)),
        ("K5".to_string(), complete(5)),
        ("C5+chord".to_string(), cycle5_with_chord()),
    ];
    let mut rng = master(2024);
    for n in [12usize, 18, 24, 32, 40] {
        graphs.push((format!("random n={n}"), random_connected(n, n * (n - 1) / 4, &mut rng)));
    }
    graphs
}

fn criterion_2() -> Report {
    let started = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    let mut estimates = Vec::new();
    for (gi, (name, g)) in tranprob_suite().into_iter().enumerate() {
        let spectral = spectral_lambda(&g, DEFAULT_DENSE_CAP).unwrap();
        assert!(!spectral.periodic, "{name} is bipartite");
        let oracle = ResistanceOracle::new(&g, DEFAULT_DENSE_CAP).unwrap();
        let p = EstimatorParams {
            epsilon: TRANPROB_EPS,
            lambda: spectral.lambda,
            engine: WalkEngine::Aggregated,
            ..EstimatorParams::default()
        };
        let mut hits = [0usize; 2];
        for j in 0..TRANPROB_RUNS {
            let mut rng = substream(gi as u64, j as u64);
            let n = g.vertex_count();
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            let r = oracle.resistance(s, t).unwrap();
            let tp = est_tranprob(&g, s, t, &p, &mut rng).unwrap().value;
            let tpc = est_tranprob_collision(&g, s, t, &p, &mut rng).unwrap().value;
            for (k, v) in [tp, tpc].into_iter().enumerate() {
                hits[k] += usize::from((v - r).abs() <= TRANPROB_EPS);
                estimates.push(v);
            }
        }
        pass &= hits.iter().all(|&h| h >= TRANPROB_MIN_HITS);
        notes.push(format!(
            "{name} (λ={:.3}) tp {}/100 tpc {}/100",
            spectral.lambda, hits[0], hits[1]
        ));
    }
    let (fast, took) = within(Duration::from_secs(600), started);
    notes.push(took);
    Report {
        pass: pass && fast,
        detail: notes.join("; "),
        estimates,
    }
}

fn criterion_3() -> Report {
    let started = Instant::now();
    let mut pass = true;
    let mut worst = [0.0f64; 2];
    let mut estimates = Vec::new();
    for (gi, g) in [complete(4), cycle(5)].into_iter().enumerate() {
        for (s, t) in g.edges() {
            let r = resistance(&g, s, t);
            let mut p = EstimatorParams {
                gamma: 1.0,
                ..EstimatorParams::default()
            };
            p.overrides.commute_walks = Some(MC_WALKS);
            p.overrides.edge_walks = Some(MC_WALKS);
            let key = (gi * 100 + s * 10 + t) as u64;

            let mc = est_mc(&g, s, t, &p, &mut substream(key, 0)).unwrap();
            let q = 1.0 / (r * g.degree(s).unwrap() as f64);
            let rate = mc.successes.unwrap() as f64 / MC_WALKS as f64;
            let z = (rate - q).abs() / (q * (1.0 - q) / MC_WALKS as f64).sqrt();

            let mc2 = est_mc2(&g, s, t, &p, &mut substream(key, 1)).unwrap();
            let z2 = (mc2.value - r).abs() / (r * (1.0 - r) / MC_WALKS as f64).sqrt();

            worst = [worst[0].max(z), worst[1].max(z2)];
            pass &= z <= SIGMAS && z2 <= SIGMAS && mc.capped_walks == 0 && mc2.capped_walks == 0;
            estimates.extend([mc.value, mc2.value]);
        }
    }
    let (fast, took) = within(Duration::from_secs(120), started);
    Report {
        pass: pass && fast,
        detail: format!(
            "11 edges of K4 and C5 at {MC_WALKS} walks: worst |z| commute {:.2}, first-arrival {:.2}; {took}",
            worst[0], worst[1]
        ),
        estimates,
    }
}

fn criterion_4() -> Report {
    let started = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    let mut estimates = Vec::new();
    for (i, (name, g, s, t)) in [
        ("K3", complete(3), 0, 1),
        ("path-3", path(3), 0, 2),
        ("K4", complete(4), 0, 1),
    ]
    .into_iter()
    .enumerate()
    {
        let two_m = 2.0 * g.edge_count() as f64;
        let sample = commute_time_sim(&g, s, t, COMMUTE_TRIALS, &mut master(400 + i as u64)).unwrap();
        let r = resistance(&g, s, t);
        let z = (sample.mean / two_m - r).abs() / (sample.std_error / two_m);
        pass &= z <= SIGMAS && sample.capped == 0;
        notes.push(format!("{name} κ/2m={:.4} R={r:.4} z={z:.2}", sample.mean / two_m));
        estimates.push(sample.mean);
    }
    let (fast, took) = within(Duration::from_secs(60), started);
    notes.push(took);
    Report {
        pass: pass && fast,
        detail: notes.join("; "),
        estimates,
    }
}

fn exact_tree_count(g: &Graph) -> u64 {
    let count = count_spanning_trees(g, DEFAULT_DENSE_CAP).unwrap().exact().unwrap();
    count.to_string().parse().unwrap()
}

struct ExactDensity;

impl LogTreeDensity for ExactDensity {
    fn log_tree_density<G, R>(&self, g: &G, _: f64, _: f64, _: &mut R) -> Result<f64, EstimateError>
    where
        G: AdjacencyList + ?Sized,
        R: Rng + ?Sized,
    {
        let h = Graph::from_adjacency(g)?;
        let ln = count_spanning_trees(&h, DEFAULT_DENSE_CAP)
            .map_err(|e: ExactError| EstimateError::InvalidParameter(e.to_string()))?
            .ln()
            .expect("contracted graph stays connected");
        Ok(ln / h.vertex_count() as f64)
    }
}

fn criterion_5() -> Report {
    let started = Instant::now();
    let mut graphs = vec![complete(4), cycle(5)];
    let mut rng = master(500);
    for _ in 0..10 {
        let n = rng.gen_range(4..=8);
        let m = rng.gen_range(n - 1..=n * (n - 1) / 2);
        graphs.push(random_connected(n, m, &mut rng));
    }
    let (mut ratio_worst, mut algebra_worst, mut edges) = (0.0f64, 0.0f64, 0);
    let p = EstimatorParams::default();
    for g in &graphs {
        let trees = exact_tree_count(g) as f64;
        for (s, t) in g.edges() {
            let r = resistance(g, s, t);
            let contracted = exact_tree_count(&g.contract_pair(s, t).unwrap()) as f64;
            ratio_worst = ratio_worst.max((contracted / trees - r).abs());
            let est = est_spantree_with(&ExactDensity, g, s, t, 0.5, 0.5, &p, &mut master(0)).unwrap();
            algebra_worst = algebra_worst.max((est.value - r).abs());
            edges += 1;
        }
    }

    let k5 = complete(5);
    let target = 125f64.ln() / 5.0;
    let mut p = EstimatorParams::default();
    p.overrides.tree_r = Some(APPNUMST_R);
    let mut estimates = Vec::new();
    let hits = (0..APPNUMST_RUNS)
        .filter(|&j| {
            let z = app_num_st(&k5, APPNUMST_EPS, APPNUMST_DELTA, &p, &mut substream(5, j))
                .unwrap()
                .value;
            estimates.push(z);
            (z - target).abs() <= APPNUMST_TOL
        })
        .count();
    let (fast, took) = within(Duration::from_secs(600), started);
    let pass = ratio_worst <= TREE_RATIO_TOL
        && algebra_worst <= TREE_RATIO_TOL
        && hits >= APPNUMST_MIN_HITS
        && hits == APPNUMST_BASELINE_HITS
        && fast;
    Report {
        pass,
        detail: format!(
            "tree ratio worst {ratio_worst:.1e} and stub algebra worst {algebra_worst:.1e} over {edges} edges; \
             K5 density within {APPNUMST_TOL} in {hits}/{APPNUMST_RUNS} runs (baseline {APPNUMST_BASELINE_HITS}); {took}"
        ),
        estimates,
    }
}

fn bench_config(dataset: &Path, algo: Algo, out: &Path) -> BenchConfig {
    let mut c = BenchConfig::new(dataset, algo, out);
    c.params.epsilon = 0.1;
    c.params.gamma = 0.1;
    c.lambda = LambdaSource::Given(0.1);
    c.queries = QueryMode::SampledEdges(BENCH_QUERIES);
    c.seed = 600;
    c
}

fn write_snap(dir: &Path, name: &str, g: &Graph) -> std::path::PathBuf {
    let path = dir.join(name);
    let body = format!(
        "# Undirected graph: {name}\n# Nodes: {} Edges: {}\n# FromNodeId\tToNodeId\n{}",
        g.vertex_count(),
        g.edge_count(),
        to_edge_list(g).replace(' ', "\t")
    );
    fs::write(&path, body).unwrap();
    path
}

fn time_factorization(n: usize) -> f64 {
    let g = random_connected(n, 5 * n, &mut master(n as u64));
    let started = Instant::now();
    factorize_lifted_laplacian(&g, n).unwrap();
    started.elapsed().as_secs_f64()
}

fn mean_queries(records: &[effres_bench::QueryRecord]) -> f64 {
    records
        .iter()
        .map(|r| (r.deg_q + r.nbr_q + r.samp_q) as f64)
        .sum::<f64>()
        / records.len() as f64
}

/// First-arrival queries on the large graph: the first `count` of the sampled queries.
fn mc2_prefix(dataset: &Path, g: &Graph, out: &Path, count: usize) -> effres_bench::BenchOutput {
    let mut c = bench_config(dataset, Algo::Mc2, out);
    let queries = sample_edge_queries(g, BENCH_QUERIES, &mut master(c.seed));
    c.queries = QueryMode::Pairs(
        queries[..count]
            .iter()
            .map(|&(s, t)| (g.original_id(s), g.original_id(t)))
            .collect(),
    );
    run_bench(&c).unwrap()
}

fn criterion_6(dir: &Path) -> Report {
    let mut notes = Vec::new();
    let mut pass = true;
    let big = random_connected(LARGE_N, LARGE_M, &mut master(6));
    let big_path = write_snap(dir, "random-1e5.txt", &big);
    let refused = matches!(
        ResistanceOracle::new(&big, DEFAULT_DENSE_CAP),
        Err(ExactError::TooLarge { .. })
    );
    pass &= refused;

    let (t3, t4) = (time_factorization(1_000), time_factorization(10_000));
    let slope = (t4 / t3).log10();
    let dense = t4 * 10f64.powf(slope);
    notes.push(format!(
        "dense factorization {t3:.3}s at 1e3, {t4:.1}s at 1e4, slope {slope:.2}, projected {dense:.0}s at 1e5 (oracle refused: {refused})"
    ));

    let tp_out = dir.join("tp-1e5.csv");
    let tp = run_bench(&bench_config(&big_path, Algo::Tp, &tp_out)).unwrap();
    emit_csv(&tp.records, &tp.summary, &tp_out).unwrap();
    let tp_secs = tp.summary.total_wall_ns() as f64 / 1e9;
    let tp_fast = tp_secs * SPEEDUP < dense && tp.summary.succeeded == BENCH_QUERIES;
    pass &= tp_fast;
    notes.push(format!(
        "tp: 1000 queries in {tp_secs:.1}s, {:.0}x faster",
        dense / tp_secs
    ));

    let full = std::env::var_os("EFFRES_ACCEPT_FULL_MC2").is_some();
    let count = if full { BENCH_QUERIES } else { MC2_SAMPLE };
    let mc2 = mc2_prefix(&big_path, &big, &dir.join("mc2-1e5.csv"), count);
    let mc2_secs = mc2.summary.total_wall_ns() as f64 / 1e9 * (BENCH_QUERIES / count) as f64;
    let mc2_fast = mc2_secs * SPEEDUP < dense && mc2.summary.succeeded == count;
    pass &= mc2_fast;
    notes.push(format!(
        "mc2 (M0={}): {} queries in {:.1}s, 1000 queries {} {mc2_secs:.0}s, {:.1}x faster",
        edge_walks(1.0 / 3.0, 0.1, 0.1),
        count,
        mc2.summary.total_wall_ns() as f64 / 1e9,
        if full { "took" } else { "projected at" },
        dense / mc2_secs
    ));

    let small = random_connected(1_000, 5_000, &mut master(61));
    let small_path = write_snap(dir, "random-1e3.txt", &small);
    let small_run = run_bench(&bench_config(&small_path, Algo::Tp, &dir.join("tp-1e3.csv"))).unwrap();
    let (q3, q5) = (mean_queries(&small_run.records), mean_queries(&tp.records));
    let growth = q3.max(q5) / q3.min(q5);
    pass &= growth < QUERY_GROWTH;
    notes.push(format!("tp queries per pair {q3:.0} at 1e3, {q5:.0} at 1e5"));

    // Sorted-error report on a SNAP file small enough for ground truth.
    let mid = random_connected(2_000, 10_000, &mut master(62));
    let mid_path = write_snap(dir, "random-2e3.txt", &mid);
    let mid_out = dir.join("tp-2e3.csv");
    let mut c = bench_config(&mid_path, Algo::Tp, &mid_out);
    c.ground_truth = GroundTruth::Exact;
    let run = run_bench(&c).unwrap();
    emit_csv(&run.records, &run.summary, &mid_out).unwrap();
    let rows = read_records(&mid_out).unwrap();
    let mut errs: Vec<f64> = rows.iter().filter_map(|r| r.rel_error).collect();
    errs.sort_by(f64::total_cmp);
    let fraction = errs.iter().filter(|&&e| e <= 0.1).count() as f64 / rows.len() as f64;
    let summary = fs::read_to_string(summary_path(&mid_out)).unwrap();
    let report_ok = errs.len() == BENCH_QUERIES
        && summary.contains(&format!("fraction,rel_error_le_0.1,{fraction}"))
        && summary.contains(&format!("rel_error,q0.5,{}", quantile(&errs, 0.5).unwrap()))
        && read_records(&tp_out).unwrap().len() == BENCH_QUERIES;
    pass &= report_ok;
    notes.push(format!(
        "SNAP n=2000 report: {:.1}% of relative errors <= 0.1, median {:.3}",
        100.0 * fraction,
        quantile(&errs, 0.5).unwrap()
    ));

    let mut estimates: Vec<f64> = tp.records.iter().filter_map(|r| r.estimate).collect();
    estimates.extend(mc2.records.iter().take(1).filter_map(|r| r.estimate));
    estimates.extend(run.records.iter().filter_map(|r| r.estimate));
    Report {
        pass,
        detail: notes.join("; "),
        estimates,
    }
}

/// Reruns the stochastic criteria and compares every estimate bit for bit.
fn criterion_7(dir: &Path, first: &[(usize, Vec<f64>)]) -> Report {
    let started = Instant::now();
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for (id, before) in first {
        let again = match id {
            2 => criterion_2().estimates,
            3 => criterion_3().estimates,
            4 => criterion_4().estimates,
            5 => criterion_5().estimates,
            6 => {
                let big = random_connected(LARGE_N, LARGE_M, &mut master(6));
                let big_path = write_snap(dir, "random-1e5.txt", &big);
                let tp = run_bench(&bench_config(&big_path, Algo::Tp, &dir.join("tp-again.csv"))).unwrap();
                let mc2 = mc2_prefix(&big_path, &big, &dir.join("mc2-again.csv"), 1);
                let mut v: Vec<f64> = tp.records.iter().filter_map(|r| r.estimate).collect();
                v.extend(mc2.records.iter().filter_map(|r| r.estimate));
                let mid = random_connected(2_000, 10_000, &mut master(62));
                let mid_path = write_snap(dir, "random-2e3.txt", &mid);
                let mut c = bench_config(&mid_path, Algo::Tp, &dir.join("tp-2e3-again.csv"));
                c.ground_truth = GroundTruth::Exact;
                v.extend(run_bench(&c).unwrap().records.iter().filter_map(|r| r.estimate));
                v
            }
            _ => continue,
        };
        let same = before.len() == again.len() && before.iter().zip(&again).all(|(a, b)| a.to_bits() == b.to_bits());
        compared += before.len();
        if !same {
            mismatched.push(*id);
        }
    }
    Report {
        pass: mismatched.is_empty() && compared > 0,
        detail: format!(
            "{compared} estimates from criteria 2-6 rerun, mismatched criteria {mismatched:?}; {:.1}s",
            started.elapsed().as_secs_f64()
        ),
        estimates: Vec::new(),
    }
}

fn print_report(id: usize, report: &Report, failed: &mut Vec<usize>) {
    println!(
        "criterion {id}: {} - {}",
        if report.pass { "PASS" } else { "FAIL" },
        report.detail
    );
    if !report.pass {
        failed.push(id);
    }
}

fn main() -> ExitCode {
    // Tolerate libtest flags such as `--nocapture` passed by `cargo test`.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let dir = tempfile::tempdir().unwrap();
    let mut failed = Vec::new();
    let mut fingerprints = Vec::new();
    let reports = [
        criterion_1 as fn() -> Report,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
    ]
    .into_iter()
    .map(|f| f())
    .chain([criterion_6(dir.path())]);
    for (i, report) in reports.enumerate() {
        print_report(i + 1, &report, &mut failed);
        fingerprints.push((i + 1, report.estimates));
    }
    print_report(7, &criterion_7(dir.path(), &fingerprints), &mut failed);
    if failed.is_empty() {
        println!("acceptance: all 7 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
