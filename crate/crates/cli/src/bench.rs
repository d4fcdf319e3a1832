use std::thread;
use std::time::Instant;

use effres::estimators::{est_mc, est_mc2, est_spantree, est_tranprob, est_tranprob_collision, median_boost};
use effres::exact::{spectral_lambda, ExactError, ResistanceOracle};
use effres::graph::load_path;
use effres::rng::{fork_key, master, substream, StreamRng};
use effres::{AccessStats, Estimate, EstimateError, EstimatorParams, Graph, GraphError, LoadOptions};
use rand::Rng;

use crate::config::{Algo, BenchConfig, GroundTruth, LambdaSource, QueryMode};
use crate::report::QueryRecord;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("loading graph: {0}")]
    Load(#[from] GraphError),
    #[error("dense oracle: {0}")]
    Exact(#[from] ExactError),
    #[error("pair ({0}, {1}) references a vertex not in the graph")]
    UnknownVertex(u64, u64),
    #[error("the walk on this graph is periodic (bipartite); tp and tpc need lambda < 1")]
    Periodic,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("writing output: {0}")]
    Output(String),
}

/// Edges drawn uniformly and independently with replacement, as `(u, v)` with `u < v`.
pub fn sample_edge_queries<R: Rng + ?Sized>(g: &Graph, count: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.is_empty() {
        return Vec::new();
    }
    (0..count).map(|_| edges[rng.gen_range(0..edges.len())]).collect()
}

/// Aggregates of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub dataset: String,
    pub algo: Algo,
    pub vertices: usize,
    pub edges: usize,
    pub load: LoadOptions,
    /// λ handed to the estimators, when the algorithm uses one.
    pub lambda: Option<f64>,
    pub params: EstimatorParams,
    pub queries: usize,
    pub succeeded: usize,
    pub concurrent: bool,
    pub sorted_wall_ns: Vec<u64>,
    pub sorted_rel_errors: Vec<f64>,
}

impl Summary {
    /// Share of queries with a relative error of at most `tol`; `None` without ground truth.
    pub fn fraction_within(&self, tol: f64) -> Option<f64> {
        if self.sorted_rel_errors.is_empty() {
            return None;
        }
        let within = self.sorted_rel_errors.partition_point(|&e| e <= tol);
        Some(within as f64 / self.queries as f64)
    }

    pub fn total_wall_ns(&self) -> u64 {
        self.sorted_wall_ns.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub records: Vec<QueryRecord>,
    pub summary: Summary,
}

/// Loads the dataset and runs [`run_bench_on`].
pub fn run_bench(config: &BenchConfig) -> Result<BenchOutput, BenchError> {
    let graph = load_path(&config.dataset, &config.load)?;
    run_bench_on(&graph, config)
}

/// Runs every query of `config` against `graph`. Estimator errors are recorded
/// per query with `success = false`; configuration errors abort.
pub fn run_bench_on(graph: &Graph, config: &BenchConfig) -> Result<BenchOutput, BenchError> {
    if config.repeats == 0 || config.repeats.is_multiple_of(2) {
        return Err(BenchError::Config(format!(
            "repeats must be odd, got {}",
            config.repeats
        )));
    }
    let mut rng = master(config.seed);
    let queries: Vec<(usize, usize)> = match &config.queries {
        QueryMode::SampledEdges(0) => return Err(BenchError::Config("query count must be at least 1".into())),
        QueryMode::SampledEdges(count) => sample_edge_queries(graph, *count, &mut rng),
        QueryMode::Pairs(pairs) => {
            let index = graph.original_index();
            pairs
                .iter()
                .map(|&(a, b)| match (index.get(&a), index.get(&b)) {
                    (Some(&s), Some(&t)) => Ok((s, t)),
                    _ => Err(BenchError::UnknownVertex(a, b)),
                })
                .collect::<Result<_, _>>()?
        }
    };

    let needs_oracle = config.ground_truth == GroundTruth::Exact || config.algo == Algo::Exact;
    let oracle = if needs_oracle {
        Some(ResistanceOracle::new(graph, config.exact_cap)?)
    } else {
        None
    };

    let mut params = config.params.clone();
    let lambda = if config.algo.needs_lambda() {
        let lambda = match config.lambda {
            LambdaSource::Given(l) => l,
            LambdaSource::Exact => {
                let spectral = spectral_lambda(graph, config.exact_cap)?;
                if spectral.periodic {
                    return Err(BenchError::Periodic);
                }
                spectral.lambda
            }
        };
        params.lambda = lambda;
        Some(lambda)
    } else {
        None
    };

    let key = fork_key(&mut rng);
    let job = Job {
        graph,
        config,
        params: &params,
        oracle: oracle.as_ref(),
        dataset: config.dataset_name(),
        key,
    };
    let records = if config.parallel > 1 {
        job.run_parallel(&queries, config.parallel)
    } else {
        queries
            .iter()
            .enumerate()
            .map(|(j, &(s, t))| job.run_one(j, s, t))
            .collect()
    };

    let mut sorted_wall_ns: Vec<u64> = records.iter().map(|r| r.wall_ns).collect();
    sorted_wall_ns.sort_unstable();
    let mut sorted_rel_errors: Vec<f64> = records.iter().filter_map(|r| r.rel_error).collect();
    sorted_rel_errors.sort_by(f64::total_cmp);
    let summary = Summary {
        dataset: job.dataset.clone(),
        algo: config.algo,
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        load: config.load,
        lambda,
        params,
        queries: records.len(),
        succeeded: records.iter().filter(|r| r.success).count(),
        concurrent: config.parallel > 1,
        sorted_wall_ns,
        sorted_rel_errors,
    };
    Ok(BenchOutput { records, summary })
}

struct Job<'a> {
    graph: &'a Graph,
    config: &'a BenchConfig,
    params: &'a EstimatorParams,
    oracle: Option<&'a ResistanceOracle>,
    dataset: String,
    key: u64,
}

impl Job<'_> {
    fn run_parallel(&self, queries: &[(usize, usize)], threads: usize) -> Vec<QueryRecord> {
        let mut indexed: Vec<(usize, QueryRecord)> = thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    scope.spawn(move || {
                        (w..queries.len())
                            .step_by(threads)
                            .map(|j| (j, self.run_one(j, queries[j].0, queries[j].1)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("query worker panicked"))
                .collect()
        });
        indexed.sort_by_key(|(j, _)| *j);
        indexed.into_iter().map(|(_, r)| r).collect()
    }

    /// Query `j` always runs on substream `j`, whatever the thread layout.
    fn run_one(&self, j: usize, s: usize, t: usize) -> QueryRecord {
        let mut rng = substream(self.key, j as u64);
        let exact = self
            .oracle
            .map(|o| o.resistance(s, t).expect("query vertices are in range"));
        let started = Instant::now();
        let result = match (self.config.algo, self.oracle) {
            (Algo::Exact, Some(oracle)) => Ok(Outcome {
                value: oracle.resistance(s, t).expect("query vertices are in range"),
                access: AccessStats::default(),
                success: true,
                note: None,
            }),
            _ if self.config.repeats > 1 => median_boost(
                |sub| run_estimator(self.config.algo, self.graph, s, t, self.params, sub),
                self.config.repeats,
                &mut rng,
            )
            .map(Outcome::from),
            _ => run_estimator(self.config.algo, self.graph, s, t, self.params, &mut rng).map(Outcome::from),
        };
        let wall_ns = started.elapsed().as_nanos() as u64;

        let exact = exact.filter(|_| self.config.ground_truth == GroundTruth::Exact);
        let mut record = QueryRecord {
            dataset: self.dataset.clone(),
            algo: self.config.algo.name().to_string(),
            s: self.graph.original_id(s),
            t: self.graph.original_id(t),
            estimate: None,
            exact,
            rel_error: None,
            deg_q: 0,
            nbr_q: 0,
            samp_q: 0,
            wall_ns,
            success: false,
            note: None,
        };
        match result {
            Ok(out) => {
                record.estimate = Some(out.value);
                record.deg_q = out.access.degree_queries;
                record.nbr_q = out.access.neighbor_queries;
                record.samp_q = out.access.vertex_samples;
                record.success = out.success;
                record.note = out.note;
                if let Some(r) = exact.filter(|&r| r > 0.0) {
                    record.rel_error = Some((r - out.value).abs() / r);
                }
            }
            Err(e) => record.note = Some(e.to_string()),
        }
        record
    }
}

struct Outcome {
    value: f64,
    access: AccessStats,
    success: bool,
    note: Option<String>,
}

impl From<Estimate> for Outcome {
    fn from(est: Estimate) -> Self {
        Outcome {
            value: est.value,
            access: est.access,
            success: est.success,
            note: est.note,
        }
    }
}

/// One estimator call on the query pair.
pub fn run_estimator(
    algo: Algo,
    g: &Graph,
    s: usize,
    t: usize,
    p: &EstimatorParams,
    rng: &mut StreamRng,
) -> Result<Estimate, EstimateError> {
    match algo {
        Algo::Tp => est_tranprob(g, s, t, p, rng),
        Algo::Tpc => est_tranprob_collision(g, s, t, p, rng),
        Algo::Mc => est_mc(g, s, t, p, rng),
        Algo::Mc2 => est_mc2(g, s, t, p, rng),
        Algo::St => est_spantree(g, s, t, p.epsilon, p.delta, p, rng),
        Algo::Exact => Err(EstimateError::InvalidParameter(
            "the exact algorithm runs through the dense oracle".into(),
        )),
    }
}
