use std::fmt;
use std::path::PathBuf;

use effres::exact::DEFAULT_DENSE_CAP;
use effres::{EstimatorParams, LoadOptions};

/// Estimator selected for a benchmark run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    /// Transition probabilities from walk endpoints.
    Tp,
    /// Transition probabilities as walk collisions.
    Tpc,
    /// Commute-time Monte Carlo.
    Mc,
    /// First-arrival Monte Carlo (edge queries only).
    Mc2,
    /// Spanning-tree density ratio.
    St,
    /// Dense pseudoinverse.
    Exact,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Tp => "tp",
            Algo::Tpc => "tpc",
            Algo::Mc => "mc",
            Algo::Mc2 => "mc2",
            Algo::St => "st",
            Algo::Exact => "exact",
        }
    }

    /// Needs the mixing parameter λ.
    pub fn needs_lambda(self) -> bool {
        matches!(self, Algo::Tp | Algo::Tpc)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryMode {
    /// Edges drawn uniformly with replacement.
    SampledEdges(usize),
    /// Explicit pairs of original vertex ids.
    Pairs(Vec<(u64, u64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GroundTruth {
    Exact,
    None,
}

/// How λ is obtained for the transition-probability estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSource {
    Given(f64),
    /// Computed by the dense oracle; the graph must be under the cap.
    Exact,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub dataset: PathBuf,
    pub load: LoadOptions,
    pub algo: Algo,
    pub queries: QueryMode,
    pub params: EstimatorParams,
    pub lambda: LambdaSource,
    /// Odd number of independent runs per query combined by their median.
    pub repeats: usize,
    pub ground_truth: GroundTruth,
    pub exact_cap: usize,
    pub out: PathBuf,
    /// Queries run concurrently when above 1.
    pub parallel: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(dataset: impl Into<PathBuf>, algo: Algo, out: impl Into<PathBuf>) -> Self {
        BenchConfig {
            dataset: dataset.into(),
            load: LoadOptions::default(),
            algo,
            queries: QueryMode::SampledEdges(1000),
            params: EstimatorParams::default(),
            lambda: LambdaSource::Exact,
            repeats: 1,
            ground_truth: GroundTruth::None,
            exact_cap: DEFAULT_DENSE_CAP,
            out: out.into(),
            parallel: 1,
            seed: 0,
        }
    }

    /// Name used in the `dataset` column: the file stem.
    pub fn dataset_name(&self) -> String {
        self.dataset
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.dataset.display().to_string())
    }
}
