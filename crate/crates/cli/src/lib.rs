//! Benchmark harness for the local effective-resistance estimators: load an
//! edge list, draw edge queries, run one estimator per query and write
//! per-query CSV rows plus a quantile summary.

pub mod bench;
pub mod config;
pub mod report;

pub use bench::{run_bench, run_bench_on, sample_edge_queries, BenchError, BenchOutput, Summary};
pub use config::{Algo, BenchConfig, GroundTruth, LambdaSource, QueryMode};
pub use report::{emit_csv, preflight, read_records, QueryRecord};
