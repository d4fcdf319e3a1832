//! CSV output: one row per query, plus a sibling summary file.

use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{BenchError, Summary};

pub const HEADER: &str = "dataset,algo,s,t,estimate,exact,rel_error,deg_q,nbr_q,samp_q,wall_ns,success";

/// Quantile levels written for runtimes and relative errors.
pub const QUANTILES: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// One row of the per-query CSV. Vertex ids are the dataset's original ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub dataset: String,
    pub algo: String,
    pub s: u64,
    pub t: u64,
    pub estimate: Option<f64>,
    pub exact: Option<f64>,
    /// `|R - R̃| / R`, present only with a positive exact value.
    pub rel_error: Option<f64>,
    pub deg_q: u64,
    pub nbr_q: u64,
    pub samp_q: u64,
    pub wall_ns: u64,
    pub success: bool,
    /// Why a query failed or was flagged. Not part of the CSV.
    #[serde(skip)]
    pub note: Option<String>,
}

/// `results.csv` -> `results.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    let base = match out.extension() {
        Some(ext) if ext == "csv" => out.with_extension(""),
        _ => out.to_path_buf(),
    };
    let mut name = base.file_name().unwrap_or_default().to_os_string();
    name.push(".summary.csv");
    base.with_file_name(name)
}

/// Fails early if either output file cannot be created.
pub fn preflight(out: &Path) -> Result<(), BenchError> {
    for path in [out.to_path_buf(), summary_path(out)] {
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| BenchError::Output(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Nearest-rank quantile of an ascending slice.
pub fn quantile<T: Copy>(sorted: &[T], q: f64) -> Option<T> {
    if sorted.is_empty() {
        return None;
    }
    let idx = (q * (sorted.len() - 1) as f64).round() as usize;
    Some(sorted[idx.min(sorted.len() - 1)])
}

fn output_error(path: &Path, e: impl std::fmt::Display) -> BenchError {
    BenchError::Output(format!("{}: {e}", path.display()))
}

/// Writes the per-query CSV to `out` and the summary next to it.
pub fn emit_csv(records: &[QueryRecord], summary: &Summary, out: &Path) -> Result<(), BenchError> {
    let file = File::create(out).map_err(|e| output_error(out, e))?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    writer
        .write_record(HEADER.split(','))
        .map_err(|e| output_error(out, e))?;
    for record in records {
        writer.serialize(record).map_err(|e| output_error(out, e))?;
    }
    writer.flush().map_err(|e| output_error(out, e))?;

    let path = summary_path(out);
    let file = File::create(&path).map_err(|e| output_error(&path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    for row in summary_rows(summary) {
        writer.write_record(&row).map_err(|e| output_error(&path, e))?;
    }
    writer.flush().map_err(|e| output_error(&path, e))?;
    Ok(())
}

/// `section,key,value` rows: run metadata, counts, then sorted-quantile rows.
pub fn summary_rows(summary: &Summary) -> Vec<[String; 3]> {
    let row = |a: &str, b: &str, c: String| [a.to_string(), b.to_string(), c];
    let p = &summary.params;
    let mut rows = vec![
        row("section", "key", "value".into()),
        row("meta", "dataset", summary.dataset.clone()),
        row("meta", "algo", summary.algo.to_string()),
        row("meta", "vertices", summary.vertices.to_string()),
        row("meta", "edges", summary.edges.to_string()),
        row("meta", "largest_component", summary.load.largest_component.to_string()),
        row("meta", "keep_multi", summary.load.keep_multi.to_string()),
        row("meta", "epsilon", p.epsilon.to_string()),
        row(
            "meta",
            "lambda",
            summary.lambda.map(|l| l.to_string()).unwrap_or_default(),
        ),
        row("meta", "gamma", p.gamma.to_string()),
        row("meta", "delta", p.delta.to_string()),
        row("meta", "seed", p.seed.to_string()),
        row(
            "meta",
            "timing",
            if summary.concurrent { "concurrent" } else { "sequential" }.into(),
        ),
        row("count", "queries", summary.queries.to_string()),
        row("count", "succeeded", summary.succeeded.to_string()),
        row(
            "count",
            "with_ground_truth",
            summary.sorted_rel_errors.len().to_string(),
        ),
        row("total", "wall_ns", summary.total_wall_ns().to_string()),
        row(
            "fraction",
            "rel_error_le_0.1",
            summary.fraction_within(0.1).map(|f| f.to_string()).unwrap_or_default(),
        ),
    ];
    for q in QUANTILES {
        let key = format!("q{q:.1}");
        if let Some(v) = quantile(&summary.sorted_wall_ns, q) {
            rows.push(row("wall_ns", &key, v.to_string()));
        }
    }
    for q in QUANTILES {
        let key = format!("q{q:.1}");
        if let Some(v) = quantile(&summary.sorted_rel_errors, q) {
            rows.push(row("rel_error", &key, v.to_string()));
        }
    }
    rows
}

/// Parses a per-query CSV written by [`emit_csv`].
pub fn read_records(path: &Path) -> Result<Vec<QueryRecord>, BenchError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| output_error(path, e))?;
    let headers = reader.headers().map_err(|e| output_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>().join(",") != HEADER {
        return Err(output_error(path, "unexpected header"));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(|e| output_error(path, e)))
        .collect()
}

/// Reads `(s, t)` pairs of original ids: two integers per line, `#` comments.
pub fn read_pairs(text: &str) -> Result<Vec<(u64, u64)>, BenchError> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty());
        let mut next = || fields.next().and_then(|f| f.parse::<u64>().ok());
        match (next(), next()) {
            (Some(s), Some(t)) => pairs.push((s, t)),
            _ => {
                return Err(BenchError::Config(format!(
                    "pairs file line {}: expected two vertex ids",
                    i + 1
                )))
            }
        }
    }
    Ok(pairs)
}

/// Human-readable run summary for the terminal.
pub fn describe(summary: &Summary, out: &Path) -> String {
    let mut text = String::new();
    let ms = summary.total_wall_ns() as f64 / 1e6;
    let _ = writeln!(
        text,
        "{} on {} (n = {}, m = {}): {}/{} queries succeeded, total {ms:.1} ms",
        summary.algo, summary.dataset, summary.vertices, summary.edges, summary.succeeded, summary.queries
    );
    if let Some(f) = summary.fraction_within(0.1) {
        let median = quantile(&summary.sorted_rel_errors, 0.5).unwrap_or(f64::NAN);
        let _ = writeln!(
            text,
            "relative error <= 0.1 for {:.1}% of queries, median {median:.4}",
            100.0 * f
        );
    }
    let _ = write!(text, "wrote {} and {}", out.display(), summary_path(out).display());
    text
}
