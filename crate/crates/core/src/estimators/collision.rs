use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;

use super::budget::{collision_walks, walk_horizon};
use super::{endpoint_degrees, Budget, Estimate, EstimateError, EstimatorParams};
use crate::graph::{AdjacencyList, CountingOracle, GraphError};
use crate::walker::{run_batch, WalkBatchResult};

/// `β_i = min(1, 1/(2m) + λ^{2i})` for `i < horizon`.
pub fn default_beta_schedule<G: AdjacencyList + ?Sized>(lambda: f64, g: &G, horizon: usize) -> Vec<f64> {
    let floor = 1.0 / (2.0 * g.edge_count() as f64);
    (0..horizon)
        .map(|i| (floor + lambda.powi(2 * i as i32)).min(1.0))
        .collect()
}

type SparseVec = BTreeMap<usize, f64>;

/// Endpoint fractions of a batch, each divided by `sqrt(deg(v))`.
fn scaled_endpoints<G: AdjacencyList + ?Sized>(
    batch: &WalkBatchResult,
    g: &G,
    degrees: &mut BTreeMap<usize, usize>,
) -> Result<SparseVec, GraphError> {
    let walks = batch.walks as f64;
    let mut out = SparseVec::new();
    for (&v, &c) in &batch.endpoint_counts {
        let d = match degrees.get(&v) {
            Some(&d) => d,
            None => {
                let d = g.degree(v)?;
                degrees.insert(v, d);
                d
            }
        };
        out.insert(v, c as f64 / walks / (d as f64).sqrt());
    }
    Ok(out)
}

fn dot(a: &SparseVec, b: &SparseVec) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter_map(|(v, x)| large.get(v).map(|y| x * y)).sum()
}

/// Truncated-series estimate of `R(s, t)` where each transition probability
/// `P^i(s, t)` is read off as a collision probability of two walks of lengths
/// `⌈i/2⌉` and `⌊i/2⌋`.
///
/// Level `i` uses `r_i` walks for each of the four batches. The schedule
/// bounds `β_i` default to [`default_beta_schedule`].
pub fn est_tranprob_collision<G, R>(
    g: &G,
    s: usize,
    t: usize,
    p: &EstimatorParams,
    rng: &mut R,
) -> Result<Estimate, EstimateError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    p.check_epsilon()?;
    p.check_lambda()?;
    let started = Instant::now();
    let oracle = CountingOracle::new(g);
    let (ds, dt) = endpoint_degrees(&oracle, s, t)?;

    let (formula_length, length_clamped) = walk_horizon(p.epsilon, p.lambda);
    let length = p.overrides.walk_length.unwrap_or(formula_length).max(1);
    let betas = match &p.beta_schedule {
        Some(b) if b.len() < length => {
            return Err(EstimateError::InvalidParameter(format!(
                "beta schedule has {} entries, walk horizon is {length}",
                b.len()
            )))
        }
        Some(b) => b[..length].to_vec(),
        None => default_beta_schedule(p.lambda, g, length),
    };
    if let Some(bad) = betas.iter().find(|&&b| !(b > 0.0 && b <= 1.0)) {
        return Err(EstimateError::InvalidParameter(format!(
            "beta must lie in (0, 1], got {bad}"
        )));
    }
    let walks_per_level: Vec<u64> = betas
        .iter()
        .map(|&b| {
            p.overrides
                .collision_walks
                .unwrap_or_else(|| collision_walks(length, b, p.epsilon))
                .max(1)
        })
        .collect();

    let mut degrees = BTreeMap::from([(s, ds), (t, dt)]);
    let mut value = 0.0;
    for (i, &walks) in walks_per_level.iter().enumerate() {
        let mut draw = |start: usize, len: usize| -> Result<SparseVec, EstimateError> {
            let batch = run_batch(p.engine, &oracle, start, len, walks, rng)?;
            Ok(scaled_endpoints(&batch, &oracle, &mut degrees)?)
        };
        let xs = draw(s, i.div_ceil(2))?;
        let xt = draw(t, i.div_ceil(2))?;
        let ys = draw(s, i / 2)?;
        let yt = draw(t, i / 2)?;
        value += dot(&xs, &ys) - dot(&xs, &yt) - dot(&xt, &ys) + dot(&xt, &yt);
    }

    Ok(Estimate {
        value,
        success: true,
        successes: None,
        capped_walks: 0,
        capped_flag: false,
        access: oracle.stats(),
        elapsed: started.elapsed(),
        budget: Budget::Collision {
            length,
            walks_per_level,
            length_clamped: length_clamped && p.overrides.walk_length.is_none(),
        },
        params_used: p.clone(),
        note: None,
    })
}
