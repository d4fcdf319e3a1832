use std::time::Instant;

use rand::Rng;

use super::budget::{tranprob_walks, walk_horizon};
use super::{endpoint_degrees, Budget, Estimate, EstimateError, EstimatorParams};
use crate::graph::{AdjacencyList, CountingOracle};
use crate::walker::run_batch;

/// Truncated-series estimate of `R(s, t)` from walk endpoint frequencies.
///
/// For each length `i < ℓ`, `r` walks from `s` and `r` walks from `t` estimate
/// the four transition probabilities between `s` and `t`:
///
/// `δ̂ = Σ_i X_is/(r deg s) - X_it/(r deg t) - Y_is/(r deg s) + Y_it/(r deg t)`
///
/// where `X` counts walks from `s` and `Y` walks from `t` by endpoint.
pub fn est_tranprob<G, R>(
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
    let walks = p
        .overrides
        .walks
        .unwrap_or_else(|| tranprob_walks(length, p.epsilon))
        .max(1);

    let r = walks as f64;
    let (ds, dt) = (ds as f64, dt as f64);
    let mut value = 0.0;
    for i in 0..length {
        let from_s = run_batch(p.engine, &oracle, s, i, walks, rng)?;
        let from_t = run_batch(p.engine, &oracle, t, i, walks, rng)?;
        value +=
            from_s.count(s) as f64 / (r * ds) - from_s.count(t) as f64 / (r * dt) - from_t.count(s) as f64 / (r * ds)
                + from_t.count(t) as f64 / (r * dt);
    }

    Ok(Estimate {
        value,
        success: true,
        successes: None,
        capped_walks: 0,
        capped_flag: false,
        access: oracle.stats(),
        elapsed: started.elapsed(),
        budget: Budget::TranProb {
            length,
            walks,
            length_clamped: length_clamped && p.overrides.walk_length.is_none(),
        },
        params_used: p.clone(),
        note: None,
    })
}
