use std::time::Instant;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Zipf};

use super::budget::AppNumStBudget;
use super::{check_unit, endpoint_degrees, Budget, Estimate, EstimateError, EstimatorParams};
use crate::graph::{AccessStats, AdjacencyList, ContractedView, CountingOracle};
use crate::rng::{fork_key, substream};
use crate::walker::simple_walk;

/// Result of one spanning-tree density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct AppNumSt {
    /// Estimate `Z` of `ln T(G) / n`.
    pub value: f64,
    /// Mean of `ln(2 deg(v))` over the sampled vertices.
    pub mean_log_degree: f64,
    /// Trials whose lazy walk ended where it started.
    pub returns: u64,
    pub budget: AppNumStBudget,
    pub access: AccessStats,
}

/// Estimates `ln T(G) / n` from lazy-walk return probabilities.
///
/// With `s = H_{2r-1}`, each of `N` trials picks a uniform vertex `x` and a
/// length `t` with probability `1/(s t)`, and records whether a `t`-step lazy
/// walk from `x` ends at `x`. Then
///
/// `Z = -ln(4m)/n + W̃ - s (Σ Y)/N + s/n`
///
/// where `W̃` is the sample mean of `ln(2 deg(v))` over uniform vertices.
pub fn app_num_st<G, R>(
    g: &G,
    epsilon: f64,
    delta: f64,
    p: &EstimatorParams,
    rng: &mut R,
) -> Result<AppNumSt, EstimateError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let oracle = CountingOracle::new(g);
    let n = oracle.vertex_count();
    let m = oracle.edge_count();
    if n == 0 || m == 0 {
        return Err(crate::graph::GraphError::Empty.into());
    }
    let budget = AppNumStBudget::new(epsilon, delta, n, &p.overrides)?;
    let lengths = Zipf::new(2 * budget.r - 1, 1.0).expect("support is non-empty");

    let key = fork_key(rng);
    let mut returns = 0u64;
    for i in 0..budget.iterations {
        let mut stream = substream(key, i);
        let x = oracle.sample_vertex(&mut stream);
        let t = lengths.sample(&mut stream) as u64;
        // A lazy walk of t steps moves Binomial(t, 1/2) times.
        let moves = Binomial::new(t, 0.5).expect("valid binomial").sample(&mut stream);
        if simple_walk(&oracle, x, moves as usize, &mut stream)? == x {
            returns += 1;
        }
    }

    let mut stream = substream(key, budget.iterations);
    let mut log_degrees = 0.0;
    for _ in 0..budget.degree_samples {
        let v = oracle.sample_vertex(&mut stream);
        log_degrees += (2.0 * oracle.degree(v)? as f64).ln();
    }
    let mean_log_degree = log_degrees / budget.degree_samples as f64;

    let nf = n as f64;
    let s = budget.harmonic;
    let value = -(4.0 * m as f64).ln() / nf + mean_log_degree - s * returns as f64 / budget.iterations as f64 + s / nf;
    Ok(AppNumSt {
        value,
        mean_log_degree,
        returns,
        budget,
        access: oracle.stats(),
    })
}

/// Source of `ln T(G) / n` estimates used by [`est_spantree_with`].
pub trait LogTreeDensity {
    fn log_tree_density<G, R>(&self, g: &G, epsilon: f64, delta: f64, rng: &mut R) -> Result<f64, EstimateError>
    where
        G: AdjacencyList + ?Sized,
        R: Rng + ?Sized;
}

struct Sampled<'a>(&'a EstimatorParams);

impl LogTreeDensity for Sampled<'_> {
    fn log_tree_density<G, R>(&self, g: &G, epsilon: f64, delta: f64, rng: &mut R) -> Result<f64, EstimateError>
    where
        G: AdjacencyList + ?Sized,
        R: Rng + ?Sized,
    {
        Ok(app_num_st(g, epsilon, delta, self.0, rng)?.value)
    }
}

/// Spanning-tree estimate of `R(s, t) = T(G/{s,t}) / T(G)`, accurate to a
/// factor `e^{±εn}` with probability `1 - δ`.
pub fn est_spantree<G, R>(
    g: &G,
    s: usize,
    t: usize,
    epsilon: f64,
    delta: f64,
    p: &EstimatorParams,
    rng: &mut R,
) -> Result<Estimate, EstimateError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    est_spantree_with(&Sampled(p), g, s, t, epsilon, delta, p, rng)
}

/// [`est_spantree`] with a caller-chosen density estimator. The contracted
/// graph is a lazy view, so only `s` and `t`'s lists are read to build it.
#[allow(clippy::too_many_arguments)]
pub fn est_spantree_with<E, G, R>(
    density: &E,
    g: &G,
    s: usize,
    t: usize,
    epsilon: f64,
    delta: f64,
    p: &EstimatorParams,
    rng: &mut R,
) -> Result<Estimate, EstimateError>
where
    E: LogTreeDensity + ?Sized,
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let started = Instant::now();
    let oracle = CountingOracle::new(g);
    endpoint_degrees(&oracle, s, t)?;
    let n = oracle.vertex_count() as f64;

    let contracted = ContractedView::new(&oracle, s, t)?;
    let a = density.log_tree_density(&contracted, epsilon / 2.0, delta / 2.0, rng)?;
    let b = density.log_tree_density(&oracle, epsilon / 2.0, delta / 2.0, rng)?;

    Ok(Estimate {
        value: (a * (n - 1.0) - b * n).exp(),
        success: true,
        successes: None,
        capped_walks: 0,
        capped_flag: false,
        access: oracle.stats(),
        elapsed: started.elapsed(),
        budget: Budget::SpanTree {
            contracted_density: a,
            density: b,
        },
        params_used: p.clone(),
        note: None,
    })
}
