//! Local estimators for `R_G(s, t)`.
//!
//! | function | idea | guarantee (when its assumptions hold) |
//! |---|---|---|
//! | [`est_tranprob`] | truncated Neumann series of `L+`, transition probabilities from walk endpoints | additive `ε` w.p. 9/10 |
//! | [`est_tranprob_collision`] | same series, each term as a collision probability of two half-length walks | additive `ε` w.p. 9/10 |
//! | [`est_mc`] | commute-time identity, probability of reaching `t` before returning to `s` | factor `1 ± ε` w.p. 2/3 if `R <= γ` |
//! | [`est_mc2`] | for an edge `(s, t)`, probability that the first arrival at `t` uses that edge | factor `1 ± ε` w.p. `1 - δ` if `R > γ` |
//! | [`est_spantree`] | ratio of spanning-tree counts of `G/{s,t}` and `G` | factor `e^{±εn}` w.p. `1 - δ` |
//!
//! Every estimator wraps the graph in a [`CountingOracle`], so the returned
//! [`Estimate`] carries the exact number of queries spent. Sample counts come
//! from the formulas in [`budget`] unless [`Overrides`] replaces them.

pub mod budget;
mod collision;
mod commute;
mod median;
mod spantree;
mod tranprob;

use std::time::Duration;

pub use budget::{AppNumStBudget, Overrides};
pub use collision::{default_beta_schedule, est_tranprob_collision};
pub use commute::{est_mc, est_mc2};
pub use median::median_boost;
pub use spantree::{app_num_st, est_spantree, est_spantree_with, AppNumSt, LogTreeDensity};
pub use tranprob::est_tranprob;

use crate::graph::{AccessStats, AdjacencyList, CountingOracle, GraphError};
use crate::walker::WalkEngine;

#[derive(Debug, thiserror::Error)]
pub enum EstimateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("s and t are the same vertex ({0})")]
    SameVertex(usize),
    #[error("walk is periodic or non-mixing (lambda = {0}); transition-probability estimators need lambda < 1")]
    Periodic(f64),
    #[error("{s} and {t} are not adjacent")]
    NotAdjacent { s: usize, t: usize },
    #[error("no repeat succeeded")]
    NoSuccessfulRepeat,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Accuracy targets, graph parameters and sample-count controls shared by all estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorParams {
    /// Additive (transition-probability estimators) or relative (Monte Carlo) error target.
    pub epsilon: f64,
    /// Mixing parameter `max(|λ_2|, |λ_n|)` of the walk matrix, supplied by the caller.
    pub lambda: f64,
    /// Resistance threshold used by the Monte Carlo estimators.
    pub gamma: f64,
    /// Failure probability.
    pub delta: f64,
    /// `β_i` bounds for the collision estimator; defaults to [`default_beta_schedule`].
    pub beta_schedule: Option<Vec<f64>>,
    pub overrides: Overrides,
    /// Step cap for open-ended walks; defaults to `20 m max(γ, 1)`.
    pub step_cap: Option<u64>,
    pub engine: WalkEngine,
    pub seed: u64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            epsilon: 0.1,
            lambda: 0.1,
            gamma: 0.1,
            delta: 1.0 / 3.0,
            beta_schedule: None,
            overrides: Overrides::default(),
            step_cap: None,
            engine: WalkEngine::PerWalk,
            seed: 0,
        }
    }
}

impl EstimatorParams {
    pub(crate) fn check_epsilon(&self) -> Result<(), EstimateError> {
        if self.epsilon > 0.0 && self.epsilon.is_finite() {
            Ok(())
        } else {
            Err(EstimateError::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )))
        }
    }

    pub(crate) fn check_lambda(&self) -> Result<(), EstimateError> {
        if self.lambda >= 1.0 {
            Err(EstimateError::Periodic(self.lambda))
        } else if self.lambda > 0.0 {
            Ok(())
        } else {
            Err(EstimateError::InvalidParameter(format!(
                "lambda must lie in (0, 1), got {}",
                self.lambda
            )))
        }
    }

    pub(crate) fn check_gamma(&self) -> Result<(), EstimateError> {
        if self.gamma > 0.0 && self.gamma.is_finite() {
            Ok(())
        } else {
            Err(EstimateError::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )))
        }
    }

    pub(crate) fn check_delta(&self) -> Result<(), EstimateError> {
        check_unit("delta", self.delta)
    }

    /// Step cap for open-ended walks on a graph with `m` edges.
    pub fn resolved_step_cap(&self, m: usize) -> u64 {
        self.step_cap
            .unwrap_or_else(|| (20.0 * m as f64 * self.gamma.max(1.0)).ceil() as u64)
            .max(1)
    }
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<(), EstimateError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(EstimateError::InvalidParameter(format!(
            "{name} must lie in (0, 1), got {x}"
        )))
    }
}

/// Sample counts an estimator actually used.
#[derive(Debug, Clone, PartialEq)]
pub enum Budget {
    TranProb {
        length: usize,
        walks: u64,
        /// The length formula gave less than one and was raised to one.
        length_clamped: bool,
    },
    Collision {
        length: usize,
        walks_per_level: Vec<u64>,
        length_clamped: bool,
    },
    Commute {
        walks: u64,
        step_cap: u64,
    },
    FirstArrival {
        walks: u64,
        step_cap: u64,
    },
    SpanTree {
        /// Estimated `ln T(G') / (n - 1)` for the contracted graph.
        contracted_density: f64,
        /// Estimated `ln T(G) / n`.
        density: f64,
    },
    Median {
        repeats: usize,
        successful: usize,
    },
}

/// Result of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// False only on documented soft failures (e.g. no successful commute observed).
    pub success: bool,
    /// Successful walks (Monte Carlo estimators).
    pub successes: Option<u64>,
    /// Walks that hit the step cap; they count as unsuccessful.
    pub capped_walks: u64,
    /// More than 1% of the walks were capped.
    pub capped_flag: bool,
    pub access: AccessStats,
    pub elapsed: Duration,
    pub budget: Budget,
    pub params_used: EstimatorParams,
    pub note: Option<String>,
}

/// Validates `s`, `t` through the counting facade and returns their degrees.
pub(crate) fn endpoint_degrees<G: AdjacencyList + ?Sized>(
    g: &CountingOracle<'_, G>,
    s: usize,
    t: usize,
) -> Result<(usize, usize), EstimateError> {
    let ds = g.degree(s)?;
    let dt = g.degree(t)?;
    if s == t {
        return Err(EstimateError::SameVertex(s));
    }
    for (v, d) in [(s, ds), (t, dt)] {
        if d == 0 {
            return Err(GraphError::Isolated(v).into());
        }
    }
    Ok((ds, dt))
}
