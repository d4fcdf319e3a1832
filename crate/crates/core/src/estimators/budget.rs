//! Sample-count formulas. All logarithms are natural and every real-valued
//! count is rounded up.

use super::EstimateError;

/// Explicit sample counts that replace the formulas, for desk-scale runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Walk horizon `ℓ` of the transition-probability estimators.
    pub walk_length: Option<usize>,
    /// Walks per length `r` of the transition-probability estimator.
    pub walks: Option<u64>,
    /// Walks per level `r_i` of the collision estimator (same for every level).
    pub collision_walks: Option<u64>,
    /// Walk count `N0` of the commute estimator.
    pub commute_walks: Option<u64>,
    /// Walk count `M0` of the first-arrival estimator.
    pub edge_walks: Option<u64>,
    /// Lazy-walk length bound `r` of the spanning-tree density estimator.
    pub tree_r: Option<u64>,
    /// Return-probability trials `N` of the spanning-tree density estimator.
    pub tree_iterations: Option<u64>,
    /// Degree samples of the spanning-tree density estimator.
    pub tree_degree_samples: Option<u64>,
}

/// Walk horizon `ℓ = ⌈ln(4 / (ε(1 - λ))) / ln(1/λ)⌉`, raised to 1 if smaller.
/// The flag reports whether that happened.
pub fn walk_horizon(epsilon: f64, lambda: f64) -> (usize, bool) {
    let raw = (4.0 / (epsilon * (1.0 - lambda))).ln() / (1.0 / lambda).ln();
    let ell = raw.ceil();
    if ell < 1.0 {
        (1, true)
    } else {
        (ell as usize, false)
    }
}

/// `r = ⌈40 ℓ² ln(80ℓ) / ε²⌉`.
pub fn tranprob_walks(ell: usize, epsilon: f64) -> u64 {
    let l = ell as f64;
    (40.0 * l * l * (80.0 * l).ln() / (epsilon * epsilon)).ceil() as u64
}

/// `r_i = ⌈20000 (sqrt(ℓ³ β_i / ε²) + ℓ³ β_i^{3/2} / ε²)⌉`.
pub fn collision_walks(ell: usize, beta: f64, epsilon: f64) -> u64 {
    let l3 = (ell as f64).powi(3);
    let e2 = epsilon * epsilon;
    (20000.0 * ((l3 * beta / e2).sqrt() + l3 * beta.powf(1.5) / e2)).ceil() as u64
}

/// `N0 = ⌈3 ln 6 · γ · deg(s) / ε²⌉`.
pub fn commute_walks(gamma: f64, degree_s: usize, epsilon: f64) -> u64 {
    (3.0 * 6f64.ln() * gamma * degree_s as f64 / (epsilon * epsilon)).ceil() as u64
}

/// `M0 = ⌈3 ln(1/δ) / (ε² γ)⌉`.
pub fn edge_walks(delta: f64, epsilon: f64, gamma: f64) -> u64 {
    (3.0 * (1.0 / delta).ln() / (epsilon * epsilon * gamma)).ceil() as u64
}

/// `H_k = Σ_{1 <= t <= k} 1/t`, summed exactly up to ten million terms and by
/// its asymptotic expansion beyond.
pub fn harmonic(k: u64) -> f64 {
    const EXACT_LIMIT: u64 = 10_000_000;
    if k <= EXACT_LIMIT {
        // Smallest terms first keeps the rounding error down.
        (1..=k).rev().map(|t| 1.0 / t as f64).sum()
    } else {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let x = k as f64;
        x.ln() + EULER_GAMMA + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x)
    }
}

/// Sample counts of the spanning-tree density estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct AppNumStBudget {
    /// Walk lengths are drawn from `1..2r`.
    pub r: u64,
    /// Normalizer `s = Σ_{1 <= t < 2r} 1/t` of the length distribution.
    pub harmonic: f64,
    /// Return-probability trials `N = ⌈8 ln(4/δ) s² / ε²⌉`.
    pub iterations: u64,
    /// Degree samples `⌈256 ln(1/δ) (ln n)² / ε²⌉` (at least one).
    pub degree_samples: u64,
}

impl AppNumStBudget {
    pub fn new(epsilon: f64, delta: f64, n: usize, overrides: &Overrides) -> Result<Self, EstimateError> {
        super::check_unit("epsilon", epsilon)?;
        super::check_unit("delta", delta)?;
        let e2 = epsilon * epsilon;
        let r = overrides
            .tree_r
            .unwrap_or_else(|| (90f64.powi(3) / epsilon.powi(3)).ceil() as u64)
            .max(1);
        let harmonic = harmonic(2 * r - 1);
        let iterations = overrides
            .tree_iterations
            .unwrap_or_else(|| (8.0 * (4.0 / delta).ln() * harmonic * harmonic / e2).ceil() as u64)
            .max(1);
        let ln_n = (n as f64).ln();
        let degree_samples = overrides
            .tree_degree_samples
            .unwrap_or_else(|| (256.0 * (1.0 / delta).ln() * ln_n * ln_n / e2).ceil() as u64)
            .max(1);
        Ok(AppNumStBudget {
            r,
            harmonic,
            iterations,
            degree_samples,
        })
    }
}
