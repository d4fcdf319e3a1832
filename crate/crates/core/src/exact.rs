//! Dense ground truth for small and medium graphs.
//!
//! Everything here materializes `n x n` matrices, so each entry point checks a
//! vertex cap first. The pseudoinverse is formed as `(L + J/n)^{-1} - J/n`
//! where `J` is the all-ones matrix: adding `J/n` lifts the kernel of a
//! connected Laplacian to eigenvalue 1 and leaves every other eigenpair alone.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;

use crate::graph::{Graph, GraphError};
use crate::walker::{walk_until, WalkOutcome};

/// Default vertex cap for dense computations.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Largest graph for which spanning trees are also counted exactly.
pub const EXACT_TREE_COUNT_MAX_N: usize = 30;

const PIVOT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has {n} vertices, above the dense cap of {cap}; use a local estimator")]
    TooLarge { n: usize, cap: usize },
    #[error("factorization hit a pivot below tolerance")]
    Singular,
    #[error("need at least two vertices")]
    TooSmall,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_dense(g: &Graph, cap: usize) -> Result<(), ExactError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(ExactError::TooLarge { n, cap });
    }
    if !g.is_connected() {
        return Err(ExactError::Disconnected);
    }
    Ok(())
}

/// `L = D - A`, with parallel edges counted in `A`.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut l = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
    }
    l
}

/// Cholesky factor of `L + J/n`: the single dense factorization behind the oracle.
pub fn factorize_lifted_laplacian(g: &Graph, cap: usize) -> Result<Cholesky<f64, Dyn>, ExactError> {
    check_dense(g, cap)?;
    let n = g.vertex_count();
    let mut lifted = laplacian(g);
    lifted.add_scalar_mut(1.0 / n as f64);
    let chol = Cholesky::new(lifted).ok_or(ExactError::Singular)?;
    let factor = chol.l_dirty();
    let scale = (0..n).map(|i| factor[(i, i)]).fold(0.0f64, f64::max);
    if (0..n).any(|i| factor[(i, i)] <= PIVOT_TOLERANCE * scale.max(1.0)) {
        return Err(ExactError::Singular);
    }
    Ok(chol)
}

/// Moore–Penrose pseudoinverse of the Laplacian of a connected graph.
pub fn laplacian_pinv(g: &Graph, cap: usize) -> Result<DMatrix<f64>, ExactError> {
    let n = g.vertex_count();
    let mut inv = factorize_lifted_laplacian(g, cap)?.inverse();
    inv.add_scalar_mut(-1.0 / n as f64);
    Ok(inv)
}

/// Pairwise effective resistances read off a precomputed pseudoinverse.
#[derive(Debug, Clone)]
pub struct ResistanceOracle {
    pinv: DMatrix<f64>,
}

impl ResistanceOracle {
    pub fn new(g: &Graph, cap: usize) -> Result<Self, ExactError> {
        Ok(ResistanceOracle {
            pinv: laplacian_pinv(g, cap)?,
        })
    }

    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    /// `L+[s,s] - 2 L+[s,t] + L+[t,t]`.
    pub fn resistance(&self, s: usize, t: usize) -> Result<f64, ExactError> {
        let n = self.pinv.nrows();
        for v in [s, t] {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
            }
        }
        if s == t {
            return Ok(0.0);
        }
        let r = self.pinv[(s, s)] - 2.0 * self.pinv[(s, t)] + self.pinv[(t, t)];
        Ok(r.max(0.0))
    }
}

/// One-off `R_G(s, t)`. Build a [`ResistanceOracle`] when asking many pairs.
pub fn effective_resistance_exact(g: &Graph, s: usize, t: usize, cap: usize) -> Result<f64, ExactError> {
    g.degree(s)?;
    g.degree(t)?;
    ResistanceOracle::new(g, cap)?.resistance(s, t)
}

/// Eigenvalues of the walk matrix and the mixing parameter derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    /// Eigenvalues of `D^{-1/2} A D^{-1/2}` in decreasing order.
    pub eigenvalues: Vec<f64>,
    /// `max(|second largest|, |smallest|)`.
    pub lambda: f64,
    /// The smallest eigenvalue is -1: the walk is periodic (graph bipartite).
    pub periodic: bool,
}

pub fn spectral_lambda(g: &Graph, cap: usize) -> Result<SpectralSummary, ExactError> {
    check_dense(g, cap)?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(ExactError::TooSmall);
    }
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| 1.0 / (g.degree(v).expect("in range") as f64).sqrt())
        .collect();
    let mut q = DMatrix::<f64>::zeros(n, n);
    for (u, v) in g.edges() {
        let w = inv_sqrt[u] * inv_sqrt[v];
        q[(u, v)] += w;
        q[(v, u)] += w;
    }
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(q).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let smallest = eigenvalues[n - 1];
    let lambda = eigenvalues[1].abs().max(smallest.abs()).min(1.0);
    Ok(SpectralSummary {
        periodic: smallest <= -1.0 + 1e-9,
        lambda,
        eigenvalues,
    })
}

/// Everything the dense oracle knows about one graph.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    pub laplacian: DMatrix<f64>,
    pub pinv: DMatrix<f64>,
    pub walk_eigenvalues: Vec<f64>,
    pub lambda: f64,
    pub periodic: bool,
}

impl DenseSpectrum {
    pub fn new(g: &Graph, cap: usize) -> Result<Self, ExactError> {
        let spectral = spectral_lambda(g, cap)?;
        Ok(DenseSpectrum {
            laplacian: laplacian(g),
            pinv: laplacian_pinv(g, cap)?,
            walk_eigenvalues: spectral.eigenvalues,
            lambda: spectral.lambda,
            periodic: spectral.periodic,
        })
    }

    pub fn resistance(&self, s: usize, t: usize) -> f64 {
        if s == t {
            return 0.0;
        }
        self.pinv[(s, s)] - 2.0 * self.pinv[(s, t)] + self.pinv[(t, t)]
    }
}

/// Number of spanning trees.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeCount {
    /// A disconnected graph has none.
    Disconnected,
    Connected {
        /// Natural log of the count.
        ln: f64,
        /// Exact count, when `n <= EXACT_TREE_COUNT_MAX_N`.
        exact: Option<BigUint>,
    },
}

impl TreeCount {
    pub fn ln(&self) -> Option<f64> {
        match self {
            TreeCount::Disconnected => None,
            TreeCount::Connected { ln, .. } => Some(*ln),
        }
    }

    pub fn exact(&self) -> Option<BigUint> {
        match self {
            TreeCount::Disconnected => Some(BigUint::zero()),
            TreeCount::Connected { exact, .. } => exact.clone(),
        }
    }
}

/// Matrix-tree count: determinant of the Laplacian with its last row and column removed.
pub fn count_spanning_trees(g: &Graph, cap: usize) -> Result<TreeCount, ExactError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(ExactError::TooLarge { n, cap });
    }
    if !g.is_connected() {
        return Ok(TreeCount::Disconnected);
    }
    if n == 1 {
        return Ok(TreeCount::Connected {
            ln: 0.0,
            exact: Some(BigUint::one()),
        });
    }
    let l = laplacian(g);
    let reduced = l.view((0, 0), (n - 1, n - 1)).into_owned();
    let chol = Cholesky::new(reduced).ok_or(ExactError::Singular)?;
    let factor = chol.l_dirty();
    let ln = 2.0 * (0..n - 1).map(|i| factor[(i, i)].ln()).sum::<f64>();
    let exact = (n <= EXACT_TREE_COUNT_MAX_N).then(|| {
        let entries: Vec<Vec<BigInt>> = (0..n - 1)
            .map(|i| (0..n - 1).map(|j| BigInt::from(l[(i, j)] as i64)).collect())
            .collect();
        bareiss_determinant(entries)
            .to_biguint()
            .expect("reduced Laplacian of a connected graph is positive definite")
    });
    Ok(TreeCount::Connected { ln, exact })
}

/// Fraction-free Gaussian elimination; every intermediate division is exact.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let k = m.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut previous = BigInt::one();
    for p in 0..k - 1 {
        if m[p][p].is_zero() {
            match (p + 1..k).find(|&r| !m[r][p].is_zero()) {
                Some(r) => {
                    m.swap(p, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let value = (&m[i][j] * &m[p][p] - &m[i][p] * &m[p][j]) / &previous;
                m[i][j] = value;
            }
        }
        previous = m[p][p].clone();
    }
    &m[k - 1][k - 1] * sign
}

/// Simulated commute times.
#[derive(Debug, Clone, PartialEq)]
pub struct CommuteSample {
    pub mean: f64,
    pub std_error: f64,
    /// Trials that completed the round trip.
    pub completed: u64,
    /// Trials aborted at the safety cap (excluded from the mean).
    pub capped: u64,
}

/// Mean length of `s -> t -> s` round trips over `trials` walks.
pub fn commute_time_sim<R: Rng + ?Sized>(
    g: &Graph,
    s: usize,
    t: usize,
    trials: u64,
    rng: &mut R,
) -> Result<CommuteSample, ExactError> {
    g.degree(s)?;
    g.degree(t)?;
    if !g.is_connected() {
        return Err(ExactError::Disconnected);
    }
    if s == t {
        return Ok(CommuteSample {
            mean: 0.0,
            std_error: 0.0,
            completed: trials,
            capped: 0,
        });
    }
    let cap = 10_000u64.saturating_mul(g.edge_count() as u64).max(1);
    let (mut sum, mut sum_sq, mut completed, mut capped) = (0.0, 0.0, 0u64, 0u64);
    for _ in 0..trials {
        let mut seen_t = false;
        let outcome = walk_until(
            g,
            s,
            |_, cur, _| {
                seen_t |= cur == t;
                (seen_t && cur == s).then_some(())
            },
            cap,
            rng,
        )?;
        match outcome {
            WalkOutcome::Stopped { steps, .. } => {
                let x = steps as f64;
                sum += x;
                sum_sq += x * x;
                completed += 1;
            }
            WalkOutcome::Capped { .. } => capped += 1,
        }
    }
    let k = completed.max(1) as f64;
    let mean = sum / k;
    let variance = if completed > 1 {
        (sum_sq - k * mean * mean) / (k - 1.0)
    } else {
        0.0
    };
    Ok(CommuteSample {
        mean,
        std_error: (variance.max(0.0) / k).sqrt(),
        completed,
        capped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{complete, cycle, path};
    use crate::rng::master;

    const CAP: usize = DEFAULT_DENSE_CAP;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn series_and_parallel_resistances() {
        assert!(close(
            effective_resistance_exact(&complete(2), 0, 1, CAP).unwrap(),
            1.0,
            1e-12
        ));
        assert!(close(
            effective_resistance_exact(&path(3), 0, 2, CAP).unwrap(),
            2.0,
            1e-12
        ));
        assert!(close(
            effective_resistance_exact(&complete(3), 0, 1, CAP).unwrap(),
            2.0 / 3.0,
            1e-12
        ));
        let k4 = ResistanceOracle::new(&complete(4), CAP).unwrap();
        for s in 0..4 {
            for t in 0..4 {
                let expected = if s == t { 0.0 } else { 0.5 };
                assert!(close(k4.resistance(s, t).unwrap(), expected, 1e-12));
            }
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = Graph::from_edges(4, [(0, 1), (0, 1), (1, 2), (2, 3)]).unwrap();
        let l = laplacian(&g);
        for i in 0..4 {
            assert_eq!(l.row(i).sum(), 0.0);
        }
        assert_eq!(l[(0, 1)], -2.0);
    }

    #[test]
    fn pinv_is_a_generalized_inverse() {
        let g = crate::graph::generate::cycle5_with_chord();
        let spectrum = DenseSpectrum::new(&g, CAP).unwrap();
        let l = &spectrum.laplacian;
        let back = l * &spectrum.pinv * l;
        assert!((back - l).norm() <= 1e-8 * l.norm());
    }

    #[test]
    fn lambda_of_named_graphs() {
        let k3 = spectral_lambda(&complete(3), CAP).unwrap();
        assert!(close(k3.lambda, 0.5, 1e-9));
        assert!(close(k3.eigenvalues[0], 1.0, 1e-9));
        assert!(!k3.periodic);
        assert!(close(
            spectral_lambda(&complete(4), CAP).unwrap().lambda,
            1.0 / 3.0,
            1e-9
        ));
        let c4 = spectral_lambda(&cycle(4), CAP).unwrap();
        assert!(close(c4.lambda, 1.0, 1e-9));
        assert!(c4.periodic);
    }

    #[test]
    fn guards() {
        let big = path(30);
        assert!(matches!(
            effective_resistance_exact(&big, 0, 1, 10),
            Err(ExactError::TooLarge { n: 30, cap: 10 })
        ));
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            ResistanceOracle::new(&split, CAP),
            Err(ExactError::Disconnected)
        ));
        assert_eq!(count_spanning_trees(&split, CAP).unwrap(), TreeCount::Disconnected);
        assert_eq!(
            count_spanning_trees(&split, CAP).unwrap().exact(),
            Some(BigUint::zero())
        );
    }

    #[test]
    fn spanning_tree_counts() {
        let count = |g: &Graph| count_spanning_trees(g, CAP).unwrap();
        assert_eq!(count(&complete(3)).exact(), Some(BigUint::from(3u32)));
        assert_eq!(count(&complete(4)).exact(), Some(BigUint::from(16u32)));
        assert_eq!(count(&path(6)).exact(), Some(BigUint::from(1u32)));
        let pair = complete(3).contract_pair(0, 1).unwrap();
        assert_eq!(count(&pair).exact(), Some(BigUint::from(2u32)));
        assert!(close(count(&complete(5)).ln().unwrap(), 125f64.ln(), 1e-9));
    }

    #[test]
    fn large_tree_counts_are_exact_beyond_i128() {
        // Cayley: K30 has 30^28 spanning trees, which exceeds i128.
        let count = count_spanning_trees(&complete(30), CAP).unwrap();
        assert_eq!(count.exact(), Some(BigUint::from(30u32).pow(28)));
        assert!(close(count.ln().unwrap(), 28.0 * 30f64.ln(), 1e-6));
        let k31 = count_spanning_trees(&complete(31), CAP).unwrap();
        assert_eq!(k31.exact(), None);
        assert!(close(k31.ln().unwrap(), 29.0 * 31f64.ln(), 1e-6));
    }

    #[test]
    fn bareiss_with_pivoting() {
        let m = vec![
            vec![BigInt::from(0), BigInt::from(2)],
            vec![BigInt::from(3), BigInt::from(1)],
        ];
        assert_eq!(bareiss_determinant(m), BigInt::from(-6));
    }

    #[test]
    fn commute_time_on_k2_is_two() {
        let sample = commute_time_sim(&complete(2), 0, 1, 10_000, &mut master(1)).unwrap();
        assert_eq!(sample.mean, 2.0);
        assert_eq!(sample.capped, 0);
    }
}
