//! Classical states on the probability simplex and the Bayesian order.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

/// Tolerance for simplex membership and component-wise equality.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("component {index} is {value}, not a probability")]
    InvalidComponent { index: usize, value: f64 },
    #[error("components sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("mixing parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("outcome {0} is certain and cannot be eliminated")]
    CertainOutcome(usize),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// A probability vector over `n` outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ClassicalState {
    probs: Vec<f64>,
}

impl ClassicalState {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(StateError::InvalidDimension);
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(StateError::InvalidComponent { index, value });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(StateError::NotNormalized(total));
        }
        Ok(Self { probs })
    }

    /// Uniform distribution: the least element of the Bayesian order.
    pub fn mixed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(StateError::InvalidDimension);
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// The point mass on outcome `i`.
    pub fn pure(n: usize, i: usize) -> Result<Self> {
        if n == 0 {
            return Err(StateError::InvalidDimension);
        }
        if i >= n {
            return Err(StateError::IndexOutOfRange { index: i, dim: n });
        }
        let mut probs = vec![0.0; n];
        probs[i] = 1.0;
        Ok(Self { probs })
    }

    /// Normalized uniform positives, the sampling scheme used by the
    /// randomized checks.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(StateError::InvalidDimension);
        }
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(f64::EPSILON..1.0)).collect();
        let total: f64 = raw.iter().sum();
        Ok(Self {
            probs: raw.into_iter().map(|p| p / total).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// Exactly one outcome has nonzero probability.
    pub fn is_pure(&self) -> bool {
        self.probs.iter().filter(|&&p| p > 0.0).count() == 1
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// `(1 - t) x + t y`.
    pub fn mixing_path(&self, other: &Self, t: f64) -> Result<Self> {
        check_dims(self, other)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(StateError::ParameterOutOfRange(t));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(Self { probs })
    }

    /// Bayesian update after learning that outcome `i` did not occur.
    pub fn eliminate(&self, i: usize) -> Result<Self> {
        let n = self.dim();
        if i >= n {
            return Err(StateError::IndexOutOfRange { index: i, dim: n });
        }
        let removed = self.probs[i];
        if (removed - 1.0).abs() <= SIMPLEX_TOL {
            return Err(StateError::CertainOutcome(i));
        }
        // Normalize by the surviving mass itself so a single survivor is exactly 1.
        let rest: f64 = self
            .probs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p)
            .sum();
        let probs = self
            .probs
            .iter()
            .enumerate()
            .map(|(j, &p)| if j == i { 0.0 } else { p / rest })
            .collect();
        Ok(Self { probs })
    }
}

fn check_dims(x: &ClassicalState, y: &ClassicalState) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(StateError::DimensionMismatch(x.dim(), y.dim()));
    }
    Ok(())
}

/// Indices ordered by `(x desc, y desc)`. If any permutation sorts both
/// vectors into non-increasing order, this one does.
fn co_sorting_permutation(x: &[f64], y: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..x.len()).collect();
    perm.sort_by(|&a, &b| {
        x[b].total_cmp(&x[a])
            .then_with(|| y[b].total_cmp(&y[a]))
            .then(a.cmp(&b))
    });
    perm
}

/// The adjacent-ratio condition along a permutation that must sort both
/// vectors.
/// Relative slack on the ratio products. Updates such as elimination keep
/// ratios equal in exact arithmetic, and a product can then land a few ulps
/// on the wrong side. Zero products stay exact.
const PRODUCT_SLACK: f64 = 1.0 + 8.0 * f64::EPSILON;

pub(crate) fn ratio_condition_holds(x: &[f64], y: &[f64], perm: &[usize]) -> bool {
    perm.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        x[a] >= x[b] && y[a] >= y[b] && x[a] * y[b] <= x[b] * y[a] * PRODUCT_SLACK
    })
}

/// The Bayesian order `x ⊑ y`: some permutation sorts both `x` and `y`
/// into non-increasing order with `x_a y_b <= x_b y_a` for every adjacent
/// pair `(a, b)` along it.
///
/// Co-sorting permutations differ only by swapping indices that are tied
/// in both vectors, which leaves the condition unchanged, so checking the
/// canonical co-sort decides the existential.
pub fn bayesian_leq(x: &ClassicalState, y: &ClassicalState) -> Result<bool> {
    check_dims(x, y)?;
    let perm = co_sorting_permutation(&x.probs, &y.probs);
    Ok(ratio_condition_holds(&x.probs, &y.probs, &perm))
}
