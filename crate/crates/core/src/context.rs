//! Contextual distance between measurement bases, its classification, and
//! the order-theoretic orthogonality test on finite posets.
//!
//! The distance between bases `a` and `b` of `Cⁿ` is the mean Shannon
//! entropy of the rows of their transition matrix. It is `0` exactly when
//! the bases agree up to relabeling of outcomes and reaches its supremum
//! `log₂ n` exactly for mutually unbiased bases, where every prediction
//! across the two bases is the completely mixed state.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::measures::shannon_bits;
use crate::poset::{FinitePoset, PosetError};
use crate::quantum::{transition_matrix, NBasis, QuantumError};

/// Tolerance used to classify a distance as `0` or as the supremum.
pub const CONTEXT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContextError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("contextual distance needs dimension at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("no measure value for element `{0}`")]
    MissingValue(String),
    #[error("measure is not order-reversing: `{0}` ⊑ `{1}` but value {2} < {3}")]
    NotMonotone(String, String, f64, f64),
}

pub type Result<T> = std::result::Result<T, ContextError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Distance 0: the bases share a single information order.
    IdenticalContext,
    /// Strictly between 0 and the supremum.
    PartialContext,
    /// Distance at the supremum: mutually unbiased bases.
    OrthogonalBases,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextReport {
    pub value_bits: f64,
    pub sup_bits: f64,
    pub classification: Classification,
    pub normalized: f64,
}

impl ContextReport {
    fn from_value(value_bits: f64, sup_bits: f64, tol: f64) -> Self {
        let classification = if value_bits <= tol {
            Classification::IdenticalContext
        } else if (value_bits - sup_bits).abs() <= tol {
            Classification::OrthogonalBases
        } else {
            Classification::PartialContext
        };
        Self {
            value_bits,
            sup_bits,
            classification,
            normalized: (value_bits / sup_bits).clamp(0.0, 1.0),
        }
    }
}

/// Mean row entropy of `transition_matrix(a, b)`, with supremum `log₂ n`.
pub fn contextual_distance(a: &NBasis, b: &NBasis) -> Result<ContextReport> {
    contextual_distance_with_tol(a, b, CONTEXT_TOL)
}

/// As [`contextual_distance`], classifying with tolerance `tol`.
pub fn contextual_distance_with_tol(a: &NBasis, b: &NBasis, tol: f64) -> Result<ContextReport> {
    let t = transition_matrix(a, b)?;
    let n = t.len();
    if n < 2 {
        return Err(ContextError::DimensionTooSmall(n));
    }
    let total: f64 = t
        .iter()
        .map(|row| {
            // Rows of a doubly stochastic matrix; renormalize away rounding.
            let s: f64 = row.iter().sum();
            let row: Vec<f64> = row.iter().map(|v| v / s).collect();
            shannon_bits(&row)
        })
        .sum();
    let value = (total / n as f64).max(0.0);
    Ok(ContextReport::from_value(value, (n as f64).log2(), tol))
}

/// Binary entropy of `(cos²(θ/2), sin²(θ/2))` at each grid angle.
pub fn qubit_distance_curve(theta_grid: &[f64]) -> Vec<(f64, f64)> {
    theta_grid
        .iter()
        .map(|&theta| {
            let c = (theta / 2.0).cos();
            let p = c * c;
            (theta, shannon_bits(&[p, 1.0 - p]))
        })
        .collect()
}

/// If `j, k` and `k, l` are both at distance 0, then so are `j, l`.
/// Returns whether the implication held; vacuously true when the premise
/// fails.
pub fn identical_context_closure(j: &NBasis, k: &NBasis, l: &NBasis) -> Result<bool> {
    let jk = contextual_distance(j, k)?;
    let kl = contextual_distance(k, l)?;
    let jl = contextual_distance(j, l)?;
    let identical = |r: &ContextReport| r.classification == Classification::IdenticalContext;
    Ok(!(identical(&jk) && identical(&kl)) || identical(&jl))
}

/// A partiality value for every element of a poset, order-reversing
/// (`x ⊑ y ⟹ μx ≥ μy`).
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMeasure {
    values: Vec<f64>,
}

impl ElementMeasure {
    pub fn new(poset: &FinitePoset, values: &HashMap<String, f64>) -> Result<Self> {
        let values: Vec<f64> = poset
            .labels()
            .iter()
            .map(|l| {
                values
                    .get(l)
                    .copied()
                    .ok_or_else(|| ContextError::MissingValue(l.clone()))
            })
            .collect::<Result<_>>()?;
        Self::from_values(poset, values)
    }

    pub fn from_fn(poset: &FinitePoset, f: impl Fn(&str) -> f64) -> Result<Self> {
        Self::from_values(poset, poset.labels().iter().map(|l| f(l)).collect())
    }

    fn from_values(poset: &FinitePoset, values: Vec<f64>) -> Result<Self> {
        for i in 0..poset.len() {
            for j in 0..poset.len() {
                if poset.leq_index(i, j) && values[i] < values[j] {
                    return Err(ContextError::NotMonotone(
                        poset.label(i).to_string(),
                        poset.label(j).to_string(),
                        values[i],
                        values[j],
                    ));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }
}

/// `x` and `y` are orthogonal when the measure takes only the value 0 on
/// `↑x ∩ ↑y`; an empty intersection qualifies.
pub fn poset_orthogonal(p: &FinitePoset, f: &ElementMeasure, x: &str, y: &str) -> Result<bool> {
    let common = p.up_set(x)?.intersection(&p.up_set(y)?);
    let orthogonal = common.indices().all(|i| f.value(i) == 0.0);
    Ok(orthogonal)
}
