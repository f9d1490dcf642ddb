//! Sequential projective spin-½ measurements on Bloch vectors, and
//! transition matrices between orthonormal bases of `Cⁿ`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Cosines within this distance of 0 or ±1 are snapped, so that aligned,
/// anti-aligned and orthogonal axes give exact probabilities.
pub const AXIS_SNAP_TOL: f64 = 1e-12;

/// Tolerance for unit norms and orthonormality.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("Bloch vector has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("axis list must be nonempty")]
    EmptyAxes,
    #[error("cannot parse axis `{0}` (expected z, x, y, -z, ... or `theta,phi` in radians)")]
    AxisParse(String),
    #[error("basis is not orthonormal: <{0}|{1}> is off by {2}")]
    NotOrthonormal(usize, usize, f64),
    #[error("basis columns must all have length {expected}, column {column} has {found}")]
    NotSquare {
        expected: usize,
        column: usize,
        found: usize,
    },
    #[error("basis must have at least one column")]
    EmptyBasis,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid permutation of {0} outcomes")]
    InvalidPermutation(usize),
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// Residue of `sin`/`cos` at multiples of `π/2` is below this.
const TRIG_ZERO_TOL: f64 = 1e-15;

/// A measurement axis given by polar angle `theta ∈ [0, π]` and azimuth
/// `phi ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochAxis {
    theta: f64,
    phi: f64,
}

impl BlochAxis {
    /// Angles are brought into range; a polar angle past `π` wraps over the
    /// pole and shifts the azimuth by `π`.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    pub fn z() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn x() -> Self {
        Self::new(PI / 2.0, 0.0)
    }

    pub fn y() -> Self {
        Self::new(PI / 2.0, PI / 2.0)
    }

    /// Uniformly distributed on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
        Self::new(cos_theta.acos(), rng.gen_range(0.0..TAU))
    }

    /// `z`, `x`, `y`, optionally prefixed with `-`, or `theta,phi`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let (neg, name) = match t.strip_prefix('-') {
            Some(rest) if !rest.contains(',') => (true, rest),
            _ => (false, t),
        };
        let named = match name {
            "z" | "Z" => Some(Self::z()),
            "x" | "X" => Some(Self::x()),
            "y" | "Y" => Some(Self::y()),
            _ => None,
        };
        if let Some(axis) = named {
            return Ok(if neg { axis.opposite() } else { axis });
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(theta), Ok(phi)) if theta.is_finite() && phi.is_finite() => {
                    Ok(Self::new(theta, phi))
                }
                _ => Err(QuantumError::AxisParse(s.to_string())),
            },
            _ => Err(QuantumError::AxisParse(s.to_string())),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector of the axis. Components within rounding of 0 (such as
    /// `cos(π/2)`) are exactly 0, so named axes have exact coordinates.
    pub fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct].map(|c| if c.abs() < TRIG_ZERO_TOL { 0.0 } else { c })
    }

    pub fn opposite(&self) -> Self {
        Self::new(PI - self.theta, self.phi + PI)
    }
}

/// `+1` (aligned) or `-1` (anti-aligned).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign())
    }
}

/// A pure qubit state as a unit Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitState {
    bloch: [f64; 3],
}

impl QubitState {
    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let norm = bloch.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotUnit(norm));
        }
        Ok(Self { bloch })
    }

    /// The eigenstate of `axis` with the given outcome.
    pub fn along(axis: &BlochAxis, outcome: Outcome) -> Self {
        let v = axis.vector();
        let bloch = match outcome {
            Outcome::Plus => v,
            // Adding 0.0 turns -0.0 into 0.0.
            Outcome::Minus => v.map(|c| -c + 0.0),
        };
        Self { bloch }
    }

    pub fn z_plus() -> Self {
        Self::along(&BlochAxis::z(), Outcome::Plus)
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }
}

fn snapped_cos(u: [f64; 3], v: [f64; 3]) -> f64 {
    let c = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
    if c >= 1.0 - AXIS_SNAP_TOL {
        1.0
    } else if c <= -1.0 + AXIS_SNAP_TOL {
        -1.0
    } else if c.abs() <= AXIS_SNAP_TOL {
        0.0
    } else {
        c
    }
}

/// Angle in `[0, π]` between two axes.
pub fn angle_between(a: &BlochAxis, b: &BlochAxis) -> f64 {
    snapped_cos(a.vector(), b.vector()).acos()
}

/// `(Pr(+), Pr(-))` for measuring `state` along `axis`:
/// `Pr(+) = cos²(γ/2) = (1 + cos γ) / 2` with `γ` the Bloch angle between
/// them, and `Pr(-)` its complement.
pub fn transition_probs(state: &QubitState, axis: &BlochAxis) -> (f64, f64) {
    let p_plus = (1.0 + snapped_cos(state.bloch, axis.vector())) / 2.0;
    (p_plus, 1.0 - p_plus)
}

/// Projective measurement with ideal collapse onto `±axis`.
pub fn measure<R: Rng + ?Sized>(
    state: &QubitState,
    axis: &BlochAxis,
    rng: &mut R,
) -> (Outcome, QubitState) {
    let (p_plus, _) = transition_probs(state, axis);
    let u: f64 = rng.gen();
    let outcome = if u < p_plus {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    (outcome, QubitState::along(axis, outcome))
}

/// Generator for trial `trial` of a run seeded with `seed`. Each trial is
/// its own ChaCha stream, so trials are independent of execution order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub axis: BlochAxis,
    pub outcome: Outcome,
    pub predictive_probs: (f64, f64),
    pub post_state: QubitState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumTrace {
    pub steps: Vec<TraceStep>,
    pub seed: u64,
}

/// Measures `input` along each axis in turn.
pub fn run_sequence_with<R: Rng + ?Sized>(
    input: &QubitState,
    axes: &[BlochAxis],
    rng: &mut R,
) -> Result<Vec<TraceStep>> {
    if axes.is_empty() {
        return Err(QuantumError::EmptyAxes);
    }
    let mut state = *input;
    Ok(axes
        .iter()
        .map(|axis| {
            let predictive_probs = transition_probs(&state, axis);
            let (outcome, post_state) = measure(&state, axis, rng);
            state = post_state;
            TraceStep {
                axis: *axis,
                outcome,
                predictive_probs,
                post_state,
            }
        })
        .collect())
}

pub fn run_sequence(input: &QubitState, axes: &[BlochAxis], seed: u64) -> Result<QuantumTrace> {
    let mut rng = trial_rng(seed, 0);
    Ok(QuantumTrace {
        steps: run_sequence_with(input, axes, &mut rng)?,
        seed,
    })
}

/// An orthonormal basis of `Cⁿ`, one column per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct NBasis {
    columns: Vec<Vec<Complex64>>,
}

/// File form of a basis: each column is a list of `[re, im]` amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub columns: Vec<Vec<[f64; 2]>>,
}

impl BasisFile {
    pub fn into_basis(self) -> Result<NBasis> {
        NBasis::new(
            self.columns
                .into_iter()
                .map(|c| {
                    c.into_iter()
                        .map(|[re, im]| Complex64::new(re, im))
                        .collect()
                })
                .collect(),
        )
    }
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

impl NBasis {
    pub fn new(columns: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(QuantumError::EmptyBasis);
        }
        if let Some((column, c)) = columns.iter().enumerate().find(|(_, c)| c.len() != n) {
            return Err(QuantumError::NotSquare {
                expected: n,
                column,
                found: c.len(),
            });
        }
        for i in 0..n {
            for j in i..n {
                let target = if i == j { 1.0 } else { 0.0 };
                let err = (inner(&columns[i], &columns[j]) - target).norm();
                if err.is_nan() || err > NORM_TOL {
                    return Err(QuantumError::NotOrthonormal(i, j, err));
                }
            }
        }
        Ok(Self { columns })
    }

    pub fn computational(n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|k| {
                            if k == i {
                                Complex64::new(1.0, 0.0)
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// Discrete Fourier basis; unbiased with respect to the computational
    /// basis.
    pub fn fourier(n: usize) -> Result<Self> {
        let scale = 1.0 / (n as f64).sqrt();
        Self::new(
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| {
                            Complex64::from_polar(
                                scale,
                                TAU * ((j * k) % n.max(1)) as f64 / n as f64,
                            )
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// The `(+, -)` eigenbasis of a spin axis.
    pub fn qubit(axis: &BlochAxis) -> Self {
        let (s, c) = (axis.theta / 2.0).sin_cos();
        let phase = Complex64::from_polar(1.0, axis.phi);
        Self {
            columns: vec![
                vec![Complex64::new(c, 0.0), phase * s],
                vec![Complex64::new(s, 0.0), -phase * c],
            ],
        }
    }

    /// Column `i` of the result is column `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(QuantumError::InvalidPermutation(n));
        }
        Ok(Self {
            columns: perm.iter().map(|&p| self.columns[p].clone()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }
}

/// `T[i][j] = |<a_i|b_j>|²`; doubly stochastic for orthonormal bases.
pub fn transition_matrix(a: &NBasis, b: &NBasis) -> Result<Vec<Vec<f64>>> {
    if a.dim() != b.dim() {
        return Err(QuantumError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.columns
        .iter()
        .map(|ai| {
            b.columns
                .iter()
                .map(|bj| inner(ai, bj).norm_sqr())
                .collect()
        })
        .collect())
}
