//! Measurement functions: entropy-valued partiality measures on classical
//! states, plus randomized checks of the entropy axioms and of order
//! monotonicity.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::classical::{bayesian_leq, ClassicalState};

/// Absolute tolerance for the additivity and subadditivity checks.
pub const AXIOM_TOL: f64 = 1e-9;

/// Values at or below this count as zero for the kernel condition.
pub const KERNEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(
        "linear combination weights must be finite, nonnegative and not both zero (got {0}, {1})"
    )]
    InvalidWeights(f64, f64),
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// A partiality measure, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementFn {
    Shannon,
    Hartley,
    LinearCombo { shannon: f64, hartley: f64 },
}

impl MeasurementFn {
    pub fn linear_combo(shannon: f64, hartley: f64) -> Result<Self, MeasureError> {
        let ok = |w: f64| w.is_finite() && w >= 0.0;
        if !ok(shannon) || !ok(hartley) || (shannon == 0.0 && hartley == 0.0) {
            return Err(MeasureError::InvalidWeights(shannon, hartley));
        }
        Ok(Self::LinearCombo { shannon, hartley })
    }

    pub fn name(&self) -> String {
        match self {
            Self::Shannon => "shannon".into(),
            Self::Hartley => "hartley".into(),
            Self::LinearCombo { shannon, hartley } => {
                format!("{shannon}*shannon+{hartley}*hartley")
            }
        }
    }

    pub fn evaluate(&self, x: &ClassicalState) -> f64 {
        self.evaluate_probs(x.probs())
    }

    /// Evaluates on a raw probability vector (e.g. a flattened joint
    /// distribution). The caller guarantees it lies on the simplex.
    pub fn evaluate_probs(&self, probs: &[f64]) -> f64 {
        match *self {
            Self::Shannon => shannon_bits(probs),
            Self::Hartley => hartley_bits(probs),
            Self::LinearCombo { shannon, hartley } => {
                shannon * shannon_bits(probs) + hartley * hartley_bits(probs)
            }
        }
    }
}

/// `-Σ p log₂ p` with `0 log 0 = 0`. Terms are accumulated in ascending
/// order of `p`, so the result is bit-identical under any permutation.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = probs.iter().copied().filter(|&p| p > 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().fold(0.0, |acc, &p| acc - p * p.log2())
}

/// `log₂` of the support size.
pub fn hartley_bits(probs: &[f64]) -> f64 {
    let support = probs.iter().filter(|&&p| p > 0.0).count();
    if support == 0 {
        0.0
    } else {
        (support as f64).log2()
    }
}

/// Inputs and the two compared quantities of a failed check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomWitness {
    pub inputs: Vec<Vec<f64>>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub passed: bool,
    pub witness: Option<AxiomWitness>,
}

impl AxiomCheck {
    fn pass() -> Self {
        Self {
            passed: true,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> AxiomWitness) {
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub measure: String,
    pub samples: usize,
    pub seed: u64,
    pub expansibility: AxiomCheck,
    pub symmetry: AxiomCheck,
    pub subadditivity: AxiomCheck,
    pub additivity: AxiomCheck,
    pub normalization: AxiomCheck,
    pub monotone_on_bayesian: AxiomCheck,
}

impl AxiomReport {
    /// Expansibility, symmetry, subadditivity, additivity, normalization.
    pub fn entropy_axioms_pass(&self) -> bool {
        self.expansibility.passed
            && self.symmetry.passed
            && self.subadditivity.passed
            && self.additivity.passed
            && self.normalization.passed
    }

    pub fn all_pass(&self) -> bool {
        self.entropy_axioms_pass() && self.monotone_on_bayesian.passed
    }
}

/// Random point of the simplex; roughly one draw in five has some
/// components forced to zero.
pub fn sample_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..n).map(|_| rng.gen_range(f64::EPSILON..1.0)).collect();
    if n > 1 && rng.gen_bool(0.2) {
        let keep = rng.gen_range(0..n);
        for (i, v) in raw.iter_mut().enumerate() {
            if i != keep && rng.gen_bool(0.5) {
                *v = 0.0;
            }
        }
    }
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Joint distribution on an `rows × cols` grid, row-major. Every tenth
/// sample is a product of its marginals and every tenth (offset by five)
/// is perfectly correlated.
fn sample_joint<R: Rng + ?Sized>(rng: &mut R, k: usize, rows: usize, cols: usize) -> Vec<f64> {
    match k % 10 {
        0 => {
            let p = sample_distribution(rng, rows);
            let q = sample_distribution(rng, cols);
            product(&p, &q)
        }
        5 => {
            let diag = sample_distribution(rng, rows.min(cols));
            let mut joint = vec![0.0; rows * cols];
            for (i, d) in diag.into_iter().enumerate() {
                joint[i * cols + i] = d;
            }
            joint
        }
        _ => sample_distribution(rng, rows * cols),
    }
}

fn product(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter()
        .flat_map(|a| q.iter().map(move |b| a * b))
        .collect()
}

fn marginals(joint: &[f64], rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let mut r = vec![0.0; rows];
    let mut c = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            r[i] += joint[i * cols + j];
            c[j] += joint[i * cols + j];
        }
    }
    (r, c)
}

/// Pairs `(a, b)` with `a ⊑ b` taken along mixing paths: `y` is random,
/// `x` lies between the uniform state and `y`, and `a`, `b` lie on the
/// segment from `x` to `y` with `a` nearer `x`.
pub fn mixing_path_pairs(
    count: usize,
    dims: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Vec<(ClassicalState, ClassicalState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(dims.clone());
            let y = ClassicalState::random(n, &mut rng).expect("n >= 1");
            let bottom = ClassicalState::mixed(n).expect("n >= 1");
            let x = bottom
                .mixing_path(&y, rng.gen_range(0.0..=1.0))
                .expect("same dim");
            let (mut t1, mut t2) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
            if t1 > t2 {
                std::mem::swap(&mut t1, &mut t2);
            }
            let a = x.mixing_path(&y, t1).expect("same dim");
            let b = x.mixing_path(&y, t2).expect("same dim");
            (a, b)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub index: usize,
    pub x: ClassicalState,
    pub y: ClassicalState,
    pub value_x: f64,
    pub value_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneCheck {
    pub passed: bool,
    pub checked: usize,
    pub violation: Option<MonotoneViolation>,
}

/// Checks `μx >= μy` on every pair. Each pair is expected to satisfy
/// `x ⊑ y`; the relation itself is not re-verified here.
pub fn is_monotone_on(
    f: &MeasurementFn,
    pairs: &[(ClassicalState, ClassicalState)],
) -> MonotoneCheck {
    let violation = pairs.iter().enumerate().find_map(|(index, (x, y))| {
        let (vx, vy) = (f.evaluate(x), f.evaluate(y));
        (vx < vy).then(|| MonotoneViolation {
            index,
            x: x.clone(),
            y: y.clone(),
            value_x: vx,
            value_y: vy,
        })
    });
    MonotoneCheck {
        passed: violation.is_none(),
        checked: pairs.len(),
        violation,
    }
}

/// `μx = 0` exactly when `x` is a maximal (pure) state.
pub fn kernel_at_maximal(f: &MeasurementFn, x: &ClassicalState) -> bool {
    (f.evaluate(x) <= KERNEL_TOL) == x.is_pure()
}

/// Runs the randomized axiom battery with `sample_count` draws per axiom.
pub fn verify_axioms(
    f: &MeasurementFn,
    sample_count: usize,
    seed: u64,
) -> Result<AxiomReport, MeasureError> {
    if sample_count == 0 {
        return Err(MeasureError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut expansibility = AxiomCheck::pass();
    let mut symmetry = AxiomCheck::pass();
    let mut additivity = AxiomCheck::pass();
    let mut subadditivity = AxiomCheck::pass();

    for k in 0..sample_count {
        let n = rng.gen_range(1..=8);
        let x = sample_distribution(&mut rng, n);
        let hx = f.evaluate_probs(&x);

        let mut padded = x.clone();
        padded.insert(rng.gen_range(0..=n), 0.0);
        let hp = f.evaluate_probs(&padded);
        expansibility.record(hp.to_bits() == hx.to_bits(), || AxiomWitness {
            inputs: vec![x.clone(), padded.clone()],
            lhs: hp,
            rhs: hx,
        });

        let mut shuffled = x.clone();
        shuffled.shuffle(&mut rng);
        let hs = f.evaluate_probs(&shuffled);
        symmetry.record(hs.to_bits() == hx.to_bits(), || AxiomWitness {
            inputs: vec![x.clone(), shuffled.clone()],
            lhs: hs,
            rhs: hx,
        });

        let (np, nq) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let p = sample_distribution(&mut rng, np);
        let q = sample_distribution(&mut rng, nq);
        let pq = product(&p, &q);
        let (lhs, rhs) = (
            f.evaluate_probs(&pq),
            f.evaluate_probs(&p) + f.evaluate_probs(&q),
        );
        additivity.record((lhs - rhs).abs() <= AXIOM_TOL, || AxiomWitness {
            inputs: vec![p.clone(), q.clone()],
            lhs,
            rhs,
        });

        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let joint = sample_joint(&mut rng, k, rows, cols);
        let (r, c) = marginals(&joint, rows, cols);
        let (lhs, rhs) = (
            f.evaluate_probs(&joint),
            f.evaluate_probs(&r) + f.evaluate_probs(&c),
        );
        subadditivity.record(lhs <= rhs + AXIOM_TOL, || AxiomWitness {
            inputs: vec![joint.clone(), r.clone(), c.clone()],
            lhs,
            rhs,
        });
    }

    let mut normalization = AxiomCheck::pass();
    let half = f.evaluate_probs(&[0.5, 0.5]);
    normalization.record((half - 1.0).abs() <= KERNEL_TOL, || AxiomWitness {
        inputs: vec![vec![0.5, 0.5]],
        lhs: half,
        rhs: 1.0,
    });

    let pairs = mixing_path_pairs(sample_count, 2..=6, seed.wrapping_add(1));
    let mono = is_monotone_on(f, &pairs);
    let monotone_on_bayesian = AxiomCheck {
        passed: mono.passed,
        witness: mono.violation.map(|v| AxiomWitness {
            inputs: vec![v.x.into_probs(), v.y.into_probs()],
            lhs: v.value_x,
            rhs: v.value_y,
        }),
    };

    Ok(AxiomReport {
        measure: f.name(),
        samples: sample_count,
        seed,
        expansibility,
        symmetry,
        subadditivity,
        additivity,
        normalization,
        monotone_on_bayesian,
    })
}

/// Strict form of the monotonicity law on one pair: returns `None` if
/// the pair is not order-related.
pub fn strictly_decreases(
    f: &MeasurementFn,
    x: &ClassicalState,
    y: &ClassicalState,
) -> Option<bool> {
    match bayesian_leq(x, y) {
        Ok(true) if !x.approx_eq(y, crate::classical::SIMPLEX_TOL) => {
            Some(f.evaluate(x) > f.evaluate(y))
        }
        _ => None,
    }
}
