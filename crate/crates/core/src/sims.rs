//! The two experiments: searching boxes for a ball (classical, entropy
//! reaches zero) and sequential spin measurements across changing bases
//! (quantum, entropy resets at every basis change).

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::classical::{ClassicalState, StateError};
use crate::context::ElementMeasure;
use crate::measures::{shannon_bits, MeasurementFn};
use crate::poset::FinitePoset;
use crate::quantum::{
    angle_between, measure, run_sequence_with, transition_probs, trial_rng, BlochAxis, Outcome,
    QuantumError, QubitState,
};

/// Default threshold, in bits, for the approximately-deterministic verdict.
pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("need at least 2 boxes, got {0}")]
    TooFewBoxes(usize),
    #[error("ball index {ball} out of range for {n} boxes")]
    BallOutOfRange { ball: usize, n: usize },
    #[error("opening order is not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("epsilon must be a nonnegative number, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    State(#[from] StateError),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxStep {
    /// `None` for the initial, completely mixed state.
    pub opened_box: Option<usize>,
    pub found: bool,
    pub state: ClassicalState,
    pub entropy_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalTrace {
    pub n_boxes: usize,
    pub ball_index: usize,
    pub steps: Vec<BoxStep>,
}

impl ClassicalTrace {
    pub fn entropies(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.entropy_bits).collect()
    }
}

/// Opens boxes in `opening_order`, starting from the uniform state and
/// updating by elimination, until the ball is found or only one box
/// remains possible.
pub fn boxes_experiment(
    n_boxes: usize,
    ball_index: usize,
    opening_order: &[usize],
) -> Result<ClassicalTrace> {
    if n_boxes < 2 {
        return Err(SimError::TooFewBoxes(n_boxes));
    }
    if ball_index >= n_boxes {
        return Err(SimError::BallOutOfRange {
            ball: ball_index,
            n: n_boxes,
        });
    }
    let mut seen = vec![false; n_boxes];
    if opening_order.len() != n_boxes
        || opening_order
            .iter()
            .any(|&b| b >= n_boxes || std::mem::replace(&mut seen[b], true))
    {
        return Err(SimError::InvalidPermutation(n_boxes));
    }

    let shannon = MeasurementFn::Shannon;
    let mut state = ClassicalState::mixed(n_boxes)?;
    let mut steps = vec![BoxStep {
        opened_box: None,
        found: false,
        entropy_bits: shannon.evaluate(&state),
        state: state.clone(),
    }];
    for &opened in opening_order {
        if state.is_pure() {
            break;
        }
        let found = opened == ball_index;
        state = if found {
            ClassicalState::pure(n_boxes, opened)?
        } else {
            state.eliminate(opened)?
        };
        steps.push(BoxStep {
            opened_box: Some(opened),
            found,
            entropy_bits: shannon.evaluate(&state),
            state: state.clone(),
        });
    }
    Ok(ClassicalTrace {
        n_boxes,
        ball_index,
        steps,
    })
}

/// Every state of knowledge about which of `n` boxes holds the ball: the
/// nonempty sets of still-possible boxes (labelled by box letters), ordered
/// by reverse inclusion, with Shannon entropy `log₂ |S|` of the uniform
/// belief on each set.
pub fn elimination_domain(n: usize) -> Result<(FinitePoset, ElementMeasure)> {
    if !(2..=26).contains(&n) {
        return Err(SimError::TooFewBoxes(n));
    }
    let label = |mask: u32| -> String {
        (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| char::from(b'A' + i as u8))
            .collect()
    };
    let full = (1u32 << n) - 1;
    let masks: Vec<u32> = (1..=full).rev().collect();
    let elements: Vec<String> = masks.iter().map(|&m| label(m)).collect();
    let mut covers = Vec::new();
    for &m in &masks {
        if m.count_ones() < 2 {
            continue;
        }
        for i in 0..n {
            if m & (1 << i) != 0 {
                covers.push((label(m), label(m & !(1 << i))));
            }
        }
    }
    let poset = FinitePoset::from_cover_relations(&elements, &covers)
        .expect("reverse inclusion is a partial order");
    let measure = ElementMeasure::from_fn(&poset, |l| (l.len() as f64).log2())
        .expect("entropy decreases along reverse inclusion");
    Ok((poset, measure))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepCounts {
    pub plus: u64,
    pub minus: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumAggregate {
    pub per_step_entropy_bits: Vec<f64>,
    pub distinct_maximal_states: usize,
    pub empirical_frequencies: Vec<StepCounts>,
    /// Fraction of consecutive same-axis step pairs that repeated their
    /// outcome; absent when the axis list never repeats an axis in a row.
    pub repeat_probability: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// Exact predictive entropy at each step. After step `k` the state is
/// `±axis_k`, and binary entropy is the same for either sign.
pub fn analytic_step_entropies(input: &QubitState, axes: &[BlochAxis]) -> Vec<f64> {
    let mut state = *input;
    axes.iter()
        .map(|axis| {
            let (p, m) = transition_probs(&state, axis);
            state = QubitState::along(axis, Outcome::Plus);
            shannon_bits(&[p, m])
        })
        .collect()
}

fn state_key(s: &QubitState) -> [i64; 3] {
    s.bloch().map(|c| (c * 1e9).round() as i64)
}

/// Runs `trials` independent measurement sequences; trial `t` draws from
/// stream `t` of the root seed.
pub fn qubit_experiment(
    input: &QubitState,
    axes: &[BlochAxis],
    trials: u64,
    seed: u64,
) -> Result<QuantumAggregate> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    if axes.is_empty() {
        return Err(QuantumError::EmptyAxes.into());
    }
    let mut counts = vec![StepCounts { plus: 0, minus: 0 }; axes.len()];
    let mut maximal = BTreeSet::new();
    let repeated_axis: Vec<bool> = axes
        .windows(2)
        .map(|w| angle_between(&w[0], &w[1]) == 0.0)
        .collect();
    let (mut repeat_pairs, mut repeats) = (0u64, 0u64);

    for trial in 0..trials {
        let steps = run_sequence_with(input, axes, &mut trial_rng(seed, trial))?;
        for (c, step) in counts.iter_mut().zip(&steps) {
            match step.outcome {
                Outcome::Plus => c.plus += 1,
                Outcome::Minus => c.minus += 1,
            }
            maximal.insert(state_key(&step.post_state));
        }
        for (k, _) in repeated_axis.iter().enumerate().filter(|(_, r)| **r) {
            repeat_pairs += 1;
            repeats += u64::from(steps[k].outcome == steps[k + 1].outcome);
        }
    }

    Ok(QuantumAggregate {
        per_step_entropy_bits: analytic_step_entropies(input, axes),
        distinct_maximal_states: maximal.len(),
        empirical_frequencies: counts,
        repeat_probability: (repeat_pairs > 0).then(|| repeats as f64 / repeat_pairs as f64),
        trials,
        seed,
    })
}

/// Fraction of trials in which a second measurement along `axis` repeats
/// the first. Each trial starts from a random pure state.
pub fn fixed_basis_repeat(axis: &BlochAxis, trials: u64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let repeats = (0..trials)
        .filter(|&trial| {
            let mut rng = trial_rng(seed, trial);
            let input = QubitState::along(&BlochAxis::random(&mut rng), Outcome::Plus);
            let (first, post) = measure(&input, axis, &mut rng);
            let (second, _) = measure(&post, axis, &mut rng);
            first == second
        })
        .count();
    Ok(repeats as f64 / trials as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminismVerdict {
    pub physically_deterministic: bool,
    pub approximately_deterministic: bool,
    pub steps_to_certainty: Option<usize>,
    pub epsilon: f64,
}

/// Anything that yields a per-step entropy sequence.
pub trait EntropySequence {
    fn entropy_sequence(&self) -> Vec<f64>;

    /// Step number of the first entry of `entropy_sequence`.
    fn first_step(&self) -> usize;
}

impl EntropySequence for ClassicalTrace {
    fn entropy_sequence(&self) -> Vec<f64> {
        self.entropies()
    }

    // Entry 0 is the state before any box is opened.
    fn first_step(&self) -> usize {
        0
    }
}

impl EntropySequence for QuantumAggregate {
    fn entropy_sequence(&self) -> Vec<f64> {
        self.per_step_entropy_bits.clone()
    }

    fn first_step(&self) -> usize {
        1
    }
}

/// Deterministic iff the entropy is exactly 0 from some finite step on;
/// `steps_to_certainty` is that step. When the entropy instead settles
/// below `epsilon` without reaching 0, the system is only approximately
/// deterministic.
pub fn determinism_check<T: EntropySequence + ?Sized>(
    t: &T,
    epsilon: f64,
) -> Result<DeterminismVerdict> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(SimError::InvalidEpsilon(epsilon));
    }
    let entropies = t.entropy_sequence();
    let tail_start = |pred: &dyn Fn(f64) -> bool| -> Option<usize> {
        if entropies.is_empty() || !pred(*entropies.last().unwrap()) {
            return None;
        }
        let k = entropies
            .iter()
            .rposition(|&h| !pred(h))
            .map_or(0, |i| i + 1);
        Some(k)
    };
    let exact = tail_start(&|h| h == 0.0);
    let approx = tail_start(&|h| h < epsilon);
    Ok(DeterminismVerdict {
        physically_deterministic: exact.is_some(),
        approximately_deterministic: exact.is_none() && approx.is_some(),
        steps_to_certainty: exact.map(|k| k + t.first_step()),
        epsilon,
    })
}
