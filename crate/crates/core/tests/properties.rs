//! Property tests for the order, measure, basis and simulation invariants.

use std::f64::consts::{PI, TAU};

use infoorder::classical::{bayesian_leq, ClassicalState};
use infoorder::context::{
    contextual_distance, poset_orthogonal, qubit_distance_curve, ElementMeasure,
};
use infoorder::measures::{kernel_at_maximal, strictly_decreases, MeasurementFn};
use infoorder::poset::FinitePoset;
use infoorder::quantum::{transition_matrix, BlochAxis, NBasis};
use infoorder::sims::{boxes_experiment, determinism_check, qubit_experiment};
use infoorder::QubitState;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_poset(max: usize) -> impl Strategy<Value = FinitePoset> {
    (1..=max, 0.0..=1.0f64, any::<u64>()).prop_map(|(n, density, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FinitePoset::random(n, density, &mut rng)
    })
}

fn arb_state(max_dim: usize) -> impl Strategy<Value = ClassicalState> {
    (1..=max_dim)
        .prop_flat_map(|n| proptest::collection::vec(0.0..1.0f64, n))
        .prop_filter_map("nonzero mass", normalized)
}

fn normalized(raw: Vec<f64>) -> Option<ClassicalState> {
    let total: f64 = raw.iter().sum();
    (total > 1e-6).then(|| ClassicalState::new(raw.iter().map(|v| v / total).collect()).unwrap())
}

/// Same-dimension pairs; half are small perturbations of each other.
fn arb_state_pair(max_dim: usize) -> impl Strategy<Value = (ClassicalState, ClassicalState)> {
    (1..=max_dim)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0.0..1.0f64, n),
                proptest::collection::vec(-1e-10..1e-10f64, n),
                proptest::collection::vec(0.0..1.0f64, n),
                any::<bool>(),
            )
        })
        .prop_filter_map("nonzero mass", |(a, jitter, b, near)| {
            let x = normalized(a.clone())?;
            let y = if near {
                normalized(
                    a.iter()
                        .zip(&jitter)
                        .map(|(v, j)| (v + j).max(0.0))
                        .collect(),
                )?
            } else {
                normalized(b)?
            };
            Some((x, y))
        })
}

/// An order-related pair along a mixing path from the uniform state.
fn arb_related_pair() -> impl Strategy<Value = (ClassicalState, ClassicalState)> {
    (2..=6usize, any::<u64>(), 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(n, seed, s, t)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = ClassicalState::random(n, &mut rng).unwrap();
        let x = ClassicalState::mixed(n)
            .unwrap()
            .mixing_path(&y, s.min(t))
            .unwrap();
        let y = ClassicalState::mixed(n)
            .unwrap()
            .mixing_path(&y, s.max(t))
            .unwrap();
        (x, y)
    })
}

/// Random unitary columns via Gram-Schmidt on complex Gaussians-ish input.
fn random_basis(n: usize, rng: &mut ChaCha8Rng) -> NBasis {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    NBasis::new(cols).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_idempotent(p in arb_poset(10)) {
        let again = p.to_file().into_poset().unwrap();
        prop_assert_eq!(&again, &p);
    }

    #[test]
    fn way_below_coincides_with_order(p in arb_poset(8)) {
        let wb = p.way_below_relation().unwrap();
        for x in 0..p.len() {
            prop_assert!(wb.holds(x, x));
            for y in 0..p.len() {
                prop_assert_eq!(wb.holds(x, y), p.leq_index(x, y));
            }
        }
        prop_assert!(p.is_dcpo().unwrap().is_dcpo);
        prop_assert!(p.check_proposition1().unwrap().holds);
        prop_assert!(p.is_basis(&p.all_elements()).unwrap());
    }

    #[test]
    fn suprema_are_least_upper_bounds(p in arb_poset(8), mask in 1u64..256) {
        let s: infoorder::ElementSubset = (0..p.len()).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!s.is_empty());
        if let Some(sup) = p.supremum_index(&s).unwrap() {
            for a in s.indices() {
                prop_assert!(p.leq_index(a, sup));
            }
            for u in 0..p.len() {
                if s.indices().all(|a| p.leq_index(a, u)) {
                    prop_assert!(p.leq_index(sup, u));
                }
            }
        }
    }

    #[test]
    fn maximal_means_no_strict_successor(p in arb_poset(10)) {
        let max = p.maximal_elements();
        for x in 0..p.len() {
            let has_successor = (0..p.len()).any(|y| y != x && p.leq_index(x, y));
            prop_assert_eq!(max.contains_index(x), !has_successor);
        }
    }

    #[test]
    fn self_orthogonal_only_when_maximal(p in arb_poset(8)) {
        // Height below the top as the measure: zero exactly on maximal elements.
        let maximal = p.maximal_elements();
        let f = ElementMeasure::from_fn(&p, |l| {
            let i = p.index_of(l).unwrap();
            (0..p.len()).filter(|&j| j != i && p.leq_index(i, j)).count() as f64
        }).unwrap();
        for x in 0..p.len() {
            let label = p.label(x);
            prop_assert_eq!(
                poset_orthogonal(&p, &f, label, label).unwrap(),
                maximal.contains_index(x)
            );
        }
    }

    #[test]
    fn bayesian_order_is_reflexive(x in arb_state(7)) {
        prop_assert!(bayesian_leq(&x, &x).unwrap());
    }

    #[test]
    fn uniform_is_least(y in arb_state(7)) {
        prop_assert!(bayesian_leq(&ClassicalState::mixed(y.dim()).unwrap(), &y).unwrap());
    }

    #[test]
    fn pure_states_are_maximal(y in arb_state(6), i in any::<prop::sample::Index>()) {
        let n = y.dim();
        let i = i.index(n);
        let p = ClassicalState::pure(n, i).unwrap();
        if bayesian_leq(&p, &y).unwrap() {
            prop_assert_eq!(&y, &p);
        }
    }

    #[test]
    fn antisymmetry_up_to_tolerance((x, y) in arb_state_pair(5)) {
        if bayesian_leq(&x, &y).unwrap() && bayesian_leq(&y, &x).unwrap() {
            prop_assert!(x.approx_eq(&y, 1e-9));
        }
    }

    #[test]
    fn transitivity_along_paths((x, y) in arb_related_pair(), t in 0.0..=1.0f64) {
        let z = x.mixing_path(&y, t).unwrap();
        // x ⊑ z ⊑ y, so x ⊑ y must follow.
        if bayesian_leq(&x, &z).unwrap() && bayesian_leq(&z, &y).unwrap() {
            prop_assert!(bayesian_leq(&x, &y).unwrap());
        }
    }

    #[test]
    fn elimination_from_uniform_support_adds_information(
        (n, mask) in (2usize..8).prop_flat_map(|n| (Just(n), 0u64..(1 << n))),
        pick in 0usize..8,
    ) {
        // Bits 0 and 1 are always in the support.
        let support: Vec<usize> = (0..n).filter(|&i| i < 2 || mask & (1 << i) != 0).collect();
        let mut probs = vec![0.0; n];
        for &i in &support {
            probs[i] = 1.0 / support.len() as f64;
        }
        let x = ClassicalState::new(probs).unwrap();
        let e = x.eliminate(support[pick % support.len()]).unwrap();
        prop_assert!(bayesian_leq(&x, &e).unwrap(), "x={:?} e={:?}", x, e);
    }

    #[test]
    fn eliminating_least_likely_outcome_adds_information(x in arb_state(7)) {
        let (i, _) = x
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        prop_assume!(x.probs()[i] < 1.0 - 1e-9);
        let e = x.eliminate(i).unwrap();
        prop_assert!(bayesian_leq(&x, &e).unwrap(), "x={:?} e={:?}", x, e);
    }

    #[test]
    fn shannon_strictly_monotone((x, y) in arb_related_pair()) {
        if let Some(strict) = strictly_decreases(&MeasurementFn::Shannon, &x, &y) {
            prop_assert!(strict);
        }
    }

    #[test]
    fn measures_vanish_exactly_on_pure_states(x in arb_state(7), a in 0.0..3.0f64, b in 0.0..3.0f64) {
        prop_assume!(a + b > 0.0);
        for f in [MeasurementFn::Shannon, MeasurementFn::Hartley, MeasurementFn::linear_combo(a, b).unwrap()] {
            let v = f.evaluate(&x);
            prop_assert!(v >= 0.0 && v.is_finite());
            prop_assert!(kernel_at_maximal(&f, &x));
            for i in 0..x.dim() {
                prop_assert_eq!(f.evaluate(&ClassicalState::pure(x.dim(), i).unwrap()), 0.0);
            }
        }
    }

    #[test]
    fn transition_matrices_are_doubly_stochastic(n in 2usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_basis(n, &mut rng), random_basis(n, &mut rng));
        let t = transition_matrix(&a, &b).unwrap();
        for i in 0..n {
            let row: f64 = t[i].iter().sum();
            let col: f64 = t.iter().map(|r| r[i]).sum();
            prop_assert!((row - 1.0).abs() < 1e-9 && (col - 1.0).abs() < 1e-9);
        }
        let r = contextual_distance(&a, &b).unwrap();
        prop_assert!(r.value_bits >= 0.0 && r.value_bits <= r.sup_bits + 1e-9);
    }

    #[test]
    fn distance_ignores_outcome_labels(n in 2usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_basis(n, &mut rng), random_basis(n, &mut rng));
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let base = contextual_distance(&a, &b).unwrap().value_bits;
        let pa = contextual_distance(&a.permuted(&perm).unwrap(), &b).unwrap().value_bits;
        let pb = contextual_distance(&a, &b.permuted(&perm).unwrap()).unwrap().value_bits;
        prop_assert!((base - pa).abs() < 1e-12 && (base - pb).abs() < 1e-12);
        prop_assert!(contextual_distance(&a, &a.permuted(&perm).unwrap()).unwrap().value_bits < 1e-9);
    }

    #[test]
    fn qubit_distance_is_symmetric(t1 in 0.0..PI, p1 in 0.0..TAU, t2 in 0.0..PI, p2 in 0.0..TAU) {
        let a = NBasis::qubit(&BlochAxis::new(t1, p1));
        let b = NBasis::qubit(&BlochAxis::new(t2, p2));
        let ab = contextual_distance(&a, &b).unwrap().value_bits;
        let ba = contextual_distance(&b, &a).unwrap().value_bits;
        prop_assert!((ab - ba).abs() < 1e-9);
    }

    #[test]
    fn boxes_invariants(n in 2usize..9, ball_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(ball_seed);
        let ball = rng.gen_range(0..n);
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let t = boxes_experiment(n, ball, &order).unwrap();
        prop_assert!(t.steps.len() <= n);
        let h = t.entropies();
        prop_assert!(h.windows(2).all(|w| w[0] > w[1]));
        prop_assert_eq!(*h.last().unwrap(), 0.0);
        prop_assert!(t.steps.last().unwrap().state.is_pure());
        for (k, s) in t.steps.iter().enumerate().filter(|(_, s)| !s.found) {
            prop_assert!((s.entropy_bits - ((n - k) as f64).log2()).abs() < 1e-12);
        }
        for w in t.steps.windows(2) {
            prop_assert!(bayesian_leq(&w[0].state, &w[1].state).unwrap());
        }
        prop_assert!(determinism_check(&t, 0.01).unwrap().physically_deterministic);
    }
}

#[test]
fn qubit_curve_is_strictly_increasing() {
    let grid: Vec<f64> = (0..=90).map(|i| PI / 2.0 * i as f64 / 90.0).collect();
    let curve = qubit_distance_curve(&grid);
    assert!(curve.windows(2).all(|w| w[0].1 < w[1].1));
}

#[test]
fn mixing_law_sample_violations_are_recorded() {
    // The mixing law is expected to hold along every sampled segment; the
    // count is printed so any exception is visible.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    let total = 5000;
    for _ in 0..total {
        let n = rng.gen_range(2..=6);
        let y = ClassicalState::random(n, &mut rng).unwrap();
        let x = ClassicalState::mixed(n)
            .unwrap()
            .mixing_path(&y, rng.gen_range(0.0..1.0))
            .unwrap();
        let z = x.mixing_path(&y, rng.gen_range(0.0..=1.0)).unwrap();
        if !(bayesian_leq(&x, &z).unwrap() && bayesian_leq(&z, &y).unwrap()) {
            violations += 1;
        }
    }
    println!("mixing law: {violations} violations in {total} samples");
    assert_eq!(violations, 0);
}

#[test]
fn eliminating_the_likeliest_outcome_can_lose_comparability() {
    let x = ClassicalState::new(vec![0.2, 0.8]).unwrap();
    let e = x.eliminate(1).unwrap();
    assert_eq!(e.probs(), &[1.0, 0.0]);
    assert!(!bayesian_leq(&x, &e).unwrap());
    assert!(!bayesian_leq(&e, &x).unwrap());
}

#[test]
fn distance_is_symmetric_in_higher_dimensions() {
    // Rows sum to 1, so the mean row entropy is -(1/n) sum T_ij log T_ij,
    // which is unchanged by transposing T.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(3..=5);
        let (a, b) = (random_basis(n, &mut rng), random_basis(n, &mut rng));
        let ab = contextual_distance(&a, &b).unwrap().value_bits;
        let ba = contextual_distance(&b, &a).unwrap().value_bits;
        worst = worst.max((ab - ba).abs());
    }
    println!("max |d(a,b) - d(b,a)| over sampled 3..5-dim bases: {worst:e}");
    assert!(worst < 1e-12);
}

#[test]
fn runs_are_reproducible() {
    let (z, x) = (BlochAxis::z(), BlochAxis::x());
    let a = qubit_experiment(&QubitState::z_plus(), &[z, x, z], 500, 9).unwrap();
    let b = qubit_experiment(&QubitState::z_plus(), &[z, x, z], 500, 9).unwrap();
    assert_eq!(a, b);
    let c = qubit_experiment(&QubitState::z_plus(), &[z, x, z], 500, 10).unwrap();
    assert_ne!(a.empirical_frequencies, c.empirical_frequencies);
}

#[test]
fn boxes_domain_orthogonality() {
    let (p, m) = infoorder::sims::elimination_domain(3).unwrap();
    assert!(poset_orthogonal(&p, &m, "A", "B").unwrap());
    assert!(!poset_orthogonal(&p, &m, "ABC", "BC").unwrap());
    // Knowing "not A" and "not B" together leaves only C.
    assert!(poset_orthogonal(&p, &m, "BC", "AC").unwrap());
    assert!(!poset_orthogonal(&p, &m, "BC", "BC").unwrap());
    let report = p.analyze().unwrap();
    assert!(report.is_dcpo && report.proposition1_holds);
    assert_eq!(report.maximal_elements, ["C", "B", "A"]);
}
