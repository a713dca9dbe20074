use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use delayed_choice::density::reduced_density_matrix;
use delayed_choice::experiment::{exact_distribution, intensity, joint_distribution};
use delayed_choice::gate::Gate;
use delayed_choice::hv::{constraint_equations, equivalence_check, hv_predict, residual, HVParams, Setting, ANALYTIC_TOL};
use delayed_choice::rng::RandomStream;
use delayed_choice::sampler::{empirical_distribution, sample_clicks, sample_clicks_with, sampled_sweep};
use delayed_choice::state::{Basis, PureState, ANCILLA, PHOTON};
use delayed_choice::{ControlMode, Execution, ExperimentConfig};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 1000, ..ProptestConfig::default() }
}

fn state() -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| PureState::normalized(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap())
}

fn gate() -> impl Strategy<Value = Gate> {
    (0usize..4, 0usize..2, -TAU..TAU).prop_map(|(kind, t, angle)| match kind {
        0 => Gate::hadamard(t),
        1 => Gate::phase_shift(t, angle),
        2 => Gate::rot_y(t, angle),
        _ => Gate::controlled_hadamard(1 - t, t),
    })
}

fn params() -> impl Strategy<Value = HVParams> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0)
        .prop_map(|(x, y, z, v, f)| HVParams::new(x, y, z, v, f).unwrap())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn gate_then_adjoint_is_identity(psi in state(), g in gate()) {
        let back = psi.apply(&g).unwrap().apply(&g.adjoint()).unwrap();
        let overlap = back.overlap(&psi).unwrap();
        prop_assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm(psi in state(), gates in prop::collection::vec(gate(), 1..12)) {
        let out = psi.apply_all(&gates).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_states_are_density_matrices(psi in state(), keep in 0usize..2) {
        let rho = reduced_density_matrix(&psi, keep).unwrap();
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        let [l0, l1] = rho.eigenvalues();
        prop_assert!(l0 > -1e-12 && l1 > -1e-12);
    }

    #[test]
    fn hv_predictions_are_distributions(p in params(), phi in -TAU..TAU) {
        let d = hv_predict(&p, phi).unwrap();
        prop_assert!(d.is_valid(1e-12));
        let [b0, _] = d.ancilla_marginal();
        prop_assert!((b0 - (p.z * p.f + p.v * (1.0 - p.f))).abs() < 1e-12);
    }

    #[test]
    fn quantum_marginals(alpha in 0.0..FRAC_PI_2, phi in -TAU..TAU) {
        let p = joint_distribution(alpha, phi);
        prop_assert!(p.is_valid(1e-12));
        prop_assert!((p.photon_marginal()[0] - intensity(alpha, phi)).abs() < 1e-12);
        prop_assert!((p.ancilla_marginal()[0] - alpha.cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn classical_control_matches_quantum_control(alpha in 0.0..FRAC_PI_2, phi in -TAU..TAU) {
        let cfg = ExperimentConfig::new(alpha, phi, ControlMode::ClassicalControl, 1, 0).unwrap();
        prop_assert!(exact_distribution(&cfg).unwrap().max_abs_diff(&joint_distribution(alpha, phi)) < 1e-12);
    }

    #[test]
    fn reduction_is_sound(p in params(), alpha in 0.0..FRAC_PI_2, phi in -TAU..TAU) {
        let s = Setting::new(alpha, phi).unwrap();
        prop_assert!(equivalence_check(&p, &s, ANALYTIC_TOL).unwrap());
    }

    #[test]
    fn superdeterministic_family_is_exact(x in 0.0f64..=1.0, y in 0.0f64..=1.0, alpha in 0.06..1.5, phi in -TAU..TAU) {
        let s = Setting::new(alpha, phi).unwrap();
        let sd = HVParams::new(x, y, 1.0, 0.0, s.ancilla_zero()).unwrap();
        prop_assert!(residual(&sd, &[s]).unwrap() < 1e-12);
    }

    #[test]
    fn alpha_independence_obstruction(p in params(), a1 in 0.0..FRAC_PI_2, a2 in 0.0..FRAC_PI_2, phi in -TAU..TAU) {
        let tol = 1e-3;
        let (s1, s2) = (Setting::new(a1, phi).unwrap(), Setting::new(a2, phi).unwrap());
        let gap = (s1.ancilla_zero() - s2.ancilla_zero()).abs();
        let r = residual(&p, &[s1, s2]).unwrap();
        prop_assert!(r >= gap / 4.0 - 1e-12);
        if gap > 10.0 * tol {
            prop_assert!(r > tol);
        }
    }
}

#[test]
fn equivalence_on_a_21_by_21_grid() {
    let mut rng = RandomStream::new(21, 0);
    use rand::Rng;
    for i in 0..21 {
        for j in 0..21 {
            let s = Setting::new(FRAC_PI_2 * i as f64 / 20.0, TAU * j as f64 / 20.0).unwrap();
            let p = HVParams::new(rng.random(), rng.random(), rng.random(), rng.random(), rng.random()).unwrap();
            assert!(equivalence_check(&p, &s, ANALYTIC_TOL).unwrap());
            let sd = HVParams::new(rng.random(), rng.random(), 1.0, 0.0, s.ancilla_zero()).unwrap();
            assert!(equivalence_check(&sd, &s, ANALYTIC_TOL).unwrap());
            assert!(constraint_equations(&sd, &s).iter().all(|e| e.abs() < 1e-15));
        }
    }
}

#[test]
fn measurement_frequencies_within_five_sigma() {
    let psi = PureState::normalized(vec![
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.5, 0.2),
        Complex64::new(0.1, 0.6),
        Complex64::new(0.2, -0.4),
    ])
    .unwrap();
    let trials = 100_000;
    for (qubit, basis) in [(PHOTON, Basis::Computational), (ANCILLA, Basis::Computational), (PHOTON, Basis::Diagonal)] {
        let p1 = psi.outcome_probability(qubit, basis, 1).unwrap();
        let mut rng = RandomStream::new(99, qubit as u64);
        let ones = (0..trials).filter(|_| psi.measure(qubit, basis, &mut rng).unwrap().0 == 1).count();
        let sigma = (p1 * (1.0 - p1) / trials as f64).sqrt();
        let freq = ones as f64 / trials as f64;
        assert!((freq - p1).abs() < 5.0 * sigma, "{qubit} {basis:?}: {freq} vs {p1}");
    }
}

#[test]
fn sampling_error_shrinks_like_inverse_root_shots() {
    let (alpha, phi) = (0.7, 1.1);
    let exact = joint_distribution(alpha, phi);
    let rms = |shots: u64| {
        let seeds = 40;
        let sum: f64 = (0..seeds)
            .map(|seed| {
                let cfg = ExperimentConfig::new(alpha, phi, ControlMode::QuantumControl, shots, seed).unwrap();
                let e = empirical_distribution(&sample_clicks(&cfg).unwrap()).unwrap();
                e.max_abs_diff(&exact).powi(2)
            })
            .sum();
        (sum / seeds as f64).sqrt()
    };
    let ratio = rms(1_000) / rms(100_000);
    // √100 = 10; allow for the spread of a 40-seed estimate
    assert!((5.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = ExperimentConfig::new(0.8, 2.0, ControlMode::ClassicalControl, 300_000, 17).unwrap();
    let quantum = ExperimentConfig { control_mode: ControlMode::QuantumControl, ..cfg };
    let reference = sample_clicks_with(&cfg, Execution::Sequential).unwrap();
    let reference_q = sample_clicks_with(&quantum, Execution::Sequential).unwrap();
    let sweep_ref = sampled_sweep(0.8, &[0.0, 1.0, 2.0, 3.0], 1000, 5).unwrap();
    for threads in [1, 2, 4, 7] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            assert_eq!(sample_clicks(&cfg).unwrap(), reference);
            assert_eq!(sample_clicks(&quantum).unwrap(), reference_q);
            assert_eq!(sampled_sweep(0.8, &[0.0, 1.0, 2.0, 3.0], 1000, 5).unwrap(), sweep_ref);
        });
    }
}
