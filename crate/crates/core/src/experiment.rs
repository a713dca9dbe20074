//! Delayed-choice interferometer networks, their closed-form statistics and
//! post-selection.
//!
//! The photon passes a first beamsplitter (H), a phase shifter φ and a second
//! beamsplitter that is either controlled by the ancilla qubit (quantum
//! control) or inserted after the ancilla has been measured (classical
//! control). The ancilla is prepared as cos α|0⟩ + sin α|1⟩. Photon outcome 0
//! is a click in detector D₀.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Program, Step};
use crate::error::{config, Error, Result};
use crate::gate::Gate;
use crate::state::{Basis, PureState, ANCILLA, EXACT_TOL, PHOTON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlMode {
    /// The second beamsplitter is a controlled-Hadamard driven by the ancilla.
    #[serde(rename = "quantum")]
    QuantumControl,
    /// The ancilla is measured first and its outcome switches the beamsplitter.
    #[serde(rename = "classical")]
    ClassicalControl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub phi: f64,
    pub control_mode: ControlMode,
    pub ancilla_basis: Basis,
    pub shots: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(alpha: f64, phi: f64, control_mode: ControlMode, shots: u64, seed: u64) -> Result<Self> {
        let cfg = Self { alpha, phi, control_mode, ancilla_basis: Basis::Computational, shots, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_ancilla_basis(mut self, basis: Basis) -> Result<Self> {
        self.ancilla_basis = basis;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.phi.is_finite() {
            return config("alpha and phi must be finite");
        }
        if self.alpha < -EXACT_TOL || self.alpha > FRAC_PI_2 + EXACT_TOL {
            return config(format!("alpha = {} outside [0, π/2]", self.alpha));
        }
        if self.shots == 0 {
            return config("shots must be at least 1");
        }
        if self.control_mode == ControlMode::ClassicalControl && self.ancilla_basis != Basis::Computational {
            return config("classical control switches on a computational-basis ancilla readout");
        }
        Ok(())
    }
}

/// Joint photon–ancilla statistics p(a, b), ordered 00, 01, 10, 11 with the
/// photon outcome as the first index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl JointDistribution {
    pub fn from_array(p: [f64; 4]) -> Self {
        Self { p00: p[0], p01: p[1], p10: p[2], p11: p[3] }
    }

    pub fn from_slice(p: &[f64]) -> Result<Self> {
        match p {
            [a, b, c, d] => Ok(Self::from_array([*a, *b, *c, *d])),
            _ => config(format!("joint distribution needs 4 entries, got {}", p.len())),
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn get(&self, photon: u8, ancilla: u8) -> f64 {
        self.to_array()[2 * usize::from(photon) + usize::from(ancilla)]
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let p = self.to_array();
        p.iter().all(|x| x.is_finite() && *x >= -tol) && (p.iter().sum::<f64>() - 1.0).abs() <= tol
    }

    /// (P(a=0), P(a=1))
    pub fn photon_marginal(&self) -> [f64; 2] {
        [self.p00 + self.p01, self.p10 + self.p11]
    }

    /// (P(b=0), P(b=1))
    pub fn ancilla_marginal(&self) -> [f64; 2] {
        [self.p00 + self.p10, self.p01 + self.p11]
    }

    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub phi: f64,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferencePattern {
    pub alpha: f64,
    pub rows: Vec<PatternRow>,
    pub visibility: f64,
}

impl InterferencePattern {
    pub fn from_rows(alpha: f64, rows: Vec<PatternRow>) -> Self {
        let visibility = visibility(rows.iter().map(|r| r.intensity));
        Self { alpha, rows, visibility }
    }
}

/// (Imax − Imin)/(Imax + Imin) over the given intensities; 0 for an empty or
/// all-dark pattern.
pub fn visibility(intensities: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = intensities
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| (lo.min(i), hi.max(i)));
    if !(hi + lo > 0.0) {
        return 0.0;
    }
    (hi - lo) / (hi + lo)
}

/// Closed-form visibility sin²α of the D₀ pattern.
pub fn visibility_exact(alpha: f64) -> f64 {
    alpha.sin().powi(2)
}

/// (|0⟩ + e^{iφ}|1⟩)/√2: the photon after an open interferometer.
pub fn particle_state(phi: f64) -> PureState {
    let h = FRAC_1_SQRT_2;
    PureState::new(vec![Complex64::new(h, 0.0), Complex64::from_polar(h, phi)])
        .expect("particle state is normalized")
}

/// e^{iφ/2}(cos(φ/2)|0⟩ − i sin(φ/2)|1⟩): the photon after a closed interferometer.
pub fn wave_state(phi: f64) -> PureState {
    let global = Complex64::from_polar(1.0, phi / 2.0);
    let (s, c) = (phi / 2.0).sin_cos();
    PureState::new(vec![global * c, global * Complex64::new(0.0, -s)]).expect("wave state is normalized")
}

/// Gate/measurement program for the configured network.
///
/// Quantum control: RotY(2α) on the ancilla, H and PhaseShift(φ) on the photon,
/// controlled-H (ancilla → photon), then measure photon and ancilla.
/// Classical control: RotY(2α), measure the ancilla, H and PhaseShift(φ) on the
/// photon, H on the photon iff the ancilla read 1, then measure the photon.
pub fn build_circuit(cfg: &ExperimentConfig) -> Program {
    let prepare = [
        Step::Apply(Gate::rot_y(ANCILLA, 2.0 * cfg.alpha)),
        Step::Apply(Gate::hadamard(PHOTON)),
        Step::Apply(Gate::phase_shift(PHOTON, cfg.phi)),
    ];
    let steps = match cfg.control_mode {
        ControlMode::QuantumControl => {
            let mut steps = prepare.to_vec();
            steps.extend([
                Step::Apply(Gate::controlled_hadamard(ANCILLA, PHOTON)),
                Step::Measure { qubit: PHOTON, basis: Basis::Computational },
                Step::Measure { qubit: ANCILLA, basis: cfg.ancilla_basis },
            ]);
            steps
        }
        ControlMode::ClassicalControl => vec![
            prepare[0].clone(),
            Step::Measure { qubit: ANCILLA, basis: Basis::Computational },
            prepare[1].clone(),
            prepare[2].clone(),
            Step::ApplyIf { condition: ANCILLA, gate: Gate::hadamard(PHOTON) },
            Step::Measure { qubit: PHOTON, basis: Basis::Computational },
        ],
    };
    Program { qubit_count: 2, steps }
}

/// cos α|particle⟩|0⟩ + sin α|wave⟩|1⟩ in closed form.
pub fn final_state(alpha: f64, phi: f64) -> PureState {
    let (s, c) = alpha.sin_cos();
    let p = particle_state(phi);
    let w = wave_state(phi);
    let (p, w) = (p.amplitudes(), w.amplitudes());
    let amps = vec![p[0] * c, w[0] * s, p[1] * c, w[1] * s];
    PureState::new(amps).expect("final state has unit norm")
}

/// Final state of the quantum-control network obtained gate by gate.
pub fn evolve_network(alpha: f64, phi: f64) -> Result<PureState> {
    let cfg = ExperimentConfig {
        alpha,
        phi,
        control_mode: ControlMode::QuantumControl,
        ancilla_basis: Basis::Computational,
        shots: 1,
        seed: 0,
    };
    build_circuit(&cfg).unitary_prefix_state()
}

/// Closed-form p(a,b) = (½cos²α, sin²α cos²(φ/2), ½cos²α, sin²α sin²(φ/2)).
pub fn joint_distribution(alpha: f64, phi: f64) -> JointDistribution {
    let c2 = alpha.cos().powi(2);
    let s2 = alpha.sin().powi(2);
    let (sh, ch) = (phi / 2.0).sin_cos();
    JointDistribution::from_array([0.5 * c2, s2 * ch * ch, 0.5 * c2, s2 * sh * sh])
}

/// D₀ click probability I₀(φ, α) = ½cos²α + sin²α cos²(φ/2).
pub fn intensity(alpha: f64, phi: f64) -> f64 {
    0.5 * alpha.cos().powi(2) + alpha.sin().powi(2) * (phi / 2.0).cos().powi(2)
}

/// Evenly spaced φ grid over [0, 2π).
pub fn phi_grid(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| TAU * k as f64 / steps as f64).collect()
}

/// Adds φ = 0 and φ = π (the extrema of I₀) when missing, then sorts.
pub(crate) fn bracket_extrema(grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return config("phi grid is empty");
    }
    if grid.iter().any(|p| !p.is_finite()) {
        return config("phi grid contains a non-finite value");
    }
    let mut phis = grid.to_vec();
    for extremum in [0.0, PI] {
        if !phis.iter().any(|p| (p - extremum).abs() <= EXACT_TOL) {
            phis.push(extremum);
        }
    }
    phis.sort_by(f64::total_cmp);
    Ok(phis)
}

/// Exact interference pattern over a φ grid.
pub fn sweep(alpha: f64, phi_grid: &[f64]) -> Result<InterferencePattern> {
    let rows = bracket_extrema(phi_grid)?
        .into_iter()
        .map(|phi| PatternRow { phi, intensity: intensity(alpha, phi) })
        .collect();
    Ok(InterferencePattern::from_rows(alpha, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostSelection {
    /// Conditional (P(a=0), P(a=1)) given the ancilla outcome.
    pub photon: [f64; 2],
    pub probability: f64,
}

/// Photon statistics conditioned on a computational-basis ancilla outcome.
pub fn postselect(alpha: f64, phi: f64, ancilla_outcome: u8) -> Result<PostSelection> {
    let (weight, photon) = match ancilla_outcome {
        0 => (alpha.cos().powi(2), [0.5, 0.5]),
        1 => {
            let c = (phi / 2.0).cos().powi(2);
            (alpha.sin().powi(2), [c, 1.0 - c])
        }
        o => return config(format!("ancilla outcome {o} is not a bit")),
    };
    if weight <= EXACT_TOL {
        return Err(Error::Degenerate(format!(
            "ancilla outcome {ancilla_outcome} has probability {weight:e} at alpha = {alpha}"
        )));
    }
    Ok(PostSelection { photon, probability: weight })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn outcome(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// Photon state after projecting the ancilla onto |±⟩, i.e. the normalized
/// cos α|particle⟩ ± sin α|wave⟩, with the probability of that outcome.
pub fn diagonal_postselect(alpha: f64, phi: f64, sign: Sign) -> Result<(PureState, f64)> {
    let psi = final_state(alpha, phi);
    let a = psi.amplitudes();
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    // ⟨±|_ancilla applied to Σ a_{pb}|p⟩|b⟩
    let unnormalized: Vec<Complex64> = (0..2).map(|p| (a[2 * p] + a[2 * p + 1] * s) * FRAC_1_SQRT_2).collect();
    let probability: f64 = unnormalized.iter().map(|x| x.norm_sqr()).sum();
    if probability <= EXACT_TOL {
        return Err(Error::Degenerate(format!("diagonal outcome {sign:?} has vanishing probability")));
    }
    Ok((PureState::normalized(unnormalized)?, probability))
}

/// One classically controlled shot: returns (photon outcome, ancilla outcome).
pub fn classical_control_run<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Result<(u8, u8)> {
    if cfg.control_mode != ControlMode::ClassicalControl {
        return config("classical_control_run needs ClassicalControl mode");
    }
    let outcomes = build_circuit(cfg).run(rng)?;
    match (outcomes[PHOTON], outcomes[ANCILLA]) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => config("program left a qubit unmeasured"),
    }
}

/// Exact outcome distribution of the configured program, averaging over
/// mid-circuit measurement outcomes analytically.
pub fn exact_distribution(cfg: &ExperimentConfig) -> Result<JointDistribution> {
    JointDistribution::from_slice(&build_circuit(cfg).exact_distribution()?)
}
