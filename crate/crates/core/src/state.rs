//! Dense pure states over one or two qubits.
//!
//! Basis index convention: qubit 0 is the high bit. For the photon–ancilla
//! register the photon is qubit 0 and the ancilla qubit 1, so amplitudes are
//! ordered |00⟩, |01⟩, |10⟩, |11⟩ as |photon ancilla⟩.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::gate::{bit_of, Gate};

pub type Amplitude = Complex64;

pub const PHOTON: usize = 0;
pub const ANCILLA: usize = 1;

/// Tolerance for exact-arithmetic identities.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// |0⟩, |1⟩
    Computational,
    /// |+⟩ (outcome 0), |−⟩ (outcome 1)
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    qubit_count: usize,
    amplitudes: Vec<Amplitude>,
}

impl PureState {
    /// Builds a state from amplitudes, rejecting wrong lengths, non-finite
    /// entries and vectors whose norm deviates from 1 by more than 1e-12.
    pub fn new(amplitudes: Vec<Amplitude>) -> Result<Self> {
        let qubit_count = match amplitudes.len() {
            2 => 1,
            4 => 2,
            n => return config(format!("expected 2 or 4 amplitudes, got {n}")),
        };
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return config("non-finite amplitude");
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > EXACT_TOL {
            return config(format!("state not normalized: |ψ|² = {norm_sq}"));
        }
        Ok(Self { qubit_count, amplitudes })
    }

    /// Normalizes `amplitudes` first. Fails on a vanishing vector.
    pub fn normalized(amplitudes: Vec<Amplitude>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > EXACT_TOL) {
            return Err(Error::Degenerate("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis_state(qubit_count: usize, index: usize) -> Result<Self> {
        if !(1..=2).contains(&qubit_count) || index >= 1 << qubit_count {
            return config(format!("basis state {index} invalid for {qubit_count} qubit(s)"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { qubit_count, amplitudes: amps })
    }

    /// |photon⟩ ⊗ |ancilla⟩ with the photon as the high bit.
    pub fn product(photon: &PureState, ancilla: &PureState) -> Result<Self> {
        if photon.qubit_count != 1 || ancilla.qubit_count != 1 {
            return config("product expects two single-qubit states");
        }
        let mut amps = Vec::with_capacity(4);
        for p in &photon.amplitudes {
            for a in &ancilla.amplitudes {
                amps.push(p * a);
            }
        }
        Ok(Self { qubit_count: 2, amplitudes: amps })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities in basis-index order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        gate.validate(self.qubit_count)?;
        let block = gate.target_matrix();
        let tbit = bit_of(gate.target, self.qubit_count);
        let cmask = gate.control.map(|c| bit_of(c, self.qubit_count));
        let mut out = self.amplitudes.clone();
        for i0 in (0..self.amplitudes.len()).filter(|i| i & tbit == 0) {
            if cmask.is_some_and(|m| i0 & m == 0) {
                continue;
            }
            let i1 = i0 | tbit;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            out[i0] = block[0][0] * a0 + block[0][1] * a1;
            out[i1] = block[1][0] * a0 + block[1][1] * a1;
        }
        Ok(Self { qubit_count: self.qubit_count, amplitudes: out })
    }

    pub fn apply_all<'a>(&self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<Self> {
        gates.into_iter().try_fold(self.clone(), |s, g| s.apply(g))
    }

    /// Probability that measuring `qubit` in `basis` yields `outcome`.
    pub fn outcome_probability(&self, qubit: usize, basis: Basis, outcome: u8) -> Result<f64> {
        let rotated = self.to_measurement_frame(qubit, basis)?;
        let mask = bit_of(qubit, self.qubit_count);
        Ok(rotated
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) == (outcome == 1))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects `qubit` onto the given outcome and renormalizes. Returns the
    /// collapsed state and the outcome's probability.
    pub fn project(&self, qubit: usize, basis: Basis, outcome: u8) -> Result<(Self, f64)> {
        self.collapse(qubit, basis, outcome, EXACT_TOL)
    }

    pub(crate) fn collapse(&self, qubit: usize, basis: Basis, outcome: u8, floor: f64) -> Result<(Self, f64)> {
        if outcome > 1 {
            return config(format!("outcome {outcome} is not a bit"));
        }
        let rotated = self.to_measurement_frame(qubit, basis)?;
        let mask = bit_of(qubit, self.qubit_count);
        let mut amps = rotated.amplitudes;
        let mut prob = 0.0;
        for (i, a) in amps.iter_mut().enumerate() {
            if (i & mask != 0) == (outcome == 1) {
                prob += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if prob <= floor {
            return Err(Error::Degenerate(format!(
                "outcome {outcome} of qubit {qubit} has probability {prob:e}"
            )));
        }
        let scale = prob.sqrt();
        for a in amps.iter_mut() {
            *a /= scale;
        }
        let collapsed = Self { qubit_count: self.qubit_count, amplitudes: amps };
        Ok((collapsed.from_measurement_frame(qubit, basis)?, prob))
    }

    /// Samples a measurement of `qubit` in `basis` and returns the outcome with
    /// the collapsed state.
    pub fn measure<R: Rng + ?Sized>(&self, qubit: usize, basis: Basis, rng: &mut R) -> Result<(u8, Self)> {
        let p1 = self.outcome_probability(qubit, basis, 1)?;
        let u: f64 = rng.random();
        let outcome = u8::from(u < p1);
        let (collapsed, _) = self.collapse(qubit, basis, outcome, 0.0)?;
        Ok((outcome, collapsed))
    }

    /// ⟨self|other⟩
    pub fn overlap(&self, other: &PureState) -> Result<Amplitude> {
        if self.qubit_count != other.qubit_count {
            return config(format!(
                "overlap of {}- and {}-qubit states",
                self.qubit_count, other.qubit_count
            ));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// True when both states are the same ray, i.e. equal up to global phase.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.overlap(other).is_ok_and(|o| (o.norm() - 1.0).abs() <= tol)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubit_count {
            return config(format!("qubit {qubit} out of range for {} qubit(s)", self.qubit_count));
        }
        Ok(())
    }

    fn to_measurement_frame(&self, qubit: usize, basis: Basis) -> Result<Self> {
        self.check_qubit(qubit)?;
        match basis {
            Basis::Computational => Ok(self.clone()),
            Basis::Diagonal => self.apply(&Gate::hadamard(qubit)),
        }
    }

    fn from_measurement_frame(&self, qubit: usize, basis: Basis) -> Result<Self> {
        // H is self-inverse
        self.to_measurement_frame(qubit, basis)
    }
}
