//! Single-qubit density matrices and the partial trace.

use num_complex::Complex64;

use crate::error::{config, Result};
use crate::state::{Amplitude, PureState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub entries: [[Amplitude; 2]; 2],
}

impl DensityMatrix {
    /// |ψ⟩⟨ψ| for a single-qubit state.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        if state.qubit_count() != 1 {
            return config("density matrix of a pure state needs one qubit");
        }
        let a = state.amplitudes();
        let mut entries = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i] * a[j].conj();
            }
        }
        Ok(Self { entries })
    }

    /// Convex combination Σ wᵢ ρᵢ.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Self {
        let mut entries = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (w, rho) in parts {
            for i in 0..2 {
                for j in 0..2 {
                    entries[i][j] += rho.entries[i][j] * *w;
                }
            }
        }
        Self { entries }
    }

    pub fn trace(&self) -> Amplitude {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let e = &self.entries;
        let diag = e[0][0].im.abs().max(e[1][1].im.abs());
        diag.max((e[0][1] - e[1][0].conj()).norm())
    }

    /// Eigenvalues (ascending) of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let b = 0.5 * (self.entries[0][1] + self.entries[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// ⟨k|ρ|k⟩
    pub fn population(&self, k: usize) -> f64 {
        self.entries[k][k].re
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }
}

/// Traces out every qubit except `keep` from a two-qubit state.
pub fn reduced_density_matrix(state: &PureState, keep: usize) -> Result<DensityMatrix> {
    if state.qubit_count() != 2 {
        return config("partial trace needs a two-qubit state");
    }
    if keep > 1 {
        return config(format!("qubit {keep} out of range for 2 qubits"));
    }
    let amp = state.amplitudes();
    // index = 2·q0 + q1
    let index = |kept: usize, traced: usize| if keep == 0 { 2 * kept + traced } else { 2 * traced + kept };
    let mut entries = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = (0..2).map(|t| amp[index(i, t)] * amp[index(j, t)].conj()).sum();
        }
    }
    Ok(DensityMatrix { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Amplitude {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let s = PureState::basis_state(2, 0b01).unwrap();
        let rho = reduced_density_matrix(&s, 0).unwrap();
        let expected = DensityMatrix::from_pure(&PureState::basis_state(1, 0).unwrap()).unwrap();
        assert!(rho.max_abs_diff(&expected) < 1e-15);
        let rho_a = reduced_density_matrix(&s, 1).unwrap();
        assert!((rho_a.population(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_state_is_maximally_mixed() {
        let s = PureState::new(vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap();
        for keep in 0..2 {
            let rho = reduced_density_matrix(&s, keep).unwrap();
            let half = DensityMatrix { entries: [[c(0.5), c(0.0)], [c(0.0), c(0.5)]] };
            assert!(rho.max_abs_diff(&half) < 1e-12);
            let ev = rho.eigenvalues();
            assert!((ev[0] - 0.5).abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_single_qubit() {
        let s = PureState::basis_state(1, 0).unwrap();
        assert!(reduced_density_matrix(&s, 0).is_err());
    }
}
