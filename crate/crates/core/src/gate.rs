//! Single-qubit and controlled gates for the 1–2 qubit engine.

use num_complex::Complex64;

use crate::error::{config, Result};
use crate::state::Amplitude;

pub type Matrix2 = [[Amplitude; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    Hadamard,
    /// diag(1, e^{iφ})
    PhaseShift(f64),
    /// Real rotation with RotY(2α)|0⟩ = cos α|0⟩ + sin α|1⟩.
    RotY(f64),
    /// Hadamard on the target when the control qubit is |1⟩.
    ControlledHadamard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
}

impl Gate {
    pub fn hadamard(target: usize) -> Self {
        Self { kind: GateKind::Hadamard, target, control: None }
    }

    pub fn phase_shift(target: usize, phi: f64) -> Self {
        Self { kind: GateKind::PhaseShift(phi), target, control: None }
    }

    pub fn rot_y(target: usize, theta: f64) -> Self {
        Self { kind: GateKind::RotY(theta), target, control: None }
    }

    pub fn controlled_hadamard(control: usize, target: usize) -> Self {
        Self { kind: GateKind::ControlledHadamard, target, control: Some(control) }
    }

    /// The 2×2 block acting on the target qubit (for the controlled gate, the
    /// block applied when the control is set).
    pub fn target_matrix(&self) -> Matrix2 {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            GateKind::Hadamard | GateKind::ControlledHadamard => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::PhaseShift(phi) => [[one, zero], [zero, Complex64::from_polar(1.0, phi)]],
            GateKind::RotY(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            GateKind::PhaseShift(phi) => GateKind::PhaseShift(-phi),
            GateKind::RotY(theta) => GateKind::RotY(-theta),
            k => k,
        };
        Self { kind, ..*self }
    }

    /// Checks index ranges against a register of `qubit_count` qubits.
    pub fn validate(&self, qubit_count: usize) -> Result<()> {
        if self.target >= qubit_count {
            return config(format!("gate target {} out of range for {qubit_count} qubit(s)", self.target));
        }
        match (self.kind, self.control) {
            (GateKind::ControlledHadamard, Some(c)) => {
                if c >= qubit_count {
                    return config(format!("gate control {c} out of range for {qubit_count} qubit(s)"));
                }
                if c == self.target {
                    return config("gate control and target coincide");
                }
                Ok(())
            }
            (GateKind::ControlledHadamard, None) => config("controlled gate without a control qubit"),
            (_, Some(_)) => config("uncontrolled gate given a control qubit"),
            (_, None) => Ok(()),
        }
    }

    /// Full 2^n × 2^n matrix in the register's basis ordering (qubit 0 is the
    /// high bit). Used for unitarity checks; evolution never builds it.
    pub fn full_matrix(&self, qubit_count: usize) -> Result<Vec<Vec<Amplitude>>> {
        self.validate(qubit_count)?;
        let dim = 1usize << qubit_count;
        let block = self.target_matrix();
        let tbit = bit_of(self.target, qubit_count);
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let active = self.control.is_none_or(|c| col & bit_of(c, qubit_count) != 0);
            if !active {
                m[col][col] = Complex64::new(1.0, 0.0);
                continue;
            }
            let t_in = usize::from(col & tbit != 0);
            for t_out in 0..2 {
                let row = (col & !tbit) | if t_out == 1 { tbit } else { 0 };
                m[row][col] = block[t_out][t_in];
            }
        }
        Ok(m)
    }
}

/// Bit mask of `qubit` in a register of `qubit_count` qubits; qubit 0 is the
/// most significant bit, so for the photon–ancilla pair index = 2·photon + ancilla.
pub(crate) fn bit_of(qubit: usize, qubit_count: usize) -> usize {
    1 << (qubit_count - 1 - qubit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev_from_identity(m: &[Vec<Amplitude>]) -> f64 {
        let n = m.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += m[k][i].conj() * m[k][j];
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }

    #[test]
    fn matrices_are_unitary() {
        let gates = [
            Gate::hadamard(0),
            Gate::phase_shift(1, 0.83),
            Gate::rot_y(0, 2.2),
            Gate::controlled_hadamard(1, 0),
            Gate::controlled_hadamard(0, 1),
        ];
        for g in gates {
            let m = g.full_matrix(2).unwrap();
            assert!(max_dev_from_identity(&m) < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn controlled_hadamard_layout() {
        // control = ancilla (qubit 1, low bit), target = photon (qubit 0, high bit)
        let m = Gate::controlled_hadamard(1, 0).full_matrix(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(m[0][0].re, 1.0);
        assert_eq!(m[2][2].re, 1.0);
        assert!((m[1][1].re - h).abs() < 1e-15);
        assert!((m[3][1].re - h).abs() < 1e-15);
        assert!((m[3][3].re + h).abs() < 1e-15);
        assert_eq!(m[2][0].norm(), 0.0);
    }

    #[test]
    fn validation_rejects_bad_indices() {
        assert!(Gate::hadamard(1).validate(1).is_err());
        assert!(Gate::controlled_hadamard(0, 0).validate(2).is_err());
        assert!(Gate::controlled_hadamard(2, 0).validate(2).is_err());
        assert!(Gate { kind: GateKind::Hadamard, target: 0, control: Some(1) }.validate(2).is_err());
    }
}
