//! Hidden-variable models with a binary λ ∈ {particle, wave}.
//!
//! A model predicts p(a,b) = Σ_λ p(a|b,λ) p(b|λ) p(λ) with two conditionals
//! fixed by the meaning of "particle" and "wave":
//!
//! * a particle in an open interferometer (b = 0) gives p(a) = (½, ½);
//! * a wave in a closed interferometer (b = 1) gives p(a) = (cos²(φ/2), sin²(φ/2)).
//!
//! The five remaining unknowns are collected in [`HVParams`]. Matching the
//! quantum statistics reduces to the factored system
//!
//! ```text
//! e1 = v(1−f)(x − ½)          = 0
//! e2 = f(1−z)(y − cos²(φ/2))  = 0
//! e3 = z·f + v(1−f) − cos²α   = 0
//! ```

mod branches;
mod interval;
mod search;
mod verdict;

pub use branches::{enumerate_branches, FamilyKind, Param, Relation, SolutionFamily};
pub use search::{classify, grid_search, grid_search_with, unexplained, CLASSIFY_SPACINGS, DEFAULT_CELL_TOL, GRID_RESOLUTIONS};
pub use verdict::{
    verdict, verdict_with, SettingFinding, SharedAlphaGroup, VerdictReport, INCONCLUSIVE, NO_CONSISTENT_HV_MODEL,
    VERDICT_RESOLUTION,
};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::experiment::{joint_distribution, JointDistribution};

/// Tolerance for analytic solutions.
pub const ANALYTIC_TOL: f64 = 1e-9;

/// max|e| ≤ PREDICT_TO_CONSTRAINT · max|Δp|, where Δp = hv_predict − p_QM.
pub const PREDICT_TO_CONSTRAINT: f64 = 3.0;
/// max|Δp| ≤ CONSTRAINT_TO_PREDICT · max|e|.
pub const CONSTRAINT_TO_PREDICT: f64 = 2.0;

/// Distance (radians, and in cos²α) from the degenerate settings that a
/// setting must keep to count as generic.
pub const GENERIC_MARGIN: f64 = 0.06;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HVParams {
    /// P(a=0 | b=0, λ=wave)
    pub x: f64,
    /// P(a=0 | b=1, λ=particle)
    pub y: f64,
    /// P(b=0 | λ=particle)
    pub z: f64,
    /// P(b=0 | λ=wave)
    pub v: f64,
    /// P(λ=particle)
    pub f: f64,
}

impl HVParams {
    pub fn new(x: f64, y: f64, z: f64, v: f64, f: f64) -> Result<Self> {
        let p = Self { x, y, z, v, f };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Domain(format!("{name} = {value} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.x, self.y, self.z, self.v, self.f]
    }

    fn named(&self) -> [(&'static str, f64); 5] {
        [("x", self.x), ("y", self.y), ("z", self.z), ("v", self.v), ("f", self.f)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub alpha: f64,
    pub phi: f64,
}

impl Setting {
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        if !alpha.is_finite() || !phi.is_finite() {
            return config("setting angles must be finite");
        }
        Ok(Self { alpha, phi })
    }

    /// cos²α, the probability that the ancilla reads 0.
    pub fn ancilla_zero(&self) -> f64 {
        self.alpha.cos().powi(2)
    }

    /// cos²(φ/2), the D₀ probability of a wave in a closed interferometer.
    pub fn wave_d0(&self) -> f64 {
        (self.phi / 2.0).cos().powi(2)
    }

    /// True when cos²α is bounded away from 0 and 1 and φ away from the
    /// multiples of π/2.
    pub fn is_generic(&self) -> bool {
        let c = self.ancilla_zero();
        let quarter = self.phi.rem_euclid(FRAC_PI_2);
        let phi_gap = quarter.min(FRAC_PI_2 - quarter);
        (GENERIC_MARGIN..=1.0 - GENERIC_MARGIN).contains(&c) && phi_gap >= GENERIC_MARGIN
    }

    pub fn has_degenerate_alpha(&self, tol: f64) -> bool {
        let c = self.ancilla_zero();
        c <= tol || c >= 1.0 - tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// x = ½: waves in an open interferometer show particle statistics.
    WaveActsAsParticle,
    /// y = cos²(φ/2): particles in a closed interferometer interfere.
    ParticleActsAsWave,
    /// v = 0, z = 1, f = cos²α: λ is slaved to the preparation setting.
    Superdeterministic,
    /// cos²α ∈ {0, 1}; the system is trivial and excluded.
    DegenerateAlpha,
    /// No family lies near the point.
    Infeasible,
}

impl Branch {
    /// Branches in which particles or waves misbehave.
    pub fn is_inconsistent_behaviour(self) -> bool {
        matches!(self, Branch::WaveActsAsParticle | Branch::ParticleActsAsWave)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HVSolution {
    pub params: HVParams,
    /// Lower bound on the constraint violation near the point (0 for an exact
    /// solution, the cell bound for a grid cell).
    pub residual: f64,
    /// hv_predict vs. quantum statistics at the point itself.
    pub point_residual: f64,
    pub branches: Vec<Branch>,
}

/// Joint statistics predicted by the model, built from the conditional tables.
pub fn hv_predict(params: &HVParams, phi: f64) -> Result<JointDistribution> {
    params.validate()?;
    let wave_d0 = (phi / 2.0).cos().powi(2);
    // p_a0[λ][b] = P(a=0 | b, λ), λ: 0 = particle, 1 = wave
    let p_a0 = [[0.5, params.y], [params.x, wave_d0]];
    let p_b0 = [params.z, params.v];
    let p_lambda = [params.f, 1.0 - params.f];
    let mut p = [0.0; 4];
    for lambda in 0..2 {
        for b in 0..2 {
            let pb = if b == 0 { p_b0[lambda] } else { 1.0 - p_b0[lambda] };
            let weight = pb * p_lambda[lambda];
            p[b] += p_a0[lambda][b] * weight;
            p[2 + b] += (1.0 - p_a0[lambda][b]) * weight;
        }
    }
    Ok(JointDistribution::from_array(p))
}

/// Largest entrywise gap between the model and the quantum statistics over
/// all settings. The model has no α dependence, so several α values test
/// whether one parameter set can serve every preparation.
pub fn residual(params: &HVParams, settings: &[Setting]) -> Result<f64> {
    if settings.is_empty() {
        return config("residual needs at least one setting");
    }
    settings.iter().try_fold(0.0f64, |worst, s| {
        let predicted = hv_predict(params, s.phi)?;
        Ok(worst.max(predicted.max_abs_diff(&joint_distribution(s.alpha, s.phi))))
    })
}

/// (e1, e2, e3) of the factored constraint system.
pub fn constraint_equations(params: &HVParams, setting: &Setting) -> [f64; 3] {
    let HVParams { x, y, z, v, f } = *params;
    [
        v * (1.0 - f) * (x - 0.5),
        f * (1.0 - z) * (y - setting.wave_d0()),
        z * f + v * (1.0 - f) - setting.ancilla_zero(),
    ]
}

/// Checks that matching the quantum statistics and solving the factored
/// system agree at `params`:
///
/// * max|Δp| ≤ tol implies max|e| ≤ 3·tol, and max|e| ≤ tol implies max|Δp| ≤ 2·tol;
/// * the bounds max|e| ≤ 3·max|Δp| and max|Δp| ≤ 2·max|e| hold up to rounding.
pub fn equivalence_check(params: &HVParams, setting: &Setting, tol: f64) -> Result<bool> {
    let gap = residual(params, std::slice::from_ref(setting))?;
    let e = constraint_equations(params, setting).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rounding = 1e-13;
    let zero_sets_agree = (gap > tol || e <= PREDICT_TO_CONSTRAINT * tol) && (e > tol || gap <= CONSTRAINT_TO_PREDICT * tol);
    let bounds_hold = e <= PREDICT_TO_CONSTRAINT * gap + rounding && gap <= CONSTRAINT_TO_PREDICT * e + rounding;
    Ok(zero_sets_agree && bounds_hold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn p(x: f64, y: f64, z: f64, v: f64, f: f64) -> HVParams {
        HVParams::new(x, y, z, v, f).unwrap()
    }

    #[test]
    fn superdeterministic_reproduces_quantum_statistics() {
        for &(alpha, phi) in &[(0.3, 0.7), (1.1, 2.2), (FRAC_PI_4, 4.0)] {
            let c = f64::cos(alpha).powi(2);
            for &(x, y) in &[(0.0, 1.0), (0.3, 0.9), (0.77, 0.12)] {
                let d = hv_predict(&p(x, y, 1.0, 0.0, c), phi).unwrap();
                assert!(d.max_abs_diff(&joint_distribution(alpha, phi)) < 1e-12);
            }
        }
    }

    #[test]
    fn all_particle_and_all_wave_worlds() {
        let d = hv_predict(&p(0.2, 0.6, 1.0, 0.4, 1.0), 1.0).unwrap();
        assert!(d.max_abs_diff(&JointDistribution::from_array([0.5, 0.0, 0.5, 0.0])) < 1e-15);
        let phi: f64 = 1.3;
        let d = hv_predict(&p(0.2, 0.6, 0.4, 0.0, 0.0), phi).unwrap();
        let c = (phi / 2.0).cos().powi(2);
        assert!(d.max_abs_diff(&JointDistribution::from_array([0.0, c, 0.0, 1.0 - c])) < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(HVParams::new(1.1, 0.0, 0.0, 0.0, 0.0), Err(Error::Domain(_))));
        let bad = HVParams { x: 0.0, y: -0.1, z: 0.0, v: 0.0, f: 0.0 };
        assert!(matches!(hv_predict(&bad, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn residual_examples() {
        let s = Setting::new(0.3, 0.7).unwrap();
        let sd = p(0.4, 0.4, 1.0, 0.0, s.ancilla_zero());
        assert!(residual(&sd, &[s]).unwrap() < 1e-12);
        // all-particle world vs (π/4, 0): quantum (¼, ½, ¼, 0), model (½, 0, ½, 0)
        let r = residual(&p(0.5, 0.5, 1.0, 0.5, 1.0), &[Setting::new(FRAC_PI_4, 0.0).unwrap()]).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!(residual(&sd, &[]).is_err());
    }

    #[test]
    fn constraint_examples() {
        let s = Setting::new(0.3, 0.7).unwrap();
        let sd = p(0.1, 0.9, 1.0, 0.0, s.ancilla_zero());
        assert!(constraint_equations(&sd, &s).iter().all(|e| e.abs() < 1e-15));
        let e = constraint_equations(&p(1.0, 0.3, 0.2, 1.0, 0.0), &Setting::new(FRAC_PI_2, 0.4).unwrap());
        assert!((e[0] - 0.5).abs() < 1e-15);
        assert!((e[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inconsistent_factors_vanish() {
        let s = Setting::new(0.8, 1.9).unwrap();
        // x = ½, y = cos²(φ/2), and (z, v, f) solving e3
        let (z, f) = (0.3, 0.4);
        let v = (s.ancilla_zero() - z * f) / (1.0 - f);
        let params = p(0.5, s.wave_d0(), z, v, f);
        assert!(constraint_equations(&params, &s).iter().all(|e| e.abs() < 1e-15));
        assert!(residual(&params, &[s]).unwrap() < 1e-15);
    }

    #[test]
    fn equivalence_on_solutions_and_non_solutions() {
        let s = Setting::new(0.3, 0.7).unwrap();
        let sd = p(0.2, 0.8, 1.0, 0.0, s.ancilla_zero());
        assert!(equivalence_check(&sd, &s, ANALYTIC_TOL).unwrap());
        let off = p(0.1, 0.2, 0.0, 0.3, 1.0);
        assert!(equivalence_check(&off, &s, ANALYTIC_TOL).unwrap());
        assert!(constraint_equations(&off, &s)[1].abs() > 0.1);
        assert!(residual(&off, &[s]).unwrap() > 0.1);
    }

    #[test]
    fn generic_settings() {
        assert!(Setting::new(0.3, 0.7).unwrap().is_generic());
        assert!(!Setting::new(0.0, 0.7).unwrap().is_generic());
        assert!(!Setting::new(0.3, PI).unwrap().is_generic());
        assert!(!Setting::new(0.3, -FRAC_PI_2).unwrap().is_generic());
        assert!(!Setting::new(FRAC_PI_2, 1.0).unwrap().is_generic());
    }
}
