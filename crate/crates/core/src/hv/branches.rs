//! Case analysis of the factored constraint system.
//!
//! e1 vanishes through v = 0, f = 1 or x = ½; e2 through f = 0, z = 1 or
//! y = cos²(φ/2). Of the nine pairings, (v=0, f=0) forces cos²α = 0,
//! (f=1, z=1) forces cos²α = 1 and (f=1, f=0) is contradictory. The six that
//! remain are returned by [`enumerate_branches`], each with e3 solved.

use serde::{Deserialize, Serialize};

use super::{Branch, HVParams, Setting};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    X,
    Y,
    Z,
    V,
    F,
}

impl Param {
    pub fn of(self, p: &HVParams) -> f64 {
        match self {
            Param::X => p.x,
            Param::Y => p.y,
            Param::Z => p.z,
            Param::V => p.v,
            Param::F => p.f,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::X => "x",
            Param::Y => "y",
            Param::Z => "z",
            Param::V => "v",
            Param::F => "f",
        }
    }
}

/// What is left of e3 after the pinned coordinates are substituted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// z·f = cos²α
    ZfEqualsC,
    /// f + v(1−f) = cos²α
    FPlusVRestEqualsC,
    /// z·f + v(1−f) = cos²α
    FullMarginal,
}

impl Relation {
    pub fn describe(self) -> &'static str {
        match self {
            Relation::ZfEqualsC => "z*f = cos^2(alpha)",
            Relation::FPlusVRestEqualsC => "f + v*(1-f) = cos^2(alpha)",
            Relation::FullMarginal => "z*f + v*(1-f) = cos^2(alpha)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// v = 0, z = 1, f = cos²α
    Superdeterministic,
    /// v = 0, y = cos²(φ/2)
    WaveNeverOpen,
    /// f = 1, y = cos²(φ/2), z = cos²α
    AlwaysParticle,
    /// f = 0, x = ½, v = cos²α
    AlwaysWave,
    /// z = 1, x = ½
    ParticleNeverClosed,
    /// x = ½, y = cos²(φ/2)
    BothInconsistent,
    DegenerateAlpha,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Superdeterministic => "superdeterministic",
            FamilyKind::WaveNeverOpen => "wave-never-open",
            FamilyKind::AlwaysParticle => "always-particle",
            FamilyKind::AlwaysWave => "always-wave",
            FamilyKind::ParticleNeverClosed => "particle-never-closed",
            FamilyKind::BothInconsistent => "both-inconsistent",
            FamilyKind::DegenerateAlpha => "degenerate-alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub kind: FamilyKind,
    pub branches: Vec<Branch>,
    /// Coordinates fixed to a value, in x, y, z, v, f order.
    pub pinned: Vec<(Param, f64)>,
    pub relation: Option<Relation>,
    /// Coordinates that appear in no constraint.
    pub free: Vec<Param>,
}

impl SolutionFamily {
    /// Max-norm distance from `p` to the family measured on the pinned
    /// coordinates.
    pub fn pinned_distance(&self, p: &HVParams) -> f64 {
        self.pinned.iter().fold(0.0, |d, (param, value)| d.max((param.of(p) - value).abs()))
    }

    pub fn pinned_value(&self, param: Param) -> Option<f64> {
        self.pinned.iter().find(|(p, _)| *p == param).map(|(_, v)| *v)
    }

    pub fn is_degenerate(&self) -> bool {
        self.kind == FamilyKind::DegenerateAlpha
    }

    /// A member of the family picked by `u ∈ [0,1]²`. Returns `None` for
    /// degenerate families.
    pub fn member(&self, setting: &Setting, u: [f64; 2]) -> Option<HVParams> {
        let c = setting.ancilla_zero();
        let w = setting.wave_d0();
        let [u0, u1] = u.map(|t| t.clamp(0.0, 1.0));
        let p = match self.kind {
            FamilyKind::Superdeterministic => HVParams { x: u0, y: u1, z: 1.0, v: 0.0, f: c },
            FamilyKind::WaveNeverOpen => {
                let f = c + (1.0 - c) * u0;
                HVParams { x: u1, y: w, z: c / f, v: 0.0, f }
            }
            FamilyKind::AlwaysParticle => HVParams { x: u0, y: w, z: c, v: u1, f: 1.0 },
            FamilyKind::AlwaysWave => HVParams { x: 0.5, y: u0, z: u1, v: c, f: 0.0 },
            FamilyKind::ParticleNeverClosed => {
                let f = c * u0;
                HVParams { x: 0.5, y: u1, z: 1.0, v: (c - f) / (1.0 - f), f }
            }
            FamilyKind::BothInconsistent => {
                let f = u0.min(1.0 - 1e-9);
                // 0 ≤ c − z·f ≤ 1 − f keeps v in [0, 1]
                let (lo, hi) = if f > 0.0 { (((c - 1.0 + f) / f).max(0.0), (c / f).min(1.0)) } else { (0.0, 1.0) };
                let z = lo + (hi - lo) * u1;
                let v = ((c - z * f) / (1.0 - f)).clamp(0.0, 1.0);
                HVParams { x: 0.5, y: w, z, v, f }
            }
            FamilyKind::DegenerateAlpha => return None,
        };
        p.validate().ok().map(|_| p)
    }
}

/// Every solution family of the factored system at `setting`.
///
/// Settings with cos²α within `tol` of 0 or 1 yield a single
/// `DegenerateAlpha` family.
pub fn enumerate_branches(setting: &Setting, tol: f64) -> Result<Vec<SolutionFamily>> {
    let c = setting.ancilla_zero();
    let w = setting.wave_d0();
    if setting.has_degenerate_alpha(tol) {
        return Ok(vec![SolutionFamily {
            kind: FamilyKind::DegenerateAlpha,
            branches: vec![Branch::DegenerateAlpha],
            pinned: vec![],
            relation: None,
            free: vec![Param::X, Param::Y, Param::Z, Param::V, Param::F],
        }]);
    }
    use Branch::*;
    use Param::*;
    Ok(vec![
        SolutionFamily {
            kind: FamilyKind::Superdeterministic,
            branches: vec![Superdeterministic],
            pinned: vec![(Z, 1.0), (V, 0.0), (F, c)],
            relation: None,
            free: vec![X, Y],
        },
        SolutionFamily {
            kind: FamilyKind::WaveNeverOpen,
            branches: vec![ParticleActsAsWave],
            pinned: vec![(Y, w), (V, 0.0)],
            relation: Some(Relation::ZfEqualsC),
            free: vec![X],
        },
        SolutionFamily {
            kind: FamilyKind::AlwaysParticle,
            branches: vec![ParticleActsAsWave],
            pinned: vec![(Y, w), (Z, c), (F, 1.0)],
            relation: None,
            free: vec![X, V],
        },
        SolutionFamily {
            kind: FamilyKind::AlwaysWave,
            branches: vec![WaveActsAsParticle],
            pinned: vec![(X, 0.5), (V, c), (F, 0.0)],
            relation: None,
            free: vec![Y, Z],
        },
        SolutionFamily {
            kind: FamilyKind::ParticleNeverClosed,
            branches: vec![WaveActsAsParticle],
            pinned: vec![(X, 0.5), (Z, 1.0)],
            relation: Some(Relation::FPlusVRestEqualsC),
            free: vec![Y],
        },
        SolutionFamily {
            kind: FamilyKind::BothInconsistent,
            branches: vec![WaveActsAsParticle, ParticleActsAsWave],
            pinned: vec![(X, 0.5), (Y, w)],
            relation: Some(Relation::FullMarginal),
            free: vec![],
        },
    ])
}
