//! Row types for the CSV and structured outputs.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use delayed_choice::experiment::InterferencePattern;
use delayed_choice::hv::{Branch, HVSolution, SolutionFamily};
use delayed_choice::sampler::{ClickCounts, GoodnessOfFit};
use delayed_choice::JointDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub alpha: f64,
    pub phi: f64,
    pub intensity: f64,
    pub visibility: f64,
}

pub fn pattern_records(pattern: &InterferencePattern) -> Vec<PatternRecord> {
    pattern
        .rows
        .iter()
        .map(|r| PatternRecord {
            alpha: pattern.alpha,
            phi: r.phi,
            intensity: r.intensity,
            visibility: pattern.visibility,
        })
        .collect()
}

/// One joint outcome cell; the fit columns repeat on every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub a: u8,
    pub b: u8,
    pub count: u64,
    pub empirical: f64,
    pub expected: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub threshold: f64,
    pub pass: bool,
}

pub fn sample_records(
    counts: &ClickCounts,
    empirical: &JointDistribution,
    expected: &JointDistribution,
    fit: &GoodnessOfFit,
) -> Vec<SampleRecord> {
    let n = counts.to_array();
    (0..4)
        .map(|i| {
            let (a, b) = ((i / 2) as u8, (i % 2) as u8);
            SampleRecord {
                a,
                b,
                count: n[i],
                empirical: empirical.get(a, b),
                expected: expected.get(a, b),
                chi_square: fit.chi_square,
                dof: fit.degrees_of_freedom,
                threshold: fit.threshold,
                pass: fit.pass,
            }
        })
        .collect()
}

/// Coordinate cell of a family row: a pinned value, `free`, or `relation`
/// when the coordinate is tied up in the family's remaining equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub family: String,
    pub tags: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub v: String,
    pub f: String,
    pub relation: String,
}

pub fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::WaveActsAsParticle => "WaveActsAsParticle",
        Branch::ParticleActsAsWave => "ParticleActsAsWave",
        Branch::Superdeterministic => "Superdeterministic",
        Branch::DegenerateAlpha => "DegenerateAlpha",
        Branch::Infeasible => "Infeasible",
    }
}

fn join_branches(branches: &[Branch]) -> String {
    branches.iter().map(|b| branch_name(*b)).collect::<Vec<_>>().join("+")
}

pub fn family_record(family: &SolutionFamily) -> FamilyRecord {
    use delayed_choice::hv::Param;
    let cell = |p: Param| match family.pinned_value(p) {
        Some(v) => v.to_string(),
        None if family.free.contains(&p) => "free".to_string(),
        None => "relation".to_string(),
    };
    FamilyRecord {
        family: family.kind.name().to_string(),
        tags: join_branches(&family.branches),
        x: cell(Param::X),
        y: cell(Param::Y),
        z: cell(Param::Z),
        v: cell(Param::V),
        f: cell(Param::F),
        relation: family.relation.map(|r| r.describe().to_string()).unwrap_or_default(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
    pub f: f64,
    pub residual: f64,
    pub point_residual: f64,
    pub branches: String,
}

pub fn solution_record(s: &HVSolution) -> SolutionRecord {
    SolutionRecord {
        x: s.params.x,
        y: s.params.y,
        z: s.params.z,
        v: s.params.v,
        f: s.params.f,
        residual: s.residual,
        point_residual: s.point_residual,
        branches: join_branches(&s.branches),
    }
}

/// Conditional photon statistics after an ancilla outcome. For the diagonal
/// basis `state` holds the photon amplitudes as `re+imi;re+imi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostselectRecord {
    pub alpha: f64,
    pub phi: f64,
    pub basis: String,
    pub outcome: String,
    pub probability: f64,
    pub p0: f64,
    pub p1: f64,
    pub state: String,
}

pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: DeserializeOwned>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
