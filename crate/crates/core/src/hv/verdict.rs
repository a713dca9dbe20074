//! Multi-setting verdict: can one parameter set serve several preparations?

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::search::Grid;
use super::{
    enumerate_branches, grid_search_with, hv_predict, unexplained, Branch, FamilyKind, HVParams, Param, Setting,
    SolutionFamily,
};
use crate::error::{config, Error, Result};
use crate::experiment::{joint_distribution, JointDistribution};
use crate::par::Execution;

pub const NO_CONSISTENT_HV_MODEL: &str = "NO_CONSISTENT_HV_MODEL";
pub const INCONCLUSIVE: &str = "INCONCLUSIVE";

/// Grid used for the cross-setting intersection and the joint minimization.
pub const VERDICT_RESOLUTION: f64 = 0.05;

const DISTINCT: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SettingFinding {
    pub setting: Setting,
    /// cos²α
    pub ancilla_zero: f64,
    /// cos²(φ/2)
    pub wave_d0: f64,
    pub families: Vec<SolutionFamily>,
    /// Families free of inconsistent particle/wave behaviour.
    pub consistent_families: Vec<FamilyKind>,
    /// f of the superdeterministic family; equals cos²α.
    pub superdeterministic_f: f64,
    /// p(b | λ) of the superdeterministic family, rows λ = particle, wave.
    pub superdeterministic_p_b_given_lambda: [[f64; 2]; 2],
    pub grid_cells: usize,
    pub unexplained_cells: usize,
}

/// Settings that share one α, intersected on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct SharedAlphaGroup {
    pub alpha: f64,
    pub phis: Vec<f64>,
    pub common_cells: usize,
    /// Common cells lying near a y = cos²(φ/2) family at every φ of the group.
    pub y_pinned_everywhere: usize,
    /// Common cells near the superdeterministic family at every φ.
    pub superdeterministic_everywhere: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub verdict: String,
    pub resolution: f64,
    pub tol: f64,
    pub findings: Vec<SettingFinding>,
    /// max cos²α − min cos²α over the settings.
    pub marginal_spread: f64,
    /// No parameter set can do better than this joint residual.
    pub joint_residual_lower_bound: f64,
    /// Best joint residual over the grid nodes.
    pub best_joint_residual: f64,
    pub best_joint_params: HVParams,
    /// Grid cells feasible at every setting at once.
    pub common_cells: usize,
    /// max − min of cos²(φ/2); a single y cannot match all of them.
    pub y_spread: f64,
    /// Reading with x, y free to vary with φ: settings sharing α.
    pub shared_alpha: Vec<SharedAlphaGroup>,
}

impl VerdictReport {
    /// `key = value` lines, one per fact.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("verdict", self.verdict.clone());
        line("settings", self.findings.len().to_string());
        line("resolution", self.resolution.to_string());
        line("tol", self.tol.to_string());
        for (i, f) in self.findings.iter().enumerate() {
            let p = format!("setting.{i}");
            line(&format!("{p}.alpha"), f.setting.alpha.to_string());
            line(&format!("{p}.phi"), f.setting.phi.to_string());
            line(&format!("{p}.cos2_alpha"), f.ancilla_zero.to_string());
            line(&format!("{p}.cos2_half_phi"), f.wave_d0.to_string());
            let kinds: Vec<_> = f.families.iter().map(|fam| fam.kind.name()).collect();
            line(&format!("{p}.families"), kinds.join(","));
            let consistent: Vec<_> = f.consistent_families.iter().map(|k| k.name()).collect();
            line(&format!("{p}.consistent_families"), consistent.join(","));
            line(&format!("{p}.superdeterministic_f"), f.superdeterministic_f.to_string());
            let t = f.superdeterministic_p_b_given_lambda;
            line(
                &format!("{p}.p_b_given_lambda"),
                format!("particle:({},{}) wave:({},{})", t[0][0], t[0][1], t[1][0], t[1][1]),
            );
            line(&format!("{p}.grid_cells"), f.grid_cells.to_string());
            line(&format!("{p}.unexplained_cells"), f.unexplained_cells.to_string());
        }
        line("marginal_spread", self.marginal_spread.to_string());
        line("joint_residual_lower_bound", self.joint_residual_lower_bound.to_string());
        line("best_joint_residual", self.best_joint_residual.to_string());
        let b = self.best_joint_params;
        line("best_joint_params", format!("x={} y={} z={} v={} f={}", b.x, b.y, b.z, b.v, b.f));
        line("common_cells", self.common_cells.to_string());
        line("y_spread", self.y_spread.to_string());
        for (i, g) in self.shared_alpha.iter().enumerate() {
            let p = format!("shared_alpha.{i}");
            line(&format!("{p}.alpha"), g.alpha.to_string());
            let phis: Vec<_> = g.phis.iter().map(|v| v.to_string()).collect();
            line(&format!("{p}.phis"), phis.join(","));
            line(&format!("{p}.common_cells"), g.common_cells.to_string());
            line(&format!("{p}.y_pinned_everywhere"), g.y_pinned_everywhere.to_string());
            line(&format!("{p}.superdeterministic_everywhere"), g.superdeterministic_everywhere.to_string());
        }
        out
    }
}

fn distinct_count(values: impl Iterator<Item = f64>) -> usize {
    let mut sorted: Vec<f64> = values.collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup_by(|a, b| (*a - *b).abs() <= DISTINCT);
    sorted.len()
}

fn spread(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let hi = values.clone().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.fold(f64::INFINITY, f64::min);
    hi - lo
}

pub fn verdict(settings: &[Setting], tol: f64) -> Result<VerdictReport> {
    verdict_with(settings, tol, Execution::default())
}

pub fn verdict_with(settings: &[Setting], tol: f64, exec: Execution) -> Result<VerdictReport> {
    if distinct_count(settings.iter().map(|s| s.alpha)) < 2 || distinct_count(settings.iter().map(|s| s.phi)) < 2 {
        return config("verdict needs at least two distinct alpha and two distinct phi values");
    }
    if let Some(s) = settings.iter().find(|s| !s.is_generic()) {
        return Err(Error::Degenerate(format!(
            "setting (alpha={}, phi={}) is not generic",
            s.alpha, s.phi
        )));
    }
    let grid = Grid::for_resolution(VERDICT_RESOLUTION)?;
    let n = grid.steps;
    let key = |p: &HVParams| p.to_array().map(|v| (v * n as f64).round() as usize);

    let mut findings = Vec::with_capacity(settings.len());
    // per setting: cell key -> branch tags
    let mut cells: Vec<std::collections::BTreeMap<[usize; 5], Vec<Branch>>> = Vec::new();
    for s in settings {
        let families = enumerate_branches(s, tol)?;
        let sd = families
            .iter()
            .find(|f| f.kind == FamilyKind::Superdeterministic)
            .ok_or_else(|| Error::Degenerate("no superdeterministic family".into()))?;
        let pin = |p: Param| sd.pinned_value(p).unwrap_or(f64::NAN);
        let (z, v) = (pin(Param::Z), pin(Param::V));
        let sols = grid_search_with(s, VERDICT_RESOLUTION, tol, exec)?;
        findings.push(SettingFinding {
            setting: *s,
            ancilla_zero: s.ancilla_zero(),
            wave_d0: s.wave_d0(),
            consistent_families: families
                .iter()
                .filter(|f| !f.branches.iter().any(|b| b.is_inconsistent_behaviour()))
                .map(|f| f.kind)
                .collect(),
            superdeterministic_f: pin(Param::F),
            superdeterministic_p_b_given_lambda: [[z, 1.0 - z], [v, 1.0 - v]],
            families,
            grid_cells: sols.len(),
            unexplained_cells: unexplained(&sols),
        });
        cells.push(sols.into_iter().map(|sol| (key(&sol.params), sol.branches)).collect());
    }

    let common = |members: &[usize]| -> Vec<[usize; 5]> {
        let mut keys: BTreeSet<[usize; 5]> = cells[members[0]].keys().copied().collect();
        for &m in &members[1..] {
            keys.retain(|k| cells[m].contains_key(k));
        }
        keys.into_iter().collect()
    };
    let all: Vec<usize> = (0..settings.len()).collect();
    let common_cells = common(&all).len();

    let mut alphas: Vec<f64> = settings.iter().map(|s| s.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup_by(|a, b| (*a - *b).abs() <= DISTINCT);
    let mut shared_alpha = Vec::new();
    for alpha in alphas {
        let members: Vec<usize> = all.iter().copied().filter(|&i| (settings[i].alpha - alpha).abs() <= DISTINCT).collect();
        if distinct_count(members.iter().map(|&i| settings[i].phi)) < 2 {
            continue;
        }
        let shared = common(&members);
        let everywhere = |pred: &dyn Fn(&SolutionFamily) -> bool| {
            shared
                .iter()
                .filter(|k| {
                    members.iter().all(|&m| {
                        let p = HVParams {
                            x: grid.node(k[0]),
                            y: grid.node(k[1]),
                            z: grid.node(k[2]),
                            v: grid.node(k[3]),
                            f: grid.node(k[4]),
                        };
                        findings[m]
                            .families
                            .iter()
                            .any(|fam| pred(fam) && fam.pinned_distance(&p) <= 2.0 * grid.spacing() + 1e-12)
                    })
                })
                .count()
        };
        shared_alpha.push(SharedAlphaGroup {
            alpha,
            phis: members.iter().map(|&i| settings[i].phi).collect(),
            common_cells: shared.len(),
            y_pinned_everywhere: everywhere(&|f| f.pinned_value(Param::Y).is_some()),
            superdeterministic_everywhere: everywhere(&|f| f.kind == FamilyKind::Superdeterministic),
        });
    }

    let (best_joint_residual, best_joint_params) = minimize_joint_residual(settings, &grid, exec)?;
    let marginal_spread = spread(settings.iter().map(|s| s.ancilla_zero()));
    let joint_residual_lower_bound = marginal_spread / 4.0;
    let only_superdeterministic_consistent = findings
        .iter()
        .all(|f| f.consistent_families == [FamilyKind::Superdeterministic]);
    let no_unexplained = findings.iter().all(|f| f.unexplained_cells == 0);
    let verdict = if common_cells == 0 && only_superdeterministic_consistent && no_unexplained {
        NO_CONSISTENT_HV_MODEL
    } else {
        INCONCLUSIVE
    };

    Ok(VerdictReport {
        verdict: verdict.to_string(),
        resolution: VERDICT_RESOLUTION,
        tol,
        findings,
        marginal_spread,
        joint_residual_lower_bound,
        best_joint_residual,
        best_joint_params,
        common_cells,
        y_spread: spread(settings.iter().map(|s| s.wave_d0())),
        shared_alpha,
    })
}

fn minimize_joint_residual(settings: &[Setting], grid: &Grid, exec: Execution) -> Result<(f64, HVParams)> {
    let targets: Vec<(f64, JointDistribution)> =
        settings.iter().map(|s| (s.phi, joint_distribution(s.alpha, s.phi))).collect();
    let n = grid.steps;
    let slabs = exec.map(0..n + 1, |fi| -> Result<(f64, HVParams)> {
        let mut best = (f64::INFINITY, HVParams { x: 0.0, y: 0.0, z: 0.0, v: 0.0, f: 0.0 });
        for xi in 0..=n {
            for yi in 0..=n {
                for zi in 0..=n {
                    for vi in 0..=n {
                        let p = HVParams {
                            x: grid.node(xi),
                            y: grid.node(yi),
                            z: grid.node(zi),
                            v: grid.node(vi),
                            f: grid.node(fi),
                        };
                        let mut worst = 0.0f64;
                        for (phi, target) in &targets {
                            worst = worst.max(hv_predict(&p, *phi)?.max_abs_diff(target));
                        }
                        if worst < best.0 {
                            best = (worst, p);
                        }
                    }
                }
            }
        }
        Ok(best)
    });
    let mut best = (f64::INFINITY, HVParams { x: 0.0, y: 0.0, z: 0.0, v: 0.0, f: 0.0 });
    for slab in slabs {
        let candidate = slab?;
        if candidate.0 < best.0 {
            best = candidate;
        }
    }
    Ok(best)
}
