//! Exhaustive grid search over [0,1]^5 for the hidden-variable parameters.
//!
//! Each grid node owns the cell of half-width h/2 around it (clipped to the
//! unit cube), so the cells cover the whole parameter space. A cell is kept
//! when interval enclosures of e1, e2 and e3 over it all reach within `tol`
//! of zero; every exact solution therefore lies in some kept cell. The loop
//! nest exploits that e3 involves only (f, v, z), e1 only (f, v, x) and e2
//! only (f, z, y), which prunes without skipping any cell.

use super::interval::Interval;
use super::{enumerate_branches, residual, Branch, HVParams, HVSolution, Setting, SolutionFamily, ANALYTIC_TOL};
use crate::error::{config, Result};
use crate::par::Execution;

pub const GRID_RESOLUTIONS: [f64; 3] = [0.05, 0.02, 0.01];

/// Slack on the cell enclosures; covers floating-point rounding only.
pub const DEFAULT_CELL_TOL: f64 = 1e-12;

/// Families within this many grid spacings (max-norm on pinned coordinates)
/// claim a grid point.
pub const CLASSIFY_SPACINGS: f64 = 2.0;

pub(crate) struct Grid {
    pub steps: usize,
}

impl Grid {
    pub fn for_resolution(resolution: f64) -> Result<Self> {
        match GRID_RESOLUTIONS.iter().find(|r| (*r - resolution).abs() < 1e-12) {
            Some(r) => Ok(Self { steps: (1.0 / r).round() as usize }),
            None => config(format!("resolution {resolution} not one of {GRID_RESOLUTIONS:?}")),
        }
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.steps as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 / self.steps as f64
    }

    pub fn cell(&self, k: usize) -> Interval {
        let half = 0.5 * self.spacing();
        let x = self.node(k);
        Interval::new((x - half).max(0.0), (x + half).min(1.0))
    }
}

/// Branch tags of every enumerated family whose pinned coordinates lie
/// within two grid spacings of `params`; `[Infeasible]` when none does.
pub fn classify(params: &HVParams, setting: &Setting, spacing: f64) -> Result<Vec<Branch>> {
    let families = enumerate_branches(setting, ANALYTIC_TOL)?;
    Ok(classify_against(&families, params, spacing))
}

fn classify_against(families: &[SolutionFamily], params: &HVParams, spacing: f64) -> Vec<Branch> {
    let reach = CLASSIFY_SPACINGS * spacing + 1e-12;
    let mut tags: Vec<Branch> = families
        .iter()
        .filter(|f| f.pinned_distance(params) <= reach)
        .flat_map(|f| f.branches.iter().copied())
        .collect();
    tags.sort();
    tags.dedup();
    if tags.is_empty() {
        tags.push(Branch::Infeasible);
    }
    tags
}

/// Grid cells that may contain a solution at `setting`, each classified.
/// Sorted by residual, then lexicographically by (x, y, z, v, f).
pub fn grid_search(setting: &Setting, resolution: f64, tol: f64) -> Result<Vec<HVSolution>> {
    grid_search_with(setting, resolution, tol, Execution::default())
}

pub fn grid_search_with(setting: &Setting, resolution: f64, tol: f64, exec: Execution) -> Result<Vec<HVSolution>> {
    let grid = Grid::for_resolution(resolution)?;
    if !(tol >= 0.0) {
        return config("tolerance must be non-negative");
    }
    let families = enumerate_branches(setting, ANALYTIC_TOL)?;
    let marginal = Interval::point(setting.ancilla_zero());
    let half = Interval::point(0.5);
    let wave_d0 = Interval::point(setting.wave_d0());
    let one = Interval::point(1.0);
    let n = grid.steps;

    let slabs = exec.map(0..n + 1, |fi| -> Result<Vec<HVSolution>> {
        let mut out = Vec::new();
        let f = grid.cell(fi);
        let rest = one - f;
        for vi in 0..=n {
            let v_rest = grid.cell(vi) * rest;
            for zi in 0..=n {
                let z = grid.cell(zi);
                let e3 = (z * f).add(v_rest) - marginal;
                if e3.gap_to_zero() > tol {
                    continue;
                }
                let xs: Vec<(usize, f64)> = (0..=n)
                    .map(|xi| (xi, (v_rest * (grid.cell(xi) - half)).gap_to_zero()))
                    .filter(|(_, gap)| *gap <= tol)
                    .collect();
                if xs.is_empty() {
                    continue;
                }
                let f_open = f * (one - z);
                let ys: Vec<(usize, f64)> = (0..=n)
                    .map(|yi| (yi, (f_open * (grid.cell(yi) - wave_d0)).gap_to_zero()))
                    .filter(|(_, gap)| *gap <= tol)
                    .collect();
                for &(xi, gap1) in &xs {
                    for &(yi, gap2) in &ys {
                        let params = HVParams {
                            x: grid.node(xi),
                            y: grid.node(yi),
                            z: grid.node(zi),
                            v: grid.node(vi),
                            f: grid.node(fi),
                        };
                        out.push(HVSolution {
                            params,
                            residual: gap1.max(gap2).max(e3.gap_to_zero()),
                            point_residual: residual(&params, std::slice::from_ref(setting))?,
                            branches: classify_against(&families, &params, grid.spacing()),
                        });
                    }
                }
            }
        }
        Ok(out)
    });

    let mut all = Vec::new();
    for slab in slabs {
        all.extend(slab?);
    }
    all.sort_by(|a, b| {
        a.residual.total_cmp(&b.residual).then_with(|| {
            a.params
                .to_array()
                .iter()
                .zip(b.params.to_array())
                .map(|(p, q)| p.total_cmp(&q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(all)
}

/// Number of solutions no enumerated family accounts for.
pub fn unexplained(solutions: &[HVSolution]) -> usize {
    solutions.iter().filter(|s| s.branches.contains(&Branch::Infeasible)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::constraint_equations;
    use std::collections::BTreeSet;

    fn key(p: &HVParams, n: usize) -> [usize; 5] {
        p.to_array().map(|v| (v * n as f64).round() as usize)
    }

    /// Oracle: visit every 5-D cell without pruning.
    fn naive_cells(setting: &Setting, grid: &Grid, tol: f64) -> BTreeSet<[usize; 5]> {
        let n = grid.steps;
        let (c, w) = (Interval::point(setting.ancilla_zero()), Interval::point(setting.wave_d0()));
        let (one, half) = (Interval::point(1.0), Interval::point(0.5));
        let mut keep = BTreeSet::new();
        for xi in 0..=n {
            for yi in 0..=n {
                for zi in 0..=n {
                    for vi in 0..=n {
                        for fi in 0..=n {
                            let (x, y, z, v, f) = (grid.cell(xi), grid.cell(yi), grid.cell(zi), grid.cell(vi), grid.cell(fi));
                            let e1 = v * (one - f) * (x - half);
                            let e2 = f * (one - z) * (y - w);
                            let e3 = (z * f).add(v * (one - f)) - c;
                            if [e1, e2, e3].iter().all(|e| e.gap_to_zero() <= tol) {
                                keep.insert([xi, yi, zi, vi, fi]);
                            }
                        }
                    }
                }
            }
        }
        keep
    }

    #[test]
    fn pruned_search_matches_naive_sweep() {
        let s = Setting::new(0.3, 0.7).unwrap();
        let grid = Grid::for_resolution(0.05).unwrap();
        let found: BTreeSet<_> = grid_search(&s, 0.05, DEFAULT_CELL_TOL)
            .unwrap()
            .iter()
            .map(|sol| key(&sol.params, grid.steps))
            .collect();
        assert_eq!(found, naive_cells(&s, &grid, DEFAULT_CELL_TOL));
        assert!(!found.is_empty());
    }

    #[test]
    fn no_unexplained_points_at_coarse_resolution() {
        let s = Setting::new(0.3, 0.7).unwrap();
        let sols = grid_search(&s, 0.05, DEFAULT_CELL_TOL).unwrap();
        assert_eq!(unexplained(&sols), 0);
        assert!(sols.iter().all(|sol| sol.residual <= DEFAULT_CELL_TOL));
        for tag in [Branch::WaveActsAsParticle, Branch::ParticleActsAsWave, Branch::Superdeterministic] {
            assert!(sols.iter().any(|sol| sol.branches.contains(&tag)), "{tag:?}");
        }
    }

    #[test]
    fn snapped_inconsistent_point_is_found() {
        let s = Setting::new(0.3, 0.7).unwrap();
        let grid = Grid::for_resolution(0.05).unwrap();
        let n = grid.steps;
        let sols = grid_search(&s, 0.05, DEFAULT_CELL_TOL).unwrap();
        // x = ½, y snapped to cos²(φ/2), z = 1, and (v, f) on the grid solving e3 best
        let yi = (s.wave_d0() * n as f64).round() as usize;
        let found = sols.iter().any(|sol| {
            let k = key(&sol.params, n);
            k[0] == n / 2 && k[1] == yi && k[2] == n
        });
        assert!(found);
        assert!(n % 2 == 0);
    }

    #[test]
    fn exact_solutions_fall_in_kept_cells() {
        let s = Setting::new(0.9, 2.1).unwrap();
        let grid = Grid::for_resolution(0.05).unwrap();
        let kept: BTreeSet<_> = grid_search(&s, 0.05, DEFAULT_CELL_TOL)
            .unwrap()
            .iter()
            .map(|sol| key(&sol.params, grid.steps))
            .collect();
        for fam in enumerate_branches(&s, ANALYTIC_TOL).unwrap() {
            for u in [[0.1, 0.2], [0.5, 0.5], [0.93, 0.41]] {
                let p = fam.member(&s, u).unwrap();
                assert!(constraint_equations(&p, &s).iter().all(|e| e.abs() < 1e-12));
                assert!(kept.contains(&key(&p, grid.steps)), "{:?} {p:?}", fam.kind);
            }
        }
    }

    #[test]
    fn rejects_unlisted_resolution() {
        let s = Setting::new(0.3, 0.7).unwrap();
        assert!(grid_search(&s, 0.03, DEFAULT_CELL_TOL).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let s = Setting::new(1.0, 1.2).unwrap();
        let a = grid_search_with(&s, 0.05, DEFAULT_CELL_TOL, Execution::Sequential).unwrap();
        let b = grid_search(&s, 0.05, DEFAULT_CELL_TOL).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn classify_examples() {
        let s = Setting::new(0.3, 0.7).unwrap();
        let sd = HVParams::new(0.9, 0.1, 1.0, 0.0, s.ancilla_zero()).unwrap();
        assert_eq!(classify(&sd, &s, 0.02).unwrap(), vec![Branch::Superdeterministic]);
        let far = HVParams::new(0.0, 0.0, 0.5, 0.5, 0.5).unwrap();
        assert_eq!(classify(&far, &s, 0.02).unwrap(), vec![Branch::Infeasible]);
    }
}
