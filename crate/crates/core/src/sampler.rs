//! Seeded click generation and goodness-of-fit checks.
//!
//! Shots are split into fixed-size batches; batch `i` of sweep point `j` draws
//! from stream `(seed, j << 32 | i)`. Totals are merged by count addition, so
//! they depend only on the configuration and seed.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::experiment::{
    bracket_extrema, build_circuit, classical_control_run, exact_distribution, ControlMode, ExperimentConfig,
    InterferencePattern, JointDistribution, PatternRow,
};
use crate::par::Execution;
use crate::rng::RandomStream;

/// Shots drawn from one random stream.
pub const BATCH_SHOTS: u64 = 1 << 16;

/// 99.9% quantiles of the chi-square distribution for 1..=3 degrees of
/// freedom (significance level 0.001).
pub const CHI2_999: [f64; 3] = [10.827566170662733, 13.815510557964274, 16.26623619623813];

/// Expected count below which cells are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickCounts {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
    pub shots: u64,
    pub seed: u64,
    pub mode: ControlMode,
}

impl ClickCounts {
    pub fn to_array(&self) -> [u64; 4] {
        [self.n00, self.n01, self.n10, self.n11]
    }

    fn from_array(n: [u64; 4], seed: u64, mode: ControlMode) -> Self {
        Self { n00: n[0], n01: n[1], n10: n[2], n11: n[3], shots: n.iter().sum(), seed, mode }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFit {
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub threshold: f64,
    pub pass: bool,
}

pub fn sample_clicks(cfg: &ExperimentConfig) -> Result<ClickCounts> {
    sample_clicks_with(cfg, Execution::default())
}

pub fn sample_clicks_with(cfg: &ExperimentConfig, exec: Execution) -> Result<ClickCounts> {
    sample_point(cfg, 0, exec)
}

fn sample_point(cfg: &ExperimentConfig, point: u32, exec: Execution) -> Result<ClickCounts> {
    cfg.validate()?;
    let batches = cfg.shots.div_ceil(BATCH_SHOTS);
    let batch_len = |i: u64| BATCH_SHOTS.min(cfg.shots - i * BATCH_SHOTS);
    let stream = |i: u64| RandomStream::new(cfg.seed, (u64::from(point) << 32) | i);

    let partials: Vec<Result<[u64; 4]>> = match cfg.control_mode {
        ControlMode::QuantumControl => {
            // multinomial draws from the exact outcome distribution
            let weights = exact_distribution(cfg)?.to_array().map(|p| p.max(0.0));
            let cells = WeightedIndex::new(weights)
                .map_err(|e| crate::Error::Config(format!("invalid outcome distribution: {e}")))?;
            exec.map(0..batches as usize, |i| {
                let mut rng = stream(i as u64);
                let mut n = [0u64; 4];
                for cell in (&cells).sample_iter(&mut rng).take(batch_len(i as u64) as usize) {
                    n[cell] += 1;
                }
                Ok(n)
            })
        }
        ControlMode::ClassicalControl => {
            // per-shot collapse through the mid-circuit measurement
            build_circuit(cfg).validate()?;
            exec.map(0..batches as usize, |i| {
                let mut rng = stream(i as u64);
                let mut n = [0u64; 4];
                for _ in 0..batch_len(i as u64) {
                    let (a, b) = classical_control_run(cfg, &mut rng)?;
                    n[2 * usize::from(a) + usize::from(b)] += 1;
                }
                Ok(n)
            })
        }
    };
    let mut total = [0u64; 4];
    for part in partials {
        for (t, n) in total.iter_mut().zip(part?) {
            *t += n;
        }
    }
    Ok(ClickCounts::from_array(total, cfg.seed, cfg.control_mode))
}

pub fn empirical_distribution(counts: &ClickCounts) -> Result<JointDistribution> {
    if counts.shots == 0 {
        return config("empirical distribution of zero shots");
    }
    let n = counts.shots as f64;
    Ok(JointDistribution::from_array(counts.to_array().map(|c| c as f64 / n)))
}

/// Pearson chi-square of `counts` against `expected` at the 0.001 level.
///
/// A positive count in a zero-probability cell fails outright. Cells whose
/// expected count is below 5 are pooled; a pool still below 5 is merged into
/// the smallest remaining cell.
pub fn goodness_of_fit(counts: &ClickCounts, expected: &JointDistribution) -> GoodnessOfFit {
    let n = counts.shots as f64;
    let observed = counts.to_array();
    let probs = expected.to_array();

    let impossible = observed.iter().zip(probs).any(|(&o, p)| p <= 1e-12 && o > 0);
    if impossible {
        return GoodnessOfFit { chi_square: f64::INFINITY, degrees_of_freedom: 0, threshold: 0.0, pass: false };
    }

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (&o, p) in observed.iter().zip(probs) {
        if p <= 1e-12 {
            continue;
        }
        let e = p * n;
        if e < MIN_EXPECTED {
            pool.0 += o as f64;
            pool.1 += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pool.1 > 0.0 {
        if pool.1 >= MIN_EXPECTED || cells.is_empty() {
            cells.push(pool);
        } else {
            let smallest = cells
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            smallest.0 += pool.0;
            smallest.1 += pool.1;
        }
    }

    let dof = cells.len().saturating_sub(1);
    let chi_square: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    if dof == 0 {
        // a single outcome carries all the mass, and it matched
        return GoodnessOfFit { chi_square, degrees_of_freedom: 0, threshold: 0.0, pass: true };
    }
    let threshold = CHI2_999[dof - 1];
    GoodnessOfFit { chi_square, degrees_of_freedom: dof, threshold, pass: chi_square < threshold }
}

/// Interference pattern estimated from clicks: intensity is the empirical
/// P(a = 0) at each φ and visibility comes from the empirical extrema.
pub fn sampled_sweep(alpha: f64, phi_grid: &[f64], shots_per_point: u64, seed: u64) -> Result<InterferencePattern> {
    sampled_sweep_with(alpha, phi_grid, shots_per_point, seed, Execution::default())
}

pub fn sampled_sweep_with(
    alpha: f64,
    phi_grid: &[f64],
    shots_per_point: u64,
    seed: u64,
    exec: Execution,
) -> Result<InterferencePattern> {
    if shots_per_point < 100 {
        return config(format!("shots per point must be at least 100, got {shots_per_point}"));
    }
    let phis = bracket_extrema(phi_grid)?;
    let point_count = u32::try_from(phis.len()).map_err(|_| crate::Error::Config("phi grid too large".into()))?;
    let rows = exec.map(0..point_count as usize, |j| -> Result<PatternRow> {
        let cfg = ExperimentConfig::new(alpha, phis[j], ControlMode::QuantumControl, shots_per_point, seed)?;
        // points run sequentially inside; the outer map carries the parallelism
        let counts = sample_point(&cfg, j as u32, Execution::Sequential)?;
        Ok(PatternRow { phi: phis[j], intensity: (counts.n00 + counts.n01) as f64 / counts.shots as f64 })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(InterferencePattern::from_rows(alpha, rows))
}
