//! Paired-seed comparison of two scoring paths.
//!
//! Run `i` of both paths uses the same seed, so initial populations and every
//! genetic-operator draw coincide; only the arithmetic of the scorer differs.

use crate::error::{Error, Result};

use super::instance::LigandInstance;
use super::scoring::Scorer;
use super::search::{lga_run, DockResult, LgaSettings};

/// Seed of paired run `i`.
pub fn run_seed(base_seed: u64, i: usize) -> u64 {
    base_seed.wrapping_add(i as u64)
}

/// Distribution of best energies over a set of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Share of runs whose best pose came from a non-converged local search.
    pub nonconverged_fraction: f64,
    pub mean_evaluations: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl EnergySummary {
    pub fn from_results(results: &[DockResult]) -> EnergySummary {
        assert!(!results.is_empty());
        let mut e: Vec<f64> = results.iter().map(|r| r.best_energy).collect();
        e.sort_by(f64::total_cmp);
        let n = results.len() as f64;
        EnergySummary {
            min: e[0],
            q1: quantile(&e, 0.25),
            median: quantile(&e, 0.5),
            q3: quantile(&e, 0.75),
            max: e[e.len() - 1],
            mean: e.iter().sum::<f64>() / n,
            nonconverged_fraction: results.iter().filter(|r| !r.converged).count() as f64 / n,
            mean_evaluations: results.iter().map(|r| r.evaluations as f64).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub n_runs: usize,
    pub base_seed: u64,
    pub reference: EnergySummary,
    pub candidate: EnergySummary,
    /// `|mean(candidate) - mean(reference)|`.
    pub abs_diff_of_means: f64,
    /// `abs_diff_of_means / |mean(reference)|`.
    pub relative_error: f64,
    /// Mean over runs of `|E_candidate - E_reference|` for the same seed.
    pub mean_paired_abs_diff: f64,
    pub reference_runs: Vec<DockResult>,
    pub candidate_runs: Vec<DockResult>,
}

pub fn validate_pair(
    inst: &LigandInstance,
    n_runs: usize,
    base_seed: u64,
    settings: &LgaSettings,
    reference: &Scorer,
    candidate: &Scorer,
) -> Result<ValidationReport> {
    if n_runs == 0 {
        return Err(Error::Config("validation needs at least one run".into()));
    }
    let mut reference_runs = Vec::with_capacity(n_runs);
    let mut candidate_runs = Vec::with_capacity(n_runs);
    for i in 0..n_runs {
        let seed = run_seed(base_seed, i);
        reference_runs.push(lga_run(inst, settings, reference, seed)?);
        candidate_runs.push(lga_run(inst, settings, candidate, seed)?);
    }

    let ref_summary = EnergySummary::from_results(&reference_runs);
    let cand_summary = EnergySummary::from_results(&candidate_runs);
    let abs_diff_of_means = (cand_summary.mean - ref_summary.mean).abs();
    let relative_error = if abs_diff_of_means == 0.0 {
        0.0
    } else {
        abs_diff_of_means / ref_summary.mean.abs()
    };
    let mean_paired_abs_diff = reference_runs
        .iter()
        .zip(&candidate_runs)
        .map(|(r, c)| (c.best_energy - r.best_energy).abs())
        .sum::<f64>()
        / n_runs as f64;

    Ok(ValidationReport {
        n_runs,
        base_seed,
        reference: ref_summary,
        candidate: cand_summary,
        abs_diff_of_means,
        relative_error,
        mean_paired_abs_diff,
        reference_runs,
        candidate_runs,
    })
}
