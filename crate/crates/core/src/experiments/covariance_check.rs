use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ensure_dir, write_json};
use crate::analytics::{analytic_covariance, covariance_from_counts, slot_counts, CovarianceEstimate, SlotPair};
use crate::arrivals::{generate_psra, DelayFamily, DelaySpec, ProcessSpec, DEFAULT_TRUNCATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::rng::{Purpose, Seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceCheckConfig {
    pub lambda: f64,
    pub gamma: f64,
    pub family: DelayFamily,
    /// Delay standard deviations in units of `1/λ`.
    pub sigmas: Vec<f64>,
    /// Slot lengths in units of `1/λ`.
    pub slot_lengths: Vec<f64>,
    /// Start of the first slot.
    pub t: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub truncation_tolerance: f64,
}

impl Default for CovarianceCheckConfig {
    fn default() -> Self {
        CovarianceCheckConfig {
            lambda: 1.0,
            gamma: 1.0,
            family: DelayFamily::Uniform,
            sigmas: vec![1.0, 2.0, 5.0],
            slot_lengths: vec![1.0, 2.0],
            t: 0.0,
            replications: 100_000,
            master_seed: 0,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRow {
    pub sigma: f64,
    pub t: f64,
    #[serde(rename = "T")]
    pub slot_length: f64,
    pub analytic: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheckResult {
    pub config: CovarianceCheckConfig,
    pub rows: Vec<CovarianceRow>,
}

impl CovarianceCheckResult {
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_json(&dir.join("covariance.json"), self)?;
        let path = dir.join("covariance.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "sigma",
            "t",
            "T",
            "analytic",
            "empirical",
            "std_error",
            "z",
            "replications",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.sigma.to_string(),
                r.t.to_string(),
                r.slot_length.to_string(),
                r.analytic.to_string(),
                r.empirical.to_string(),
                r.std_error.to_string(),
                r.z.to_string(),
                r.replications.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}

/// Analytic against simulated slot covariance on a (σ, T) grid.
pub fn run_covariance_check(cfg: &CovarianceCheckConfig) -> Result<CovarianceCheckResult> {
    if cfg.replications < 2 {
        return Err(Error::InsufficientReplications {
            needed: 2,
            got: cfg.replications,
        });
    }
    let mut rows = Vec::new();
    for &sigma in &cfg.sigmas {
        let delay = if sigma == 0.0 || cfg.family == DelayFamily::Degenerate {
            DelaySpec::degenerate()
        } else {
            DelaySpec::new(cfg.family, sigma / cfg.lambda)?
        };
        for &length in &cfg.slot_lengths {
            let slots = SlotPair::new(cfg.t, length / cfg.lambda)?;
            let spec = ProcessSpec::new(cfg.lambda, delay, cfg.gamma, slots.span())?
                .with_truncation_tolerance(cfg.truncation_tolerance);
            let analytic = analytic_covariance(&spec, &slots)?;
            let counts: Vec<(u64, u64)> = (0..cfg.replications as u64)
                .into_par_iter()
                .map(|r| {
                    generate_psra(&spec, Seed::replication(cfg.master_seed, r, Purpose::Arrivals))
                        .map(|s| slot_counts(&s, &slots))
                })
                .collect::<Result<_>>()?;
            let est: CovarianceEstimate<f64> = covariance_from_counts(&counts)?;
            rows.push(CovarianceRow {
                sigma,
                t: cfg.t,
                slot_length: length,
                analytic,
                empirical: est.estimate,
                std_error: est.std_error,
                z: est.z_score(analytic),
                replications: est.replications,
            });
        }
    }
    Ok(CovarianceCheckResult {
        config: cfg.clone(),
        rows,
    })
}
