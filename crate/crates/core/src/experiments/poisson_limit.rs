use std::cmp::Ordering;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ensure_dir, write_json};
use crate::analytics::arrival_probability;
use crate::arrivals::{generate_psra, DelayFamily, DelaySpec, Horizon, ProcessSpec, DEFAULT_TRUNCATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::rng::{Purpose, Seed};

/// Slot-count law of the pre-scheduled process compared with the Poisson
/// law of the same mean, along an increasing ladder of delay spreads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonLimitConfig {
    pub lambda: f64,
    pub gamma: f64,
    pub family: DelayFamily,
    /// Delay standard deviations in units of `1/λ`, increasing.
    pub sigmas: Vec<f64>,
    /// Slot length in units of `1/λ`.
    pub slot_length: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub truncation_tolerance: f64,
}

impl Default for PoissonLimitConfig {
    fn default() -> Self {
        PoissonLimitConfig {
            lambda: 1.0,
            gamma: 1.0,
            family: DelayFamily::Uniform,
            sigmas: vec![1.0, 5.0, 20.0, 50.0],
            slot_length: 1.0,
            replications: 100_000,
            master_seed: 0,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonLimitRow {
    pub sigma: f64,
    /// Empirical TV distance from Poisson(γλT).
    pub tv: f64,
    /// Delta-method standard error of `tv`.
    pub std_error: f64,
    /// Exact TV of the Poisson-binomial slot-count law from Poisson(γλT).
    pub analytic_tv: f64,
    pub mean_count: f64,
    /// Empirical frequency of each count `0, 1, ...`.
    pub count_frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonLimitResult {
    pub config: PoissonLimitConfig,
    pub poisson_mean: f64,
    pub rows: Vec<PoissonLimitRow>,
}

impl PoissonLimitResult {
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_json(&dir.join("poisson_limit.json"), self)?;
        let path = dir.join("poisson_limit.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["sigma", "tv", "std_error", "analytic_tv", "mean_count"])?;
        for r in &self.rows {
            w.write_record([r.sigma, r.tv, r.std_error, r.analytic_tv, r.mean_count].map(|x| x.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}

/// Poisson(μ) probabilities for `0..len`.
pub fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut p = (-mean).exp();
    for k in 0..len {
        out.push(p);
        p *= mean / (k + 1) as f64;
    }
    out
}

/// `½ Σ |pₖ - qₖ|` with `q` Poisson(mean); `p` is zero past its end.
fn tv_to_poisson(p: &[f64], mean: f64) -> f64 {
    let len = p.len().max(support_len(mean));
    let q = poisson_pmf(mean, len);
    let covered: f64 = q.iter().sum();
    let body: f64 = (0..len).map(|k| (p.get(k).copied().unwrap_or(0.0) - q[k]).abs()).sum();
    0.5 * (body + (1.0 - covered).max(0.0))
}

/// Enough terms that the Poisson tail is below double precision.
fn support_len(mean: f64) -> usize {
    (mean + 12.0 * mean.sqrt() + 40.0).ceil() as usize
}

/// Law of a sum of independent Bernoulli(pᵢ).
fn poisson_binomial(ps: &[f64]) -> Vec<f64> {
    let mut pmf = vec![1.0];
    for &p in ps.iter().filter(|&&p| p > 0.0) {
        pmf.push(0.0);
        for k in (1..pmf.len()).rev() {
            pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

pub fn run_poisson_limit(cfg: &PoissonLimitConfig) -> Result<PoissonLimitResult> {
    if cfg
        .sigmas
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
    {
        return Err(Error::param("sigmas", "sigma ladder must be strictly increasing"));
    }
    if cfg.replications < 2 {
        return Err(Error::InsufficientReplications {
            needed: 2,
            got: cfg.replications,
        });
    }
    if !(cfg.slot_length.is_finite() && cfg.slot_length > 0.0) {
        return Err(Error::param("slot_length", "must be > 0"));
    }
    let slot = Horizon::new(0.0, cfg.slot_length / cfg.lambda)?;
    let mean = cfg.gamma * cfg.lambda * slot.length();
    let mut rows = Vec::with_capacity(cfg.sigmas.len());
    for &sigma in &cfg.sigmas {
        let delay = if sigma == 0.0 || cfg.family == DelayFamily::Degenerate {
            DelaySpec::degenerate()
        } else {
            DelaySpec::new(cfg.family, sigma / cfg.lambda)?
        };
        let spec =
            ProcessSpec::new(cfg.lambda, delay, cfg.gamma, slot)?.with_truncation_tolerance(cfg.truncation_tolerance);

        let counts: Vec<usize> = (0..cfg.replications as u64)
            .into_par_iter()
            .map(|r| generate_psra(&spec, Seed::replication(cfg.master_seed, r, Purpose::Arrivals)).map(|s| s.len()))
            .collect::<Result<_>>()?;
        let n = counts.len() as f64;
        let max = counts.iter().copied().max().unwrap_or(0);
        let mut freq = vec![0.0; max + 1];
        for &c in &counts {
            freq[c] += 1.0;
        }
        freq.iter_mut().for_each(|f| *f /= n);

        let tv = tv_to_poisson(&freq, mean);
        // d TV / d p̂ₖ = ½ sign(p̂ₖ - qₖ); its variance under the empirical law.
        let q = poisson_pmf(mean, freq.len());
        let sign: Vec<f64> = freq
            .iter()
            .zip(&q)
            .map(|(p, q)| (p - q).signum() * f64::from(p != q))
            .collect();
        let m1: f64 = freq.iter().zip(&sign).map(|(p, s)| p * s).sum();
        let m2: f64 = freq.iter().zip(&sign).map(|(p, s)| p * s * s).sum();
        let std_error = 0.5 * ((m2 - m1 * m1).max(0.0) / n).sqrt();

        let (lo, hi) = spec.index_window(&slot)?;
        let ps: Vec<f64> = (lo..=hi)
            .map(|i| arrival_probability(&spec, i, slot.start, slot.end))
            .collect();
        let analytic_tv = tv_to_poisson(&poisson_binomial(&ps), mean);

        rows.push(PoissonLimitRow {
            sigma,
            tv,
            std_error,
            analytic_tv,
            mean_count: counts.iter().sum::<usize>() as f64 / n,
            count_frequencies: freq,
        });
    }
    Ok(PoissonLimitResult {
        config: cfg.clone(),
        poisson_mean: mean,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_at_one_against_poisson_one() {
        // ½(|1 - e⁻¹| + (1 - e⁻¹)) = 1 - e⁻¹
        let tv = tv_to_poisson(&[0.0, 1.0], 1.0);
        assert!((tv - (1.0 - (-1f64).exp())).abs() < 1e-14);
        assert!((tv - 0.632_120_558_828_557_7).abs() < 1e-14);
    }

    #[test]
    fn poisson_binomial_matches_enumeration() {
        let ps = [0.2, 0.5, 0.9];
        let pmf = poisson_binomial(&ps);
        let mut brute = [0.0; 4];
        for mask in 0..8u32 {
            let mut prob = 1.0;
            for (k, p) in ps.iter().enumerate() {
                prob *= if mask & (1 << k) != 0 { *p } else { 1.0 - p };
            }
            brute[mask.count_ones() as usize] += prob;
        }
        for k in 0..4 {
            assert!((pmf[k] - brute[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_schedule_row() {
        let cfg = PoissonLimitConfig {
            sigmas: vec![0.0],
            replications: 100,
            ..PoissonLimitConfig::default()
        };
        let r = run_poisson_limit(&cfg).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.count_frequencies, vec![0.0, 1.0]);
        assert!((row.tv - 0.632_120_558_828_557_7).abs() < 1e-12);
        assert!((row.analytic_tv - row.tv).abs() < 1e-12);
    }

    #[test]
    fn ladder_must_increase() {
        let cfg = PoissonLimitConfig {
            sigmas: vec![5.0, 1.0],
            ..PoissonLimitConfig::default()
        };
        assert!(run_poisson_limit(&cfg).is_err());
    }
}
