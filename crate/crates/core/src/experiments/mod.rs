//! Reference experiments: the model grid, the delay-law robustness sweep,
//! the Poisson-limit diagnostic and the covariance check.
//!
//! Every experiment is a pure function of its config: replications draw from
//! [`Seed::replication`] substreams, run in parallel, and are reduced in
//! replication order, so repeated runs produce identical results.

mod covariance_check;
mod grid;
mod poisson_limit;
mod robustness;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use covariance_check::{run_covariance_check, CovarianceCheckConfig, CovarianceCheckResult, CovarianceRow};
pub use grid::{heathrow_models, run_model_grid, run_single, GridResult, ModelResult, HEATHROW_REFERENCE_DISTANCES};
pub use poisson_limit::{poisson_pmf, run_poisson_limit, PoissonLimitConfig, PoissonLimitResult, PoissonLimitRow};
pub use robustness::{run_robustness, RobustnessConfig, RobustnessResult};

use crate::arrivals::{
    generate_poisson, generate_psra, ArrivalStream, DelayFamily, DelaySpec, Horizon, ProcessSpec,
    DEFAULT_TRUNCATION_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::queueing::{
    queue_length_histogram, simulate_queue, wait_histogram, Histogram, ServiceSpec, Warmup, DEFAULT_SPREAD_RATIO,
};
use crate::rng::{Purpose, Seed};

/// Heathrow traffic intensity, 40 arrivals per hour against 41 landings.
pub const HEATHROW_RHO: f64 = 40.0 / 41.0;

/// Batches per replication for the batch-means standard error.
const BATCHES: usize = 20;

/// How a target intensity `ρ` is realized for pre-scheduled arrivals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Schedule at the service rate `λ` and keep each customer with
    /// probability `γ = ρ`.
    #[default]
    Thinned,
    /// Schedule at rate `ρλ` with no cancellations.
    Unthinned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum ArrivalModel {
    /// Poisson arrivals at rate `ρλ`.
    Poisson,
    /// Pre-scheduled arrivals; `sigma` is in units of `1/λ`.
    Psra { family: DelayFamily, sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub arrivals: ArrivalModel,
    pub service: ServiceSpec<f64>,
}

fn default_rho() -> f64 {
    HEATHROW_RHO
}
fn default_one() -> f64 {
    1.0
}
fn default_replications() -> usize {
    1
}
fn default_customers() -> usize {
    1_000_000
}
fn default_bin_width() -> f64 {
    crate::queueing::DEFAULT_BIN_WIDTH
}
fn default_tolerance() -> f64 {
    DEFAULT_TRUNCATION_TOLERANCE
}

/// Shared settings of the queue experiments. Time is measured in units where
/// the capacity rate is `lambda` (the default 1 makes the unit one service
/// time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "heathrow_models")]
    pub models: Vec<ModelSpec>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_one")]
    pub lambda: f64,
    #[serde(default)]
    pub regime: Regime,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_customers")]
    pub customers_per_replication: usize,
    /// Customers discarded per replication; `None` applies [`Warmup::for_load`].
    #[serde(default)]
    pub warmup_customers: Option<usize>,
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_tolerance")]
    pub truncation_tolerance: f64,
    /// Where results go. Not serialized, so result files do not depend on
    /// their own location.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<std::path::PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            models: heathrow_models(),
            rho: HEATHROW_RHO,
            lambda: 1.0,
            regime: Regime::Thinned,
            replications: 1,
            customers_per_replication: 1_000_000,
            warmup_customers: None,
            bin_width: crate::queueing::DEFAULT_BIN_WIDTH,
            master_seed: 0,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::param("rho", format!("must lie in (0, 1], got {}", self.rho)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::param("lambda", format!("must be > 0, got {}", self.lambda)));
        }
        if self.replications < 1 {
            return Err(Error::param("replications", "must be >= 1"));
        }
        if self.customers_per_replication < 1 {
            return Err(Error::param("customers_per_replication", "must be >= 1"));
        }
        if !(self.bin_width.is_finite() && self.bin_width > 0.0) {
            return Err(Error::param(
                "bin_width",
                format!("must be > 0, got {}", self.bin_width),
            ));
        }
        for m in &self.models {
            m.service.validate()?;
            let spec = self.process_spec(m, Horizon { start: 0.0, end: 1.0 })?;
            if let Some(spec) = spec {
                spec.delay.tail_bound(spec.truncation_tolerance)?;
            }
        }
        let mut names: Vec<&str> = self.models.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("models", "model names must be unique"));
        }
        Ok(())
    }

    pub fn warmup(&self) -> usize {
        match self.warmup_customers {
            Some(n) => n,
            None => match Warmup::<f64>::for_load(self.rho) {
                Warmup::Customers(n) => n,
                _ => unreachable!(),
            },
        }
    }

    /// Retained arrival rate of every model, `ρλ`.
    pub fn arrival_rate(&self) -> f64 {
        self.rho * self.lambda
    }

    /// Pre-scheduled process for `model` on `horizon`; `None` for Poisson.
    pub fn process_spec(&self, model: &ModelSpec, horizon: Horizon<f64>) -> Result<Option<ProcessSpec<f64>>> {
        let ArrivalModel::Psra { family, sigma } = model.arrivals else {
            return Ok(None);
        };
        let delay = if family == DelayFamily::Degenerate || sigma == 0.0 {
            DelaySpec::degenerate()
        } else {
            DelaySpec::new(family, sigma / self.lambda)?
        };
        let (lambda, gamma) = match self.regime {
            Regime::Thinned => (self.lambda, self.rho),
            Regime::Unthinned => (self.rho * self.lambda, 1.0),
        };
        Ok(Some(
            ProcessSpec::new(lambda, delay, gamma, horizon)?.with_truncation_tolerance(self.truncation_tolerance),
        ))
    }

    /// Modelling choices that are not fixed by the model list, recorded in
    /// every result file.
    pub fn settings(&self) -> ResolvedSettings {
        ResolvedSettings::new(self.warmup(), self.bin_width, self.truncation_tolerance, self.regime)
    }
}

/// Resolved modelling conventions embedded in result files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSettings {
    pub warmup_customers: usize,
    pub warmup_rule: String,
    pub bin_width: f64,
    pub truncation_tolerance: f64,
    pub index_window: String,
    pub horizon_convention: String,
    pub tie_order: String,
    pub triangular_closure: String,
    pub default_spread_ratio: f64,
    pub regime: Regime,
    pub delay_laws: String,
    pub initial_condition: String,
}

impl ResolvedSettings {
    pub fn new(warmup_customers: usize, bin_width: f64, truncation_tolerance: f64, regime: Regime) -> Self {
        ResolvedSettings {
            warmup_customers,
            warmup_rule: "max(1e5, 10/(1-rho)^2) customers unless overridden".into(),
            bin_width,
            truncation_tolerance,
            index_window: "i/lambda in [start - B, end + B], B = support half-width or tail quantile at the tolerance".into(),
            horizon_convention: "(start, end]".into(),
            tie_order: "scheduled index ascending".into(),
            triangular_closure: "(a + mode + b)/3 = mean, b - mode = spread_ratio * (mode - a)".into(),
            default_spread_ratio: DEFAULT_SPREAD_RATIO,
            regime,
            delay_laws: "uniform [-s*sqrt3, s*sqrt3]; triangular [-s*sqrt6, s*sqrt6] mode 0; normal(0, s^2); exponential E - s, E ~ Exp(mean s)".into(),
            initial_condition: "empty system at the first arrival".into(),
        }
    }
}

/// Reduced output of one simulated replication of one model.
#[derive(Debug, Clone)]
pub(crate) struct Replication {
    pub waits: Histogram<f64>,
    pub lengths: Histogram<f64>,
    pub batch_means: Vec<f64>,
    pub wait_sum: f64,
    pub customers: usize,
}

/// Draws at least `needed` arrivals starting from time 0 and keeps the first
/// `needed`.
pub(crate) fn arrival_prefix(
    cfg: &ExperimentConfig,
    model: &ModelSpec,
    needed: usize,
    seed: Seed,
) -> Result<ArrivalStream<f64>> {
    let rate = cfg.arrival_rate();
    let n = needed as f64;
    let mut length = (n + 6.0 * n.sqrt() + 32.0) / rate;
    loop {
        let horizon = Horizon::new(0.0, length)?;
        let mut stream = match cfg.process_spec(model, horizon)? {
            Some(spec) => generate_psra(&spec, seed)?,
            None => generate_poisson(rate, horizon, seed)?,
        };
        if stream.len() >= needed {
            stream.truncate(needed);
            return Ok(stream);
        }
        length *= 1.5;
    }
}

/// Arrival stream of one replication of `model`: warm-up plus measured
/// customers, from the replication's arrival substream.
pub fn replication_arrivals(cfg: &ExperimentConfig, model: &ModelSpec, replication: u64) -> Result<ArrivalStream<f64>> {
    let needed = cfg.warmup() + cfg.customers_per_replication;
    arrival_prefix(
        cfg,
        model,
        needed,
        Seed::replication(cfg.master_seed, replication, Purpose::Arrivals),
    )
}

pub(crate) fn simulate_replication(
    cfg: &ExperimentConfig,
    model: &ModelSpec,
    replication: u64,
) -> Result<(Replication, crate::queueing::QueueTrace<f64>)> {
    let warmup = cfg.warmup();
    let arrivals = replication_arrivals(cfg, model, replication)?;
    let trace = simulate_queue(
        &arrivals,
        &model.service,
        Warmup::Customers(warmup),
        Seed::replication(cfg.master_seed, replication, Purpose::Service),
    )?;
    let waits = wait_histogram(&trace, cfg.bin_width)?;
    let lengths = queue_length_histogram(&trace)?;
    let steady = trace.steady();
    let batch = (steady.len() / BATCHES).max(1);
    let batch_means = steady
        .chunks(batch)
        .filter(|c| c.len() == batch)
        .map(|c| c.iter().map(|r| r.wait).sum::<f64>() / c.len() as f64)
        .collect();
    let wait_sum = steady.iter().map(|r| r.wait).sum();
    Ok((
        Replication {
            waits,
            lengths,
            batch_means,
            wait_sum,
            customers: steady.len(),
        },
        trace,
    ))
}

/// Runs every (model, replication) pair in parallel and reduces each model's
/// replications in order.
pub(crate) fn simulate_models(cfg: &ExperimentConfig) -> Result<Vec<ModelResult>> {
    let jobs: Vec<(usize, u64)> = (0..cfg.models.len())
        .flat_map(|m| (0..cfg.replications as u64).map(move |r| (m, r)))
        .collect();
    let mut outcomes: Vec<Replication> = jobs
        .par_iter()
        .map(|&(m, r)| simulate_replication(cfg, &cfg.models[m], r).map(|(rep, _)| rep))
        .collect::<Result<_>>()?;
    let mut models = Vec::with_capacity(cfg.models.len());
    for model in cfg.models.iter().rev() {
        let reps = outcomes.split_off(outcomes.len() - cfg.replications);
        models.push(ModelResult::reduce(cfg, model, reps)?);
    }
    models.reverse();
    Ok(models)
}

/// Mean and standard error of a sample (n - 1 normalization).
pub(crate) fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Symmetric matrix of `f` over all pairs, zero diagonal.
pub(crate) fn pairwise<T>(items: &[T], f: impl Fn(&T, &T) -> Result<f64>) -> Result<Vec<Vec<f64>>> {
    let n = items.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = f(&items[i], &items[j])?;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(m)
}

pub(crate) fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub(crate) fn ensure_dir(dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}
