use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ensure_dir, mean_and_std_error, pairwise, simulate_models, simulate_replication, write_json, ArrivalModel,
    ExperimentConfig, ModelSpec, Replication, ResolvedSettings,
};
use crate::analytics::{common_grid, hellinger, total_variation, DistanceReport};
use crate::arrivals::DelayFamily;
use crate::error::{Error, Result};
use crate::queueing::{EmpiricalDistribution, QueueTrace, ServiceSpec};

/// Distances (TV, Hellinger) of the four default models from the Heathrow
/// July 2010 queue-time sample. The sample is not public, so these are
/// reference points rather than test targets.
pub const HEATHROW_REFERENCE_DISTANCES: [(&str, f64, f64); 4] = [
    ("md1", 0.41067, 0.43903),
    ("psra_uniform_s20", 0.07516, 0.08133),
    ("psra_uniform_s30", 0.03938, 0.04565),
    ("psra_uniform_s20_triangular", 0.05723, 0.05814),
];

/// M/D/1, uniform delays with σ = 20/λ and 30/λ, and σ = 20/λ with
/// triangular service of mean 1/λ and mode 0.8/λ. Service times assume λ = 1.
pub fn heathrow_models() -> Vec<ModelSpec> {
    let det = ServiceSpec::deterministic(1.0);
    let psra = |sigma| ArrivalModel::Psra {
        family: DelayFamily::Uniform,
        sigma,
    };
    vec![
        ModelSpec {
            name: "md1".into(),
            arrivals: ArrivalModel::Poisson,
            service: det,
        },
        ModelSpec {
            name: "psra_uniform_s20".into(),
            arrivals: psra(20.0),
            service: det,
        },
        ModelSpec {
            name: "psra_uniform_s30".into(),
            arrivals: psra(30.0),
            service: det,
        },
        ModelSpec {
            name: "psra_uniform_s20_triangular".into(),
            arrivals: psra(20.0),
            service: ServiceSpec::triangular(1.0, 0.8),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub model: ModelSpec,
    /// Post-warm-up waits in time units (service times when λ = 1).
    pub wait_distribution: EmpiricalDistribution<f64>,
    /// Customers found ahead on arrival, unit bins.
    pub queue_length_distribution: EmpiricalDistribution<f64>,
    pub mean_wait: f64,
    /// Batch-means standard error of `mean_wait`.
    pub mean_wait_std_error: f64,
    pub customers: usize,
    /// Pollaczek-Khinchine mean wait, for Poisson arrivals with deterministic service.
    pub pk_mean_wait: Option<f64>,
}

impl ModelResult {
    pub(crate) fn reduce(cfg: &ExperimentConfig, model: &ModelSpec, reps: Vec<Replication>) -> Result<Self> {
        let mut iter = reps.into_iter();
        let first = iter.next().ok_or_else(|| Error::NoData("no replications".into()))?;
        let (mut waits, mut lengths) = (first.waits, first.lengths);
        let mut batch_means = first.batch_means;
        let mut wait_sum = first.wait_sum;
        let mut customers = first.customers;
        for rep in iter {
            waits.merge(&rep.waits)?;
            lengths.merge(&rep.lengths)?;
            batch_means.extend(rep.batch_means);
            wait_sum += rep.wait_sum;
            customers += rep.customers;
        }
        let (_, se) = mean_and_std_error(&batch_means);
        let pk_mean_wait = match (model.arrivals, model.service) {
            (ArrivalModel::Poisson, ServiceSpec::Deterministic { mean }) => {
                let rho = cfg.arrival_rate() * mean;
                (rho < 1.0).then(|| rho * mean / (2.0 * (1.0 - rho)))
            }
            _ => None,
        };
        Ok(ModelResult {
            model: model.clone(),
            wait_distribution: waits.to_distribution()?,
            queue_length_distribution: lengths.to_distribution()?,
            mean_wait: wait_sum / customers as f64,
            mean_wait_std_error: se,
            customers,
            pk_mean_wait,
        })
    }

    fn file_stem(&self) -> String {
        self.model
            .name
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub config: ExperimentConfig,
    pub settings: ResolvedSettings,
    pub models: Vec<ModelResult>,
    /// Model names, indexing the pairwise matrices.
    pub names: Vec<String>,
    pub pairwise_tv: Vec<Vec<f64>>,
    pub pairwise_hellinger: Vec<Vec<f64>>,
    /// Distances of each model's wait distribution from the reference, when one
    /// was supplied.
    pub reference_distances: Option<Vec<DistanceReport>>,
    pub reference_observable: Option<String>,
}

fn check_reference(cfg: &ExperimentConfig, reference: &EmpiricalDistribution<f64>) -> Result<()> {
    match reference.uniform_width() {
        Some(w) if (w - cfg.bin_width).abs() <= 1e-9 * cfg.bin_width => Ok(()),
        Some(w) => Err(Error::GridMismatch(format!(
            "reference bin width {w} differs from the configured bin width {}",
            cfg.bin_width
        ))),
        None => Err(Error::GridMismatch(
            "reference must use a uniform grid starting at 0".into(),
        )),
    }
}

/// Simulates every model of the grid and compares them with each other and,
/// if given, with `reference`.
pub fn run_model_grid(cfg: &ExperimentConfig, reference: Option<&EmpiricalDistribution<f64>>) -> Result<GridResult> {
    cfg.validate()?;
    if let Some(r) = reference {
        check_reference(cfg, r)?;
    }
    let models = simulate_models(cfg)?;

    let waits: Vec<&EmpiricalDistribution<f64>> = models.iter().map(|m| &m.wait_distribution).collect();
    let pairwise_tv = pairwise(&waits, |a, b| {
        let (p, q) = common_grid(a, b)?;
        total_variation(&p, &q)
    })?;
    let pairwise_hellinger = pairwise(&waits, |a, b| {
        let (p, q) = common_grid(a, b)?;
        hellinger(&p, &q)
    })?;
    let reference_distances = reference
        .map(|r| {
            models
                .iter()
                .map(|m| DistanceReport::compare(m.model.name.clone(), &m.wait_distribution, r))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok(GridResult {
        config: cfg.clone(),
        settings: cfg.settings(),
        names: models.iter().map(|m| m.model.name.clone()).collect(),
        models,
        pairwise_tv,
        pairwise_hellinger,
        reference_observable: reference.map(|_| "wait".to_string()),
        reference_distances,
    })
}

impl GridResult {
    pub fn model(&self, name: &str) -> Option<&ModelResult> {
        self.models.iter().find(|m| m.model.name == name)
    }

    /// `grid.json` plus per-model `<name>.wait.{csv,json}` and
    /// `<name>.queue_length.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_json(&dir.join("grid.json"), self)?;
        for m in &self.models {
            let stem = m.file_stem();
            m.wait_distribution.save_csv(&dir.join(format!("{stem}.wait.csv")))?;
            m.wait_distribution.save_json(&dir.join(format!("{stem}.wait.json")))?;
            m.queue_length_distribution
                .save_csv(&dir.join(format!("{stem}.queue_length.csv")))?;
        }
        if let Some(reports) = &self.reference_distances {
            write_json(&dir.join("distances.json"), reports)?;
        }
        Ok(())
    }
}

/// One model: the aggregate result and the trace of replication 0.
pub fn run_single(cfg: &ExperimentConfig, model: &ModelSpec) -> Result<(ModelResult, QueueTrace<f64>)> {
    cfg.validate()?;
    let mut reps: Vec<(Replication, Option<QueueTrace<f64>>)> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|r| simulate_replication(cfg, model, r).map(|(rep, trace)| (rep, (r == 0).then_some(trace))))
        .collect::<Result<_>>()?;
    let trace = reps[0].1.take().expect("replication 0 keeps its trace");
    let result = ModelResult::reduce(cfg, model, reps.into_iter().map(|(rep, _)| rep).collect())?;
    Ok((result, trace))
}
