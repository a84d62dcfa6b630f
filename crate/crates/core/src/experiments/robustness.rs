use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    ensure_dir, pairwise, simulate_models, write_json, ArrivalModel, ExperimentConfig, ModelResult, ModelSpec, Regime,
    ResolvedSettings, HEATHROW_RHO,
};
use crate::analytics::{common_grid, hellinger, total_variation};
use crate::arrivals::{DelayFamily, DEFAULT_TRUNCATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::queueing::ServiceSpec;

fn default_families() -> Vec<DelayFamily> {
    DelayFamily::RANDOM.to_vec()
}

/// Same process and seeds for every delay family; only the law of the
/// delays changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustnessConfig {
    #[serde(default = "default_families")]
    pub families: Vec<DelayFamily>,
    /// Delay standard deviation in units of `1/λ`.
    pub sigma: f64,
    pub rho: f64,
    pub lambda: f64,
    pub regime: Regime,
    pub service: ServiceSpec<f64>,
    pub replications: usize,
    pub customers_per_replication: usize,
    pub warmup_customers: Option<usize>,
    pub bin_width: f64,
    pub master_seed: u64,
    pub truncation_tolerance: f64,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            families: default_families(),
            sigma: 20.0,
            rho: HEATHROW_RHO,
            lambda: 1.0,
            regime: Regime::Thinned,
            service: ServiceSpec::deterministic(1.0),
            replications: 1,
            customers_per_replication: 1_000_000,
            warmup_customers: None,
            bin_width: 1.0,
            master_seed: 0,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
        }
    }
}

impl RobustnessConfig {
    fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            models: self
                .families
                .iter()
                .map(|&family| ModelSpec {
                    name: family.name().to_string(),
                    arrivals: ArrivalModel::Psra {
                        family,
                        sigma: self.sigma,
                    },
                    service: self.service,
                })
                .collect(),
            rho: self.rho,
            lambda: self.lambda,
            regime: self.regime,
            replications: self.replications,
            customers_per_replication: self.customers_per_replication,
            warmup_customers: self.warmup_customers,
            bin_width: self.bin_width,
            master_seed: self.master_seed,
            truncation_tolerance: self.truncation_tolerance,
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessResult {
    pub config: RobustnessConfig,
    pub settings: ResolvedSettings,
    pub families: Vec<DelayFamily>,
    pub models: Vec<ModelResult>,
    pub tv: Vec<Vec<f64>>,
    pub hellinger: Vec<Vec<f64>>,
}

impl RobustnessResult {
    pub fn max_tv(&self) -> f64 {
        self.tv.iter().flatten().fold(0.0, |m: f64, &x| m.max(x))
    }

    /// `robustness.json` plus `<family>.wait.csv` per family.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_json(&dir.join("robustness.json"), self)?;
        for m in &self.models {
            m.wait_distribution
                .save_csv(&dir.join(format!("{}.wait.csv", m.model.name)))?;
        }
        Ok(())
    }
}

/// Wait distributions per delay family and their pairwise distances.
pub fn run_robustness(cfg: &RobustnessConfig) -> Result<RobustnessResult> {
    if cfg.families.is_empty() {
        return Err(Error::param("families", "need at least one delay family"));
    }
    if cfg.families.contains(&DelayFamily::Degenerate) {
        return Err(Error::param("families", "degenerate delays have no law to compare"));
    }
    let exp = cfg.experiment();
    exp.validate()?;
    let models = simulate_models(&exp)?;
    let waits: Vec<_> = models.iter().map(|m| &m.wait_distribution).collect();
    let tv = pairwise(&waits, |a, b| {
        let (p, q) = common_grid(a, b)?;
        total_variation(&p, &q)
    })?;
    let hel = pairwise(&waits, |a, b| {
        let (p, q) = common_grid(a, b)?;
        hellinger(&p, &q)
    })?;
    Ok(RobustnessResult {
        config: cfg.clone(),
        settings: exp.settings(),
        families: cfg.families.clone(),
        models,
        tv,
        hellinger: hel,
    })
}
