//! Distances between binned distributions and slot-count correlation.

mod covariance;
mod distance;

use serde::{Deserialize, Serialize};

pub use covariance::{
    analytic_covariance, arrival_probability, covariance_from_counts, empirical_covariance, expected_count,
    slot_counts, CovarianceEstimate, SlotPair,
};
pub use distance::{common_grid, hellinger, rebin, total_variation};

use crate::error::Result;
use crate::queueing::EmpiricalDistribution;
use crate::scalar::Real;

/// Distance of one model's distribution from a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub model: String,
    pub tv: f64,
    pub hellinger: f64,
    pub bin_width: Option<f64>,
    pub n_samples: u64,
}

impl DistanceReport {
    /// Distances after padding both sides to a common grid. `n_samples` is
    /// the model's sample count.
    pub fn compare<F: Real>(
        model: impl Into<String>,
        candidate: &EmpiricalDistribution<F>,
        reference: &EmpiricalDistribution<F>,
    ) -> Result<Self> {
        let (p, q) = common_grid(candidate, reference)?;
        Ok(DistanceReport {
            model: model.into(),
            tv: total_variation(&p, &q)?.to_f64().unwrap_or(f64::NAN),
            hellinger: hellinger(&p, &q)?.to_f64().unwrap_or(f64::NAN),
            bin_width: p.uniform_width().and_then(|w| w.to_f64()),
            n_samples: candidate.sample_count(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub t: f64,
    #[serde(rename = "T")]
    pub slot_length: f64,
    pub analytic: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub replications: usize,
}
