//! Slot-count moments of the pre-scheduled process.
//!
//! With `pᵢ(a, b)` the probability that scheduled customer `i` shows up and
//! arrives in `(a, b]`, counts in disjoint windows are sums of independent
//! per-customer indicators, so
//! `Cov(n₁, n₂) = -Σᵢ pᵢ(t, t+T) pᵢ(t+T, t+2T)`.

use serde::{Deserialize, Serialize};

use crate::arrivals::{ArrivalStream, Horizon, ProcessSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two abutting windows `(t, t+T]` and `(t+T, t+2T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotPair<F> {
    pub t: F,
    #[serde(rename = "T")]
    pub length: F,
}

impl<F: Real> SlotPair<F> {
    pub fn new(t: F, length: F) -> Result<Self> {
        if !(t.is_finite() && length.is_finite() && length > F::zero()) {
            return Err(Error::param(
                "T",
                format!("slot length must be finite and > 0, got {length}"),
            ));
        }
        Ok(SlotPair { t, length })
    }

    pub fn first(&self) -> Horizon<F> {
        Horizon {
            start: self.t,
            end: self.t + self.length,
        }
    }

    pub fn second(&self) -> Horizon<F> {
        Horizon {
            start: self.t + self.length,
            end: self.t + self.length + self.length,
        }
    }

    /// `(t, t+2T]`.
    pub fn span(&self) -> Horizon<F> {
        Horizon {
            start: self.t,
            end: self.second().end,
        }
    }
}

/// Probability that scheduled customer `i` is retained and arrives in
/// `(t1, t2]`: `γ (F_ξ(t2 - i/λ) - F_ξ(t1 - i/λ))`. Zero when `t2 <= t1`.
pub fn arrival_probability<F: Real>(spec: &ProcessSpec<F>, i: i64, t1: F, t2: F) -> F {
    if t2 <= t1 {
        return F::zero();
    }
    let slot = F::lit(i as f64) / spec.lambda;
    let p = spec.delay.cdf(t2 - slot) - spec.delay.cdf(t1 - slot);
    spec.gamma * p.max(F::zero())
}

/// Expected number of arrivals in `(t1, t2]`.
pub fn expected_count<F: Real>(spec: &ProcessSpec<F>, t1: F, t2: F) -> Result<F> {
    if t2 <= t1 {
        return Ok(F::zero());
    }
    let (lo, hi) = spec.index_window(&Horizon { start: t1, end: t2 })?;
    Ok((lo..=hi).fold(F::zero(), |acc, i| acc + arrival_probability(spec, i, t1, t2)))
}

/// `Cov(n₁, n₂)` for the two slots, summed over the truncated index window.
/// Never positive.
pub fn analytic_covariance<F: Real>(spec: &ProcessSpec<F>, slots: &SlotPair<F>) -> Result<F> {
    let (first, second) = (slots.first(), slots.second());
    let (lo, hi) = spec.index_window(&slots.span())?;
    let sum = (lo..=hi).fold(F::zero(), |acc, i| {
        let p1 = arrival_probability(spec, i, first.start, first.end);
        let p2 = arrival_probability(spec, i, second.start, second.end);
        acc + p1 * p2
    });
    // `0 - x` rather than `-x`, so an empty sum is +0
    Ok(F::zero() - sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate<F> {
    pub estimate: F,
    pub std_error: F,
    pub replications: usize,
}

impl<F: Real> CovarianceEstimate<F> {
    /// `(estimate - reference) / std_error`; zero when both the difference and
    /// the standard error vanish.
    pub fn z_score(&self, reference: F) -> F {
        let diff = self.estimate - reference;
        if self.std_error > F::zero() {
            diff / self.std_error
        } else if diff == F::zero() {
            F::zero()
        } else {
            diff.signum() * F::infinity()
        }
    }
}

/// Slot counts `(n₁, n₂)` of one stream.
pub fn slot_counts<F: Real>(stream: &ArrivalStream<F>, slots: &SlotPair<F>) -> (u64, u64) {
    (
        stream.count_in(&slots.first()) as u64,
        stream.count_in(&slots.second()) as u64,
    )
}

/// Sample covariance of `(n₁, n₂)` over an ensemble of streams.
pub fn empirical_covariance<F: Real>(
    streams: &[ArrivalStream<F>],
    slots: &SlotPair<F>,
) -> Result<CovarianceEstimate<F>> {
    let span = slots.span();
    for (k, s) in streams.iter().enumerate() {
        if let Some(h) = s.origin().horizon() {
            if !h.covers(&span) {
                return Err(Error::Coverage(format!(
                    "replication {k} covers ({}, {}] but the slots need ({}, {}]",
                    h.start, h.end, span.start, span.end
                )));
            }
        }
    }
    let counts: Vec<(u64, u64)> = streams.iter().map(|s| slot_counts(s, slots)).collect();
    covariance_from_counts(&counts)
}

/// Unbiased sample covariance with the standard error taken from the spread
/// of the per-replication products of deviations.
pub fn covariance_from_counts<F: Real>(counts: &[(u64, u64)]) -> Result<CovarianceEstimate<F>> {
    let n = counts.len();
    if n < 2 {
        return Err(Error::InsufficientReplications { needed: 2, got: n });
    }
    let nf = n as f64;
    let m1 = counts.iter().map(|c| c.0 as f64).sum::<f64>() / nf;
    let m2 = counts.iter().map(|c| c.1 as f64).sum::<f64>() / nf;
    let products: Vec<f64> = counts.iter().map(|&(a, b)| (a as f64 - m1) * (b as f64 - m2)).collect();
    let total: f64 = products.iter().sum();
    let estimate = total / (nf - 1.0);
    let mean_product = total / nf;
    let spread = products.iter().map(|d| (d - mean_product).powi(2)).sum::<f64>() / (nf - 1.0);
    let std_error = spread.sqrt() * nf.sqrt() / (nf - 1.0);
    Ok(CovarianceEstimate {
        estimate: F::lit(estimate),
        std_error: F::lit(std_error),
        replications: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrivals::{generate_poisson, DelayFamily, DelaySpec};

    fn spec(family: DelayFamily, sigma: f64, gamma: f64) -> ProcessSpec<f64> {
        let delay = if sigma == 0.0 {
            DelaySpec::degenerate()
        } else {
            DelaySpec::new(family, sigma).unwrap()
        };
        ProcessSpec::new(1.0, delay, gamma, Horizon::new(0.0, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn degenerate_probabilities_are_indicators() {
        let s = spec(DelayFamily::Degenerate, 0.0, 1.0);
        assert_eq!(arrival_probability(&s, 3, 2.5, 3.5), 1.0);
        assert_eq!(arrival_probability(&s, 3, 2.0, 3.0), 1.0);
        assert_eq!(arrival_probability(&s, 4, 2.5, 3.5), 0.0);
        assert_eq!(arrival_probability(&s, 3, 3.0, 3.0), 0.0);
    }

    #[test]
    fn full_support_has_probability_one() {
        let sigma = 1.7;
        let s = spec(DelayFamily::Uniform, sigma, 1.0);
        let h = sigma * 3f64.sqrt();
        assert!((arrival_probability(&s, 0, -h, h) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_covariance_is_zero() {
        let s = spec(DelayFamily::Degenerate, 0.0, 1.0);
        let c = analytic_covariance(&s, &SlotPair::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn covariance_fades_for_large_sigma() {
        let slots = SlotPair::new(0.0, 1.0).unwrap();
        let near = analytic_covariance(&spec(DelayFamily::Uniform, 1.0, 1.0), &slots).unwrap();
        let far = analytic_covariance(&spec(DelayFamily::Uniform, 100.0, 1.0), &slots).unwrap();
        assert!(near < 0.0 && far < 0.0);
        assert!(far.abs() < near.abs());
    }

    #[test]
    fn expected_count_scales_with_gamma() {
        let full = expected_count(&spec(DelayFamily::Normal, 2.0, 1.0), 0.3, 2.1).unwrap();
        let half = expected_count(&spec(DelayFamily::Normal, 2.0, 0.5), 0.3, 2.1).unwrap();
        assert!((half - full / 2.0).abs() < 1e-15);
        assert_eq!(
            expected_count(&spec(DelayFamily::Normal, 2.0, 1.0), 1.0, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn constant_counts_have_zero_covariance() {
        let est: CovarianceEstimate<f64> = covariance_from_counts(&[(1, 1); 50]).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.z_score(0.0), 0.0);
        assert!(matches!(
            covariance_from_counts::<f64>(&[(1, 2)]),
            Err(Error::InsufficientReplications { .. })
        ));
    }

    #[test]
    fn hand_computed_covariance() {
        // pairs (0,2), (2,0): means 1, 1; products -1, -1; cov = -2 / 1
        let est: CovarianceEstimate<f64> = covariance_from_counts(&[(0, 2), (2, 0)]).unwrap();
        assert_eq!(est.estimate, -2.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn poisson_ensemble_is_uncorrelated() {
        let slots = SlotPair::new(0.0, 1.0).unwrap();
        let streams: Vec<_> = (0..20_000)
            .map(|r| {
                generate_poisson(
                    1.0,
                    Horizon::new(0.0, 2.0).unwrap(),
                    crate::Seed {
                        master: 5,
                        substream: r,
                    },
                )
                .unwrap()
            })
            .collect();
        let est: CovarianceEstimate<f64> = empirical_covariance(&streams, &slots).unwrap();
        assert!(est.z_score(0.0).abs() < 3.0, "{est:?}");
    }

    #[test]
    fn streams_must_cover_both_slots() {
        let slots = SlotPair::new(0.0, 1.0).unwrap();
        let short: Vec<_> = (0..3)
            .map(|r| generate_poisson(1.0, Horizon::new(0.0, 1.5).unwrap(), r).unwrap())
            .collect();
        assert!(matches!(empirical_covariance(&short, &slots), Err(Error::Coverage(_))));
    }
}
