use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::TriangularLaw;
use crate::scalar::Real;

fn default_spread_ratio<F: Real>() -> F {
    F::lit(DEFAULT_SPREAD_RATIO)
}

/// `(upper - mode) / (mode - lower)` used to close the triangular service
/// law when only its mean and mode are given.
pub const DEFAULT_SPREAD_RATIO: f64 = 2.0;

/// Law of the service durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", bound(deserialize = "F: Real"))]
pub enum ServiceSpec<F> {
    Deterministic {
        mean: F,
    },
    /// Triangular law with the given mean and mode. The support `[a, b]` is
    /// fixed by `(a + mode + b) / 3 = mean` and
    /// `b - mode = spread_ratio * (mode - a)`.
    Triangular {
        mean: F,
        mode: F,
        #[serde(default = "default_spread_ratio")]
        spread_ratio: F,
    },
}

impl<F: Real> ServiceSpec<F> {
    pub fn deterministic(mean: F) -> Self {
        ServiceSpec::Deterministic { mean }
    }

    pub fn triangular(mean: F, mode: F) -> Self {
        ServiceSpec::Triangular {
            mean,
            mode,
            spread_ratio: default_spread_ratio(),
        }
    }

    pub fn mean(&self) -> F {
        match *self {
            ServiceSpec::Deterministic { mean } | ServiceSpec::Triangular { mean, .. } => mean,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, ServiceSpec::Deterministic { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ServiceSpec::Deterministic { mean } => {
                if !(mean.is_finite() && mean > F::zero()) {
                    return Err(Error::param(
                        "service.mean",
                        format!("must be finite and > 0, got {mean}"),
                    ));
                }
                Ok(())
            }
            ServiceSpec::Triangular { .. } => self.triangular_law().map(|_| ()),
        }
    }

    /// Support and mode of the triangular law, or an error if the closure
    /// puts mass at or below zero.
    pub fn triangular_law(&self) -> Result<TriangularLaw<F>> {
        let ServiceSpec::Triangular {
            mean,
            mode,
            spread_ratio: r,
        } = *self
        else {
            return Err(Error::param("service.family", "not a triangular service law"));
        };
        if !(mean.is_finite() && mean > F::zero() && mode.is_finite()) {
            return Err(Error::param(
                "service.mean",
                format!("need finite mean > 0, got mean {mean}, mode {mode}"),
            ));
        }
        if !(r.is_finite() && r > F::zero()) || r == F::one() {
            return Err(Error::param(
                "service.spread_ratio",
                format!("must be finite, > 0 and != 1, got {r}"),
            ));
        }
        let three = F::lit(3.0);
        let lower = (three * mean - (F::lit(2.0) + r) * mode) / (F::one() - r);
        let upper = three * mean - mode - lower;
        if !(lower <= mode && mode <= upper) || lower >= upper {
            return Err(Error::param(
                "service.mode",
                format!("mode {mode} is incompatible with mean {mean} and spread ratio {r}"),
            ));
        }
        if lower <= F::zero() {
            return Err(Error::param(
                "service.mode",
                format!("triangular support [{lower}, {upper}] reaches non-positive durations"),
            ));
        }
        Ok(TriangularLaw { lower, mode, upper })
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<F> {
        Ok(self.sampler()?.sample(rng))
    }

    /// Validated sampler, so hot loops skip re-deriving the support.
    pub fn sampler(&self) -> Result<ServiceSampler<F>> {
        match *self {
            ServiceSpec::Deterministic { mean } => {
                self.validate()?;
                Ok(ServiceSampler::Fixed(mean))
            }
            ServiceSpec::Triangular { .. } => Ok(ServiceSampler::Triangular(self.triangular_law()?)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ServiceSampler<F> {
    Fixed(F),
    Triangular(TriangularLaw<F>),
}

impl<F: Real> ServiceSampler<F> {
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> F {
        match self {
            ServiceSampler::Fixed(d) => *d,
            ServiceSampler::Triangular(law) => law.quantile(F::unit_open(rng)),
        }
    }
}
