//! Zero-mean delay laws parametrized by their standard deviation.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::{normal_cdf, normal_quantile, TriangularLaw};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayFamily {
    /// Uniform on `[-σ√3, σ√3]`.
    Uniform,
    /// Symmetric triangular on `[-σ√6, σ√6]` with mode 0.
    Triangular,
    /// Normal(0, σ²).
    Normal,
    /// `E - σ` with `E` exponential of mean σ; support `[-σ, ∞)`.
    Exponential,
    /// No delay at all.
    Degenerate,
}

impl DelayFamily {
    pub const RANDOM: [DelayFamily; 4] = [
        DelayFamily::Uniform,
        DelayFamily::Triangular,
        DelayFamily::Normal,
        DelayFamily::Exponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DelayFamily::Uniform => "uniform",
            DelayFamily::Triangular => "triangular",
            DelayFamily::Normal => "normal",
            DelayFamily::Exponential => "exponential",
            DelayFamily::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for DelayFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DelayFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(DelayFamily::Uniform),
            "triangular" => Ok(DelayFamily::Triangular),
            "normal" | "gaussian" => Ok(DelayFamily::Normal),
            "exponential" => Ok(DelayFamily::Exponential),
            "degenerate" | "none" => Ok(DelayFamily::Degenerate),
            other => Err(Error::param("family", format!("unknown delay family `{other}`"))),
        }
    }
}

/// Law of the i.i.d. schedule perturbations: mean 0, standard deviation `sigma`.
///
/// A zero `sigma` collapses every family to the point mass at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaySpec<F> {
    pub family: DelayFamily,
    pub sigma: F,
}

impl<F: Real> DelaySpec<F> {
    pub fn new(family: DelayFamily, sigma: F) -> Result<Self> {
        let spec = DelaySpec { family, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn degenerate() -> Self {
        DelaySpec {
            family: DelayFamily::Degenerate,
            sigma: F::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma < F::zero() {
            return Err(Error::param(
                "sigma",
                format!("must be finite and >= 0, got {}", self.sigma),
            ));
        }
        if self.family == DelayFamily::Degenerate && self.sigma != F::zero() {
            return Err(Error::param("sigma", "degenerate delays require sigma = 0"));
        }
        Ok(())
    }

    pub fn is_point_mass(&self) -> bool {
        self.family == DelayFamily::Degenerate || self.sigma == F::zero()
    }

    fn triangle(&self) -> TriangularLaw<F> {
        let half = self.sigma * F::lit(6f64.sqrt());
        TriangularLaw {
            lower: -half,
            mode: F::zero(),
            upper: half,
        }
    }

    /// Closed support `[lo, hi]`; infinite ends for unbounded laws.
    pub fn support(&self) -> (F, F) {
        let s = self.sigma;
        if self.is_point_mass() {
            return (F::zero(), F::zero());
        }
        match self.family {
            DelayFamily::Uniform => {
                let h = s * F::lit(3f64.sqrt());
                (-h, h)
            }
            DelayFamily::Triangular => {
                let tri = self.triangle();
                (tri.lower, tri.upper)
            }
            DelayFamily::Normal => (F::neg_infinity(), F::infinity()),
            DelayFamily::Exponential => (-s, F::infinity()),
            DelayFamily::Degenerate => unreachable!(),
        }
    }

    /// Probability density. The point mass has no density and reports 0.
    pub fn density(&self, t: F) -> F {
        if self.is_point_mass() {
            return F::zero();
        }
        let s = self.sigma;
        match self.family {
            DelayFamily::Uniform => {
                let h = s * F::lit(3f64.sqrt());
                if t >= -h && t <= h {
                    F::one() / (h + h)
                } else {
                    F::zero()
                }
            }
            DelayFamily::Triangular => self.triangle().density(t),
            DelayFamily::Normal => {
                let z = t / s;
                (-(z * z) / F::lit(2.0)).exp() / (s * F::lit((2.0 * std::f64::consts::PI).sqrt()))
            }
            DelayFamily::Exponential => {
                if t < -s {
                    F::zero()
                } else {
                    (-(t + s) / s).exp() / s
                }
            }
            DelayFamily::Degenerate => unreachable!(),
        }
    }

    /// Right-continuous CDF, `P(ξ <= t)`.
    pub fn cdf(&self, t: F) -> F {
        if self.is_point_mass() {
            return if t >= F::zero() { F::one() } else { F::zero() };
        }
        let s = self.sigma;
        match self.family {
            DelayFamily::Uniform => {
                let h = s * F::lit(3f64.sqrt());
                if t <= -h {
                    F::zero()
                } else if t >= h {
                    F::one()
                } else {
                    (t + h) / (h + h)
                }
            }
            DelayFamily::Triangular => self.triangle().cdf(t),
            DelayFamily::Normal => normal_cdf(t / s),
            DelayFamily::Exponential => {
                if t <= -s {
                    F::zero()
                } else {
                    -(-(t + s) / s).exp_m1()
                }
            }
            DelayFamily::Degenerate => unreachable!(),
        }
    }

    /// Inverse CDF on (0, 1).
    pub fn quantile(&self, u: F) -> F {
        if self.is_point_mass() {
            return F::zero();
        }
        let s = self.sigma;
        match self.family {
            DelayFamily::Uniform => {
                let h = s * F::lit(3f64.sqrt());
                -h + (h + h) * u
            }
            DelayFamily::Triangular => self.triangle().quantile(u),
            DelayFamily::Normal => s * normal_quantile(u),
            DelayFamily::Exponential => -s - s * (-u).ln_1p(),
            DelayFamily::Degenerate => unreachable!(),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> F {
        if self.is_point_mass() {
            return F::zero();
        }
        let s = self.sigma;
        match self.family {
            DelayFamily::Uniform | DelayFamily::Triangular => self.quantile(F::unit_open(rng)),
            DelayFamily::Normal => {
                // Box-Muller, cosine branch only.
                let u1 = F::unit_open(rng);
                let u2 = F::unit_open(rng);
                s * (F::lit(-2.0) * u1.ln()).sqrt() * (F::lit(2.0 * std::f64::consts::PI) * u2).cos()
            }
            DelayFamily::Exponential => -s - s * F::unit_open(rng).ln(),
            DelayFamily::Degenerate => unreachable!(),
        }
    }

    /// Half-width `B` such that `P(|ξ| > B) <= tolerance` on each side.
    /// Bounded laws return their exact support half-width.
    pub fn tail_bound(&self, tolerance: F) -> Result<F> {
        if !(tolerance > F::zero() && tolerance < F::lit(0.5)) {
            return Err(Error::Truncation(format!(
                "tolerance must lie in (0, 0.5), got {tolerance}"
            )));
        }
        if self.is_point_mass() {
            return Ok(F::zero());
        }
        let s = self.sigma;
        let bound = match self.family {
            DelayFamily::Uniform | DelayFamily::Triangular => self.support().1,
            DelayFamily::Normal => -s * normal_quantile(tolerance),
            // Left end of the support is -σ; the right tail solves exp(-(B+σ)/σ) = tol.
            DelayFamily::Exponential => s.max(s * (-tolerance.ln() - F::one())),
            DelayFamily::Degenerate => unreachable!(),
        };
        if !bound.is_finite() {
            return Err(Error::Truncation(format!(
                "tail bound is not finite for {} delays with sigma {}",
                self.family, s
            )));
        }
        Ok(bound)
    }
}
