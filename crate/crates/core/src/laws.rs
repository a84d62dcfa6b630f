//! Closed-form pieces shared by the delay and service laws.

use crate::scalar::Real;

/// Triangular law on `[lower, upper]` with peak at `mode`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularLaw<F> {
    pub lower: F,
    pub mode: F,
    pub upper: F,
}

impl<F: Real> TriangularLaw<F> {
    pub fn mean(&self) -> F {
        (self.lower + self.mode + self.upper) / F::lit(3.0)
    }

    pub fn density(&self, t: F) -> F {
        let TriangularLaw {
            lower: a,
            mode: m,
            upper: b,
        } = *self;
        if t < a || t > b {
            F::zero()
        } else if t < m {
            F::lit(2.0) * (t - a) / ((b - a) * (m - a))
        } else if t > m {
            F::lit(2.0) * (b - t) / ((b - a) * (b - m))
        } else {
            F::lit(2.0) / (b - a)
        }
    }

    pub fn cdf(&self, t: F) -> F {
        let TriangularLaw {
            lower: a,
            mode: m,
            upper: b,
        } = *self;
        if t <= a {
            F::zero()
        } else if t >= b {
            F::one()
        } else if t <= m {
            (t - a) * (t - a) / ((b - a) * (m - a))
        } else {
            F::one() - (b - t) * (b - t) / ((b - a) * (b - m))
        }
    }

    pub fn quantile(&self, u: F) -> F {
        let TriangularLaw {
            lower: a,
            mode: m,
            upper: b,
        } = *self;
        let split = (m - a) / (b - a);
        if u < split {
            a + (u * (b - a) * (m - a)).sqrt()
        } else {
            b - ((F::one() - u) * (b - a) * (b - m)).sqrt()
        }
    }
}

/// Standard normal CDF.
pub fn normal_cdf<F: Real>(z: F) -> F {
    F::lit(0.5) * (-z / F::lit(std::f64::consts::SQRT_2)).gauss_erfc()
}

/// Standard normal quantile: rational initial guess refined by Halley steps
/// against [`normal_cdf`].
pub fn normal_quantile<F: Real>(p: F) -> F {
    if p <= F::zero() {
        return F::neg_infinity();
    }
    if p >= F::one() {
        return F::infinity();
    }
    let pf = p.to_f64().unwrap_or(0.5);
    let mut x = F::lit(acklam(pf));
    let root_two_pi = F::lit((2.0 * std::f64::consts::PI).sqrt());
    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e * root_two_pi * (x * x / F::lit(2.0)).exp();
        x = x - u / (F::one() + x * u / F::lit(2.0));
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.8, 0.999] {
            let x: f64 = normal_quantile(p);
            let back = normal_cdf(x);
            assert!((back - p).abs() <= 1e-13 * p.max(1e-3), "p={p} x={x} back={back}");
        }
        // scipy.stats.norm.ppf(1e-12)
        assert!((normal_quantile(1e-12f64) + 7.034_483_825_301_131).abs() < 1e-9);
    }

    #[test]
    fn triangular_quantile_inverts_cdf() {
        let law = TriangularLaw {
            lower: 0.2,
            mode: 0.8,
            upper: 2.0,
        };
        for k in 1..100 {
            let u = k as f64 / 100.0;
            assert!((law.cdf(law.quantile(u)) - u).abs() < 1e-12);
        }
        assert!((law.mean() - 1.0).abs() < 1e-15);
    }
}
