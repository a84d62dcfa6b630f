mod common;

use common::integrate_pieces;
use psra::{DelayFamily, DelaySpec};

const PANELS: usize = 4000;

/// Breakpoints covering the effective support, with every kink of the
/// density on a boundary.
fn breaks(spec: &DelaySpec) -> Vec<f64> {
    let s = spec.sigma;
    match spec.family {
        DelayFamily::Uniform => vec![-s * 3f64.sqrt(), s * 3f64.sqrt()],
        DelayFamily::Triangular => vec![-s * 6f64.sqrt(), 0.0, s * 6f64.sqrt()],
        DelayFamily::Normal => vec![-40.0 * s, 0.0, 40.0 * s],
        DelayFamily::Exponential => vec![-s, 0.0, 10.0 * s, 80.0 * s],
        DelayFamily::Degenerate => unreachable!(),
    }
}

#[test]
fn densities_integrate_to_one_with_zero_mean_and_unit_sigma() {
    for family in DelayFamily::RANDOM {
        for sigma in [0.5, 1.0, 20.0] {
            let spec = DelaySpec::new(family, sigma).unwrap();
            let b = breaks(&spec);
            let f = |x: f64| spec.density(x);
            let mass = integrate_pieces(f, &b, PANELS);
            let mean = integrate_pieces(|x| x * f(x), &b, PANELS);
            let var = integrate_pieces(|x| x * x * f(x), &b, PANELS) - mean * mean;
            assert!((mass - 1.0).abs() < 1e-9, "{family} mass {mass}");
            assert!(mean.abs() < 1e-9 * sigma, "{family} mean {mean}");
            assert!((var.sqrt() / sigma - 1.0).abs() < 1e-9, "{family} sd {}", var.sqrt());
        }
    }
}

#[test]
fn cdf_matches_integrated_density() {
    for family in DelayFamily::RANDOM {
        let sigma = 1.5;
        let spec = DelaySpec::new(family, sigma).unwrap();
        let b = breaks(&spec);
        let (lo, hi) = (b[0], *b.last().unwrap());
        // the grid spans the bulk of the law and a little outside the support
        let (a, z) = match family {
            DelayFamily::Normal => (-6.0 * sigma, 6.0 * sigma),
            DelayFamily::Exponential => (-1.5 * sigma, 8.0 * sigma),
            _ => (lo - 0.5, hi + 0.5),
        };
        for k in 0..100 {
            let x = a + (z - a) * k as f64 / 99.0;
            let mut pieces: Vec<f64> = b.iter().copied().filter(|&p| p < x).collect();
            let quad = if pieces.is_empty() {
                0.0
            } else {
                pieces.push(x.min(hi));
                integrate_pieces(|u| spec.density(u), &pieces, PANELS)
            };
            let cdf = spec.cdf(x);
            assert!((cdf - quad).abs() < 1e-9, "{family} at {x}: cdf {cdf} vs {quad}");
        }
    }
}

#[test]
fn quantile_inverts_cdf() {
    for family in DelayFamily::RANDOM {
        let spec = DelaySpec::new(family, 2.0).unwrap();
        for k in 1..100 {
            let p = k as f64 / 100.0;
            let x = spec.quantile(p);
            assert!((spec.cdf(x) - p).abs() < 1e-9, "{family} p={p}");
        }
    }
}

#[test]
fn tail_bound_leaves_at_most_tolerance_outside() {
    for family in DelayFamily::RANDOM {
        let spec = DelaySpec::new(family, 3.0).unwrap();
        for tol in [1e-12, 1e-6, 1e-3] {
            let b = spec.tail_bound(tol).unwrap();
            let outside = spec.cdf(-b) + (1.0 - spec.cdf(b));
            assert!(outside <= 2.0 * tol * (1.0 + 1e-6), "{family} tol {tol}: {outside}");
        }
    }
}

#[test]
fn sample_moments_are_consistent() {
    use psra::{Purpose, Seed};
    let n = 400_000;
    for (k, family) in DelayFamily::RANDOM.into_iter().enumerate() {
        let spec = DelaySpec::new(family, 4.0).unwrap();
        let mut rng = Seed::replication(7, k as u64, Purpose::Auxiliary).rng();
        let xs: Vec<f64> = (0..n).map(|_| spec.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // five standard errors of the mean, and a loose bound on the variance
        assert!(mean.abs() < 5.0 * 4.0 / (n as f64).sqrt(), "{family} mean {mean}");
        assert!((var / 16.0 - 1.0).abs() < 0.03, "{family} var {var}");
    }
}
