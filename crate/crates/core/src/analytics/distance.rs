use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::queueing::EmpiricalDistribution;
use crate::scalar::Real;

fn check_grids<F: Real>(p: &EmpiricalDistribution<F>, q: &EmpiricalDistribution<F>) -> Result<()> {
    if p.bin_edges() != q.bin_edges() {
        return Err(Error::GridMismatch(format!(
            "{} bins vs {} bins, or edges differ; rebin to a common grid first",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// Total variation distance `½ Σ |pₖ - qₖ|` on a shared grid.
pub fn total_variation<F: Real>(p: &EmpiricalDistribution<F>, q: &EmpiricalDistribution<F>) -> Result<F> {
    check_grids(p, q)?;
    let sum = p
        .mass()
        .iter()
        .zip(q.mass())
        .fold(F::zero(), |acc, (&a, &b)| acc + (a - b).abs());
    Ok((sum / F::lit(2.0)).min(F::one()))
}

/// Hellinger distance `√(½ Σ (√pₖ - √qₖ)²)` on a shared grid.
pub fn hellinger<F: Real>(p: &EmpiricalDistribution<F>, q: &EmpiricalDistribution<F>) -> Result<F> {
    check_grids(p, q)?;
    let sum = p.mass().iter().zip(q.mass()).fold(F::zero(), |acc, (&a, &b)| {
        let d = a.sqrt() - b.sqrt();
        acc + d * d
    });
    Ok((sum / F::lit(2.0)).sqrt().min(F::one()))
}

/// Re-expresses `p` on `edges` by summing whole bins.
///
/// Every source bin carrying mass must sit inside exactly one target bin,
/// with its ends on target edges or strictly inside one target bin; mass is
/// never split. Empty source bins are ignored, so a grid can be extended
/// with empty bins.
pub fn rebin<F: Real>(p: &EmpiricalDistribution<F>, edges: &[F]) -> Result<EmpiricalDistribution<F>> {
    if edges.len() < 2
        || edges
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
    {
        return Err(Error::InvalidDistribution(
            "target edges must be strictly increasing".into(),
        ));
    }
    let scale = edges
        .iter()
        .chain(p.bin_edges())
        .fold(F::zero(), |m, e| m.max(e.abs()))
        .max(F::one());
    let tol = scale * F::lit(1e-12);
    let mut mass = vec![F::zero(); edges.len() - 1];
    for (left, right, m) in p.bins() {
        if m == F::zero() {
            continue;
        }
        // Target bin k with edges[k] <= left (within tolerance).
        let k = edges.partition_point(|&e| e <= left + tol);
        if k == 0 || k == edges.len() {
            return Err(Error::Misaligned(format!(
                "source bin [{left}, {right}) holding mass {m} lies outside the target grid"
            )));
        }
        let k = k - 1;
        if right > edges[k + 1] + tol {
            return Err(Error::Misaligned(format!(
                "source bin [{left}, {right}) straddles target edge {}",
                edges[k + 1]
            )));
        }
        mass[k] = mass[k] + m;
    }
    EmpiricalDistribution::new(edges.to_vec(), mass, p.sample_count())
}

/// Pads two uniform distributions with the same bin width to a common grid.
pub fn common_grid<F: Real>(
    p: &EmpiricalDistribution<F>,
    q: &EmpiricalDistribution<F>,
) -> Result<(EmpiricalDistribution<F>, EmpiricalDistribution<F>)> {
    let (Some(wp), Some(wq)) = (p.uniform_width(), q.uniform_width()) else {
        if p.bin_edges() == q.bin_edges() {
            return Ok((p.clone(), q.clone()));
        }
        return Err(Error::GridMismatch(
            "only uniform grids starting at 0 can be aligned automatically".into(),
        ));
    };
    if (wp - wq).abs() > wp.max(wq) * F::lit(1e-9) {
        return Err(Error::GridMismatch(format!("bin widths {wp} and {wq} differ")));
    }
    let bins = p.len().max(q.len());
    let edges = p.padded_to(bins)?.bin_edges().to_vec();
    Ok((rebin(p, &edges)?, rebin(q, &edges)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(mass: &[f64]) -> EmpiricalDistribution<f64> {
        EmpiricalDistribution::uniform(1.0, mass.to_vec(), 100).unwrap()
    }

    #[test]
    fn closed_form_distances() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[1.0, 0.0]);
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert_eq!(hellinger(&p, &p).unwrap(), 0.0);
        assert!((total_variation(&p, &q).unwrap() - 0.5).abs() < 1e-12);
        let h = (1.0 - 0.5f64.sqrt()).sqrt();
        assert!((hellinger(&p, &q).unwrap() - h).abs() < 1e-12);
        assert!((hellinger(&p, &q).unwrap() - 0.541196).abs() < 1e-6);
        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        assert_eq!(total_variation(&a, &b).unwrap(), 1.0);
        assert_eq!(hellinger(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_grids_fail() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[1.0]);
        assert!(matches!(total_variation(&p, &q), Err(Error::GridMismatch(_))));
        assert!(matches!(hellinger(&p, &q), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn rebin_examples() {
        let p = dist(&[0.3, 0.7]);
        let c = rebin(&p, &[0.0, 2.0]).unwrap();
        assert_eq!(c.mass(), &[1.0]);
        assert_eq!(rebin(&p, p.bin_edges()).unwrap(), p);
        let four = dist(&[0.25; 4]);
        let pairs = rebin(&four, &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(pairs.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn rebin_refuses_to_split_mass() {
        let p = dist(&[0.3, 0.7]);
        assert!(matches!(rebin(&p, &[0.0, 0.5, 2.0]), Err(Error::Misaligned(_))));
        assert!(matches!(rebin(&p, &[0.0, 1.0]), Err(Error::Misaligned(_))));
        // refining is fine where there is no mass to split
        let q = dist(&[1.0, 0.0]);
        let r = rebin(&q, &[0.0, 1.0, 1.5, 2.0]).unwrap();
        assert_eq!(r.mass(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn common_grid_pads_shorter_side() {
        let p = dist(&[1.0]);
        let q = dist(&[0.5, 0.25, 0.25]);
        let (a, b) = common_grid(&p, &q).unwrap();
        assert_eq!(a.mass(), &[1.0, 0.0, 0.0]);
        assert!((total_variation(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        let other = EmpiricalDistribution::uniform(0.5, vec![1.0], 1).unwrap();
        assert!(common_grid(&p, &other).is_err());
    }

    fn normalized(raw: Vec<f64>) -> Vec<f64> {
        let s: f64 = raw.iter().sum();
        raw.iter().map(|x| x / s).collect()
    }

    fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..12).prop_flat_map(|n| {
            (
                prop::collection::vec(0.0f64..1.0, n),
                prop::collection::vec(0.0f64..1.0, n),
            )
                .prop_filter("nonzero", |(a, b)| {
                    a.iter().sum::<f64>() > 1e-3 && b.iter().sum::<f64>() > 1e-3
                })
                .prop_map(|(a, b)| (normalized(a), normalized(b)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn distance_axioms((a, b) in pair()) {
            let p = dist(&a);
            let q = dist(&b);
            let tv = total_variation(&p, &q).unwrap();
            let h = hellinger(&p, &q).unwrap();
            prop_assert!((0.0..=1.0).contains(&tv));
            prop_assert!((0.0..=1.0).contains(&h));
            prop_assert_eq!(tv, total_variation(&q, &p).unwrap());
            prop_assert!((h - hellinger(&q, &p).unwrap()).abs() < 1e-15);
            prop_assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
            prop_assert_eq!(hellinger(&p, &p).unwrap(), 0.0);
            if a != b {
                prop_assert!(tv > 0.0 && h > 0.0);
            }
            prop_assert!(h * h <= tv + 1e-12);
            prop_assert!(h <= (2.0 * tv).sqrt() + 1e-12);
            prop_assert!(tv <= 2f64.sqrt() * h + 1e-12);
        }

        #[test]
        fn rebin_conserves_mass(mass in prop::collection::vec(0.0f64..1.0, 2..40), group in 1usize..5) {
            prop_assume!(mass.iter().sum::<f64>() > 1e-3);
            let p = dist(&normalized(mass));
            let n = p.len();
            let bins = n.div_ceil(group);
            let edges: Vec<f64> = (0..=bins).map(|k| (k * group) as f64).collect();
            let r = rebin(&p, &edges).unwrap();
            let before: f64 = p.mass().iter().sum();
            let after: f64 = r.mass().iter().sum();
            prop_assert!((before - after).abs() < 1e-12);
        }
    }
}
