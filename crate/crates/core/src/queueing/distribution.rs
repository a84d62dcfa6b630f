//! Binned probability mass on an explicit grid.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::significant;
use crate::scalar::Real;

/// Probability mass over the bins `[edges[k], edges[k+1])`.
///
/// Serializes as `{"edges": [...], "mass": [...], "n": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution<F>", bound(deserialize = "F: Real"))]
pub struct EmpiricalDistribution<F> {
    #[serde(rename = "edges")]
    bin_edges: Vec<F>,
    mass: Vec<F>,
    #[serde(rename = "n")]
    sample_count: u64,
}

#[derive(Deserialize)]
struct RawDistribution<F> {
    edges: Vec<F>,
    mass: Vec<F>,
    n: u64,
}

impl<F: Real> TryFrom<RawDistribution<F>> for EmpiricalDistribution<F> {
    type Error = Error;

    fn try_from(raw: RawDistribution<F>) -> Result<Self> {
        EmpiricalDistribution::new(raw.edges, raw.mass, raw.n)
    }
}

impl<F: Real> EmpiricalDistribution<F> {
    pub fn new(bin_edges: Vec<F>, mass: Vec<F>, sample_count: u64) -> Result<Self> {
        if bin_edges.len() < 2 {
            return Err(Error::InvalidDistribution("need at least one bin".into()));
        }
        if bin_edges.len() != mass.len() + 1 {
            return Err(Error::InvalidDistribution(format!(
                "{} edges do not bound {} bins",
                bin_edges.len(),
                mass.len()
            )));
        }
        if bin_edges.iter().any(|e| !e.is_finite()) || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution(
                "edges must be finite and strictly increasing".into(),
            ));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < F::zero()) {
            return Err(Error::InvalidDistribution(
                "masses must be finite and nonnegative".into(),
            ));
        }
        let total = mass.iter().fold(F::zero(), |acc, &m| acc + m);
        if (total - F::one()).abs() > F::mass_tolerance(mass.len()) {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}, not 1")));
        }
        Ok(EmpiricalDistribution {
            bin_edges,
            mass,
            sample_count,
        })
    }

    /// Uniform grid `{0, w, 2w, ...}` with one bin per mass entry.
    pub fn uniform(width: F, mass: Vec<F>, sample_count: u64) -> Result<Self> {
        let edges = uniform_edges(width, mass.len())?;
        Self::new(edges, mass, sample_count)
    }

    /// Normalized histogram of nonnegative samples on `{0, w, 2w, ...}`,
    /// extending to the bin that holds the largest sample.
    pub fn from_samples(samples: &[F], width: F) -> Result<Self> {
        let mut hist = Histogram::new(width)?;
        for &x in samples {
            hist.add(x)?;
        }
        hist.to_distribution()
    }

    pub fn bin_edges(&self) -> &[F] {
        &self.bin_edges
    }

    pub fn mass(&self) -> &[F] {
        &self.mass
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// `(left, right, mass)` per bin.
    pub fn bins(&self) -> impl Iterator<Item = (F, F, F)> + '_ {
        self.bin_edges.windows(2).zip(&self.mass).map(|(e, &m)| (e[0], e[1], m))
    }

    /// Common width if the grid is `{0, w, 2w, ...}` up to rounding.
    pub fn uniform_width(&self) -> Option<F> {
        let w = self.bin_edges[1] - self.bin_edges[0];
        let tol = w * F::lit(1e-9);
        let starts_at_zero = self.bin_edges[0].abs() <= tol;
        let regular = self
            .bin_edges
            .iter()
            .enumerate()
            .all(|(k, &e)| (e - F::from_count(k) * w).abs() <= tol * F::from_count(k.max(1)));
        (starts_at_zero && regular).then_some(w)
    }

    /// Mean of the binned law, placing each bin's mass at its midpoint.
    pub fn midpoint_mean(&self) -> F {
        self.bins()
            .fold(F::zero(), |acc, (l, r, m)| acc + m * (l + r) / F::lit(2.0))
    }

    /// Copy on the uniform grid with `bins` bins, padding with empty bins.
    /// Fails if the grid is not uniform or would need to shrink over mass.
    pub fn padded_to(&self, bins: usize) -> Result<Self> {
        let width = self
            .uniform_width()
            .ok_or_else(|| Error::GridMismatch("padding requires a uniform grid starting at 0".into()))?;
        if bins < self.len() && self.mass[bins..].iter().any(|&m| m > F::zero()) {
            return Err(Error::Misaligned(format!(
                "cannot drop bins holding mass (keep {bins} of {})",
                self.len()
            )));
        }
        let mut mass = self.mass.clone();
        mass.resize(bins, F::zero());
        Self::uniform(width, mass, self.sample_count)
    }

    /// CSV with header `bin_left,bin_right,mass`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_left", "bin_right", "mass"])?;
        for (l, r, m) in self.bins() {
            w.write_record([
                significant(l.to_f64().unwrap_or(f64::NAN), 9),
                significant(r.to_f64().unwrap_or(f64::NAN), 9),
                significant(m.to_f64().unwrap_or(f64::NAN), 12),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Reads the `bin_left,bin_right,mass` layout. The CSV carries no sample
    /// count, so `n` is 0; masses rounded on output are renormalized when
    /// they sum to 1 within `1e-9` per bin.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }

    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            bin_left: f64,
            bin_right: f64,
            mass: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut edges = Vec::new();
        let mut mass = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row?;
            match edges.last() {
                None => edges.push(F::lit(row.bin_left)),
                Some(&last) if last == F::lit(row.bin_left) => {}
                Some(_) => return Err(Error::InvalidDistribution("bins must be contiguous".into())),
            }
            edges.push(F::lit(row.bin_right));
            mass.push(F::lit(row.mass));
        }
        let total = mass.iter().fold(F::zero(), |acc, &m| acc + m);
        if total > F::zero() && (total - F::one()).abs() <= F::lit(1e-9) * F::from_count(mass.len().max(1)) {
            mass.iter_mut().for_each(|m| *m = *m / total);
        }
        Self::new(edges, mass, 0)
    }

    /// JSON or CSV, by file extension.
    pub fn load(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Self::load_csv(path),
            _ => Self::load_json(path),
        }
    }
}

pub(crate) fn uniform_edges<F: Real>(width: F, bins: usize) -> Result<Vec<F>> {
    if !(width.is_finite() && width > F::zero()) {
        return Err(Error::param(
            "bin_width",
            format!("must be finite and > 0, got {width}"),
        ));
    }
    Ok((0..=bins).map(|k| F::from_count(k) * width).collect())
}

/// Counting histogram on `{0, w, 2w, ...}`; merges by adding counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<F> {
    width: F,
    counts: Vec<u64>,
}

impl<F: Real> Histogram<F> {
    pub fn new(width: F) -> Result<Self> {
        uniform_edges(width, 0)?;
        Ok(Histogram {
            width,
            counts: Vec::new(),
        })
    }

    pub fn width(&self) -> F {
        self.width
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, x: F) -> Result<()> {
        if !(x.is_finite() && x >= F::zero()) {
            return Err(Error::param(
                "sample",
                format!("histogram samples must be finite and >= 0, got {x}"),
            ));
        }
        let k = (x / self.width).floor().to_usize().ok_or_else(|| {
            Error::param(
                "sample",
                format!("sample {x} is too far out for bin width {}", self.width),
            )
        })?;
        if k >= self.counts.len() {
            self.counts.resize(k + 1, 0);
        }
        self.counts[k] += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &Histogram<F>) -> Result<()> {
        if self.width != other.width {
            return Err(Error::GridMismatch(format!(
                "bin widths {} and {} differ",
                self.width, other.width
            )));
        }
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn to_distribution(&self) -> Result<EmpiricalDistribution<F>> {
        let n = self.total();
        if n == 0 {
            return Err(Error::NoData("histogram holds no samples".into()));
        }
        let total = F::lit(n as f64);
        let mass = self.counts.iter().map(|&c| F::lit(c as f64) / total).collect();
        EmpiricalDistribution::uniform(self.width, mass, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_renormalizes_rounded_mass() {
        let d = EmpiricalDistribution::<f64>::uniform(0.5, vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 3).unwrap();
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        let back = EmpiricalDistribution::<f64>::read_csv(out.as_slice()).unwrap();
        assert_eq!(back.bin_edges(), d.bin_edges());
        assert!(back.mass().iter().zip(d.mass()).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(back.sample_count(), 0);
    }

    #[test]
    fn csv_with_gaps_is_rejected() {
        let text = "bin_left,bin_right,mass\n0,1,0.5\n2,3,0.5\n";
        assert!(EmpiricalDistribution::<f64>::read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn counts_waits_into_unit_bins() {
        let d = EmpiricalDistribution::<f64>::from_samples(&[0.0, 0.5, 1.0], 1.0).unwrap();
        assert_eq!(d.bin_edges(), &[0.0, 1.0, 2.0]);
        assert!((d.mass()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.mass()[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.sample_count(), 3);
    }

    #[test]
    fn single_zero_sample() {
        let d = EmpiricalDistribution::from_samples(&[0.0], 0.25).unwrap();
        assert_eq!(d.mass(), &[1.0]);
        assert_eq!(d.bin_edges(), &[0.0, 0.25]);
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(EmpiricalDistribution::new(vec![0.0, 1.0], vec![0.9], 1).is_err());
        assert!(EmpiricalDistribution::new(vec![0.0, 0.0], vec![1.0], 1).is_err());
        assert!(EmpiricalDistribution::new(vec![0.0, 1.0, 2.0], vec![1.0], 1).is_err());
        assert!(EmpiricalDistribution::<f64>::from_samples(&[], 1.0).is_err());
        assert!(EmpiricalDistribution::from_samples(&[-1.0], 1.0).is_err());
        assert!(EmpiricalDistribution::from_samples(&[1.0], 0.0).is_err());
    }

    #[test]
    fn json_shape_and_validation() {
        let d = EmpiricalDistribution::from_samples(&[0.0, 1.5], 1.0).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"edges":[0.0,1.0,2.0],"mass":[0.5,0.5],"n":2}"#);
        let back: EmpiricalDistribution<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"edges":[0.0,1.0],"mass":[0.4],"n":2}"#;
        assert!(serde_json::from_str::<EmpiricalDistribution<f64>>(bad).is_err());
    }

    #[test]
    fn csv_layout() {
        let d = EmpiricalDistribution::from_samples(&[0.1, 0.2, 0.3, 1.1], 1.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "bin_left,bin_right,mass\n0,1,0.75\n1,2,0.25\n"
        );
    }

    #[test]
    fn histograms_merge_by_counts() {
        let mut a = Histogram::new(1.0).unwrap();
        let mut b = Histogram::new(1.0).unwrap();
        a.add(0.2).unwrap();
        b.add(3.5).unwrap();
        b.add(0.7).unwrap();
        a.merge(&b).unwrap();
        assert_eq!(a.counts(), &[2, 0, 0, 1]);
        assert!(a.merge(&Histogram::new(0.5).unwrap()).is_err());
    }

    #[test]
    fn padding_keeps_mass() {
        let d = EmpiricalDistribution::from_samples(&[0.0, 1.0], 1.0).unwrap();
        let p = d.padded_to(4).unwrap();
        assert_eq!(p.mass(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(p.uniform_width(), Some(1.0));
        assert!(d.padded_to(1).is_err());
    }
}
