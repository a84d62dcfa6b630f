//! Arrival streams: pre-scheduled random arrivals, their thinned variant, and
//! the homogeneous Poisson baseline.
//!
//! The i-th scheduled customer arrives at `i/λ + ξᵢ`, where the `ξᵢ` are
//! i.i.d. zero-mean delays (see [`DelaySpec`]). With thinning each scheduled
//! customer is independently kept with probability `γ`.

mod delay;

use std::io::Write;
use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use delay::{DelayFamily, DelaySpec};

use crate::error::{Error, Result};
use crate::format::significant;
use crate::rng::Seed;
use crate::scalar::Real;

/// Default per-index probability of missing an in-horizon arrival.
pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-12;

/// Upper limit on the number of scheduled indices one generation may visit.
pub const MAX_INDEX_WINDOW: i64 = 1 << 32;

/// Time interval `(start, end]`: open on the left, closed on the right, like
/// the slot windows used for counting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon<F> {
    pub start: F,
    pub end: F,
}

impl<F: Real> Horizon<F> {
    pub fn new(start: F, end: F) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end < start {
            return Err(Error::param(
                "horizon",
                format!("need finite start <= end, got ({start}, {end}]"),
            ));
        }
        Ok(Horizon { start, end })
    }

    pub fn contains(&self, t: F) -> bool {
        t > self.start && t <= self.end
    }

    pub fn length(&self) -> F {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn covers(&self, other: &Horizon<F>) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Pre-scheduled random arrival process, optionally thinned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec<F> {
    /// Scheduled arrivals per unit time before thinning.
    pub lambda: F,
    pub delay: DelaySpec<F>,
    /// Probability that a scheduled customer actually shows up.
    pub gamma: F,
    pub horizon: Horizon<F>,
    pub truncation_tolerance: F,
}

impl<F: Real> ProcessSpec<F> {
    pub fn new(lambda: F, delay: DelaySpec<F>, gamma: F, horizon: Horizon<F>) -> Result<Self> {
        let spec = ProcessSpec {
            lambda,
            delay,
            gamma,
            horizon,
            truncation_tolerance: F::lit(DEFAULT_TRUNCATION_TOLERANCE),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_truncation_tolerance(mut self, tolerance: F) -> Self {
        self.truncation_tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > F::zero()) {
            return Err(Error::param(
                "lambda",
                format!("must be finite and > 0, got {}", self.lambda),
            ));
        }
        if !(self.gamma > F::zero() && self.gamma <= F::one()) {
            return Err(Error::param("gamma", format!("must lie in (0, 1], got {}", self.gamma)));
        }
        self.delay.validate()?;
        Horizon::new(self.horizon.start, self.horizon.end)?;
        Ok(())
    }

    /// Retained arrivals per unit time, `γλ`. Against a deterministic server
    /// of rate `λ` this is also the traffic intensity times `λ`.
    pub fn retained_rate(&self) -> F {
        self.gamma * self.lambda
    }

    pub fn traffic_intensity(&self) -> F {
        self.gamma
    }

    /// Scheduled indices whose arrival can land in `window` up to the
    /// truncation tolerance.
    pub fn index_window(&self, window: &Horizon<F>) -> Result<(i64, i64)> {
        let bound = self.delay.tail_bound(self.truncation_tolerance)?;
        let lo = ((window.start - bound) * self.lambda).ceil();
        let hi = ((window.end + bound) * self.lambda).floor();
        let (lo, hi) = match (lo.to_i64(), hi.to_i64()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                return Err(Error::Truncation(format!(
                    "index window [{lo}, {hi}] does not fit in 64-bit indices"
                )))
            }
        };
        if hi.saturating_sub(lo) > MAX_INDEX_WINDOW {
            return Err(Error::Truncation(format!(
                "index window of {} scheduled customers exceeds the limit {}",
                hi.saturating_sub(lo),
                MAX_INDEX_WINDOW
            )));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamOrigin<F> {
    Psra(ProcessSpec<F>),
    Poisson {
        rate: F,
        horizon: Horizon<F>,
    },
    /// Epochs supplied directly by the caller.
    External,
}

impl<F: Real> StreamOrigin<F> {
    pub fn horizon(&self) -> Option<Horizon<F>> {
        match self {
            StreamOrigin::Psra(spec) => Some(spec.horizon),
            StreamOrigin::Poisson { horizon, .. } => Some(*horizon),
            StreamOrigin::External => None,
        }
    }
}

/// One realization of an arrival process on its horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalStream<F> {
    epochs: Vec<F>,
    source_index: Vec<i64>,
    seed: Option<Seed>,
    origin: StreamOrigin<F>,
}

impl<F: Real> ArrivalStream<F> {
    /// Wraps caller-provided epochs. They are sorted; ties keep input order.
    pub fn from_epochs(mut epochs: Vec<F>) -> Result<Self> {
        if let Some(bad) = epochs.iter().find(|t| !t.is_finite()) {
            return Err(Error::param("epochs", format!("non-finite epoch {bad}")));
        }
        epochs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let source_index = (1..=epochs.len() as i64).collect();
        Ok(ArrivalStream {
            epochs,
            source_index,
            seed: None,
            origin: StreamOrigin::External,
        })
    }

    pub fn epochs(&self) -> &[F] {
        &self.epochs
    }

    pub fn source_index(&self) -> &[i64] {
        &self.source_index
    }

    pub fn seed(&self) -> Option<Seed> {
        self.seed
    }

    pub fn origin(&self) -> &StreamOrigin<F> {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    /// Number of arrivals in `(start, end]`.
    pub fn count_in(&self, window: &Horizon<F>) -> usize {
        let lo = self.epochs.partition_point(|&t| t <= window.start);
        let hi = self.epochs.partition_point(|&t| t <= window.end);
        hi.saturating_sub(lo)
    }

    /// Keeps only the first `n` arrivals.
    pub fn truncate(&mut self, n: usize) {
        self.epochs.truncate(n);
        self.source_index.truncate(n);
    }

    /// CSV with header `epoch,source_index`, epochs to 9 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epoch", "source_index"])?;
        for (t, i) in self.epochs.iter().zip(&self.source_index) {
            w.write_record([significant(t.to_f64().unwrap_or(f64::NAN), 9), i.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Realizes the (thinned) pre-scheduled process on `spec.horizon`.
pub fn generate_psra<F: Real>(spec: &ProcessSpec<F>, seed: impl Into<Seed>) -> Result<ArrivalStream<F>> {
    let seed = seed.into();
    let mut rng = seed.rng();
    let mut stream = generate_psra_with(spec, &mut rng)?;
    stream.seed = Some(seed);
    Ok(stream)
}

/// As [`generate_psra`], drawing from a caller-owned generator.
///
/// Every scheduled index in the window consumes one delay draw and one
/// retention draw, in index order, whatever `γ` is.
pub fn generate_psra_with<F: Real, R: RngCore + ?Sized>(
    spec: &ProcessSpec<F>,
    rng: &mut R,
) -> Result<ArrivalStream<F>> {
    spec.validate()?;
    let horizon = spec.horizon;
    let origin = StreamOrigin::Psra(*spec);
    if horizon.is_empty() {
        return Ok(ArrivalStream {
            epochs: Vec::new(),
            source_index: Vec::new(),
            seed: None,
            origin,
        });
    }
    let (lo, hi) = spec.index_window(&horizon)?;
    let expected = ((horizon.length() * spec.retained_rate()).to_f64().unwrap_or(0.0) * 1.05) as usize + 16;
    let mut pairs: Vec<(F, i64)> = Vec::with_capacity(expected);
    for i in lo..=hi {
        let delay = spec.delay.sample(rng);
        let keep = F::unit_open(rng) < spec.gamma;
        let t = F::lit(i as f64) / spec.lambda + delay;
        if keep && horizon.contains(t) {
            pairs.push((t, i));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite epochs").then(a.1.cmp(&b.1)));
    let (epochs, source_index) = pairs.into_iter().unzip();
    Ok(ArrivalStream {
        epochs,
        source_index,
        seed: None,
        origin,
    })
}

/// Homogeneous Poisson process of intensity `rate` on `horizon`.
pub fn generate_poisson<F: Real>(rate: F, horizon: Horizon<F>, seed: impl Into<Seed>) -> Result<ArrivalStream<F>> {
    let seed = seed.into();
    let mut rng = seed.rng();
    let mut stream = generate_poisson_with(rate, horizon, &mut rng)?;
    stream.seed = Some(seed);
    Ok(stream)
}

pub fn generate_poisson_with<F: Real, R: RngCore + ?Sized>(
    rate: F,
    horizon: Horizon<F>,
    rng: &mut R,
) -> Result<ArrivalStream<F>> {
    if !(rate.is_finite() && rate > F::zero()) {
        return Err(Error::param("rate", format!("must be finite and > 0, got {rate}")));
    }
    let horizon = Horizon::new(horizon.start, horizon.end)?;
    let mut epochs = Vec::new();
    let mut t = horizon.start;
    loop {
        t = t - F::unit_open(rng).ln() / rate;
        if t > horizon.end {
            break;
        }
        // Skip a draw landing exactly on the open left end.
        if horizon.contains(t) {
            epochs.push(t);
        }
    }
    let source_index = (1..=epochs.len() as i64).collect();
    Ok(ArrivalStream {
        epochs,
        source_index,
        seed: None,
        origin: StreamOrigin::Poisson { rate, horizon },
    })
}
