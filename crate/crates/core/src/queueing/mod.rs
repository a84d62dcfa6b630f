//! Single-server FIFO queue driven by an arrival stream.

mod distribution;
mod service;

use std::cmp::Ordering;
use std::io::Write;
use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use distribution::{EmpiricalDistribution, Histogram};
pub use service::{ServiceSampler, ServiceSpec, DEFAULT_SPREAD_RATIO};

use crate::arrivals::ArrivalStream;
use crate::error::{Error, Result};
use crate::format::significant;
use crate::rng::Seed;
use crate::scalar::{Real, Scalar};

/// Minimum number of customers discarded by [`Warmup::for_load`].
pub const MIN_WARMUP_CUSTOMERS: usize = 100_000;

/// Default wait-histogram bin width, in service times.
pub const DEFAULT_BIN_WIDTH: f64 = 0.25;

/// Initial stretch of a trace excluded from statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warmup<F> {
    None,
    /// The first `n` customers.
    Customers(usize),
    /// Customers arriving strictly before this epoch.
    Until(F),
}

impl<F: Real> Warmup<F> {
    /// `max(10⁵, 10 / (1 - ρ)²)` customers; relaxation of a loaded queue
    /// scales like `(1 - ρ)⁻²`.
    pub fn for_load(rho: f64) -> Self {
        let relax = 10.0 / ((1.0 - rho) * (1.0 - rho));
        let n = if rho >= 1.0 || !relax.is_finite() || relax >= usize::MAX as f64 {
            usize::MAX
        } else {
            (relax.ceil() as usize).max(MIN_WARMUP_CUSTOMERS)
        };
        Warmup::Customers(n)
    }

    fn count(&self, arrivals: &[F]) -> usize {
        match *self {
            Warmup::None => 0,
            Warmup::Customers(n) => n.min(arrivals.len()),
            Warmup::Until(t) => arrivals.partition_point(|&a| a < t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CustomerRecord<T> {
    pub arrival: T,
    pub wait: T,
    pub service: T,
    pub departure: T,
}

/// Per-customer outcome of one replication, in arrival order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueTrace<T> {
    records: Vec<CustomerRecord<T>>,
    warmup_count: usize,
}

impl<T: Scalar> QueueTrace<T> {
    /// Runs the recursion on sorted `arrivals` with matching `services`.
    pub fn from_parts(arrivals: &[T], services: &[T], warmup_count: usize) -> Result<Self> {
        if arrivals.len() != services.len() {
            return Err(Error::param(
                "services",
                format!("{} services for {} arrivals", services.len(), arrivals.len()),
            ));
        }
        if arrivals
            .windows(2)
            .any(|w| matches!(w[0].partial_cmp(&w[1]), None | Some(Ordering::Greater)))
        {
            return Err(Error::param("arrivals", "arrival epochs must be sorted"));
        }
        if services
            .iter()
            .any(|s| s.partial_cmp(&T::zero()) != Some(Ordering::Greater))
        {
            return Err(Error::param("services", "service durations must be > 0"));
        }
        let waits = lindley_waits(arrivals, services);
        let records = arrivals
            .iter()
            .zip(services)
            .zip(waits)
            .map(|((&arrival, &service), wait)| CustomerRecord {
                arrival,
                wait,
                service,
                departure: arrival + wait + service,
            })
            .collect();
        Ok(QueueTrace {
            records,
            warmup_count: warmup_count.min(arrivals.len()),
        })
    }

    pub fn records(&self) -> &[CustomerRecord<T>] {
        &self.records
    }

    pub fn warmup_count(&self) -> usize {
        self.warmup_count
    }

    /// Records past the warm-up.
    pub fn steady(&self) -> &[CustomerRecord<T>] {
        &self.records[self.warmup_count..]
    }

    pub fn waits(&self) -> impl Iterator<Item = T> + '_ {
        self.records.iter().map(|r| r.wait)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Customers still in the system when each customer arrives (those ahead
    /// of it, excluding itself).
    pub fn customers_ahead(&self) -> Vec<usize> {
        // FIFO departures are nondecreasing, so one pointer suffices.
        let mut gone = 0;
        self.records
            .iter()
            .enumerate()
            .map(|(n, r)| {
                while gone < n && self.records[gone].departure <= r.arrival {
                    gone += 1;
                }
                n - gone
            })
            .collect()
    }

    /// Idle time of the server between the first arrival and last departure.
    pub fn idle_time(&self) -> T {
        let mut idle = T::zero();
        for w in self.records.windows(2) {
            if w[1].arrival > w[0].departure {
                idle = idle + (w[1].arrival - w[0].departure);
            }
        }
        idle
    }
}

impl<F: Real> QueueTrace<F> {
    /// CSV with header `arrival,wait,service,departure`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["arrival", "wait", "service", "departure"])?;
        let f = |x: F| significant(x.to_f64().unwrap_or(f64::NAN), 9);
        for r in &self.records {
            w.write_record([f(r.arrival), f(r.wait), f(r.service), f(r.departure)])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn steady_mean_wait(&self) -> Option<F> {
        let steady = self.steady();
        if steady.is_empty() {
            return None;
        }
        let sum = steady.iter().fold(F::zero(), |acc, r| acc + r.wait);
        Some(sum / F::from_count(steady.len()))
    }
}

/// Waiting times of a FIFO single server that is empty at the first arrival:
/// `W₁ = 0`, `W₍ₙ₊₁₎ = max(0, Wₙ + Sₙ - (A₍ₙ₊₁₎ - Aₙ))`.
pub fn lindley_waits<T: Scalar>(arrivals: &[T], services: &[T]) -> Vec<T> {
    let mut waits = Vec::with_capacity(arrivals.len());
    let mut wait = T::zero();
    for n in 0..arrivals.len() {
        if n > 0 {
            let next = wait + services[n - 1] - (arrivals[n] - arrivals[n - 1]);
            wait = if next > T::zero() { next } else { T::zero() };
        }
        waits.push(wait);
    }
    waits
}

/// Feeds `arrivals` through one server with service law `service`; service
/// durations are drawn from the substream named by `seed`.
pub fn simulate_queue<F: Real>(
    arrivals: &ArrivalStream<F>,
    service: &ServiceSpec<F>,
    warmup: Warmup<F>,
    seed: impl Into<Seed>,
) -> Result<QueueTrace<F>> {
    let mut rng = seed.into().rng();
    simulate_queue_with(arrivals.epochs(), service, warmup, &mut rng)
}

pub fn simulate_queue_with<F: Real, R: RngCore + ?Sized>(
    arrivals: &[F],
    service: &ServiceSpec<F>,
    warmup: Warmup<F>,
    rng: &mut R,
) -> Result<QueueTrace<F>> {
    let sampler = service.sampler()?;
    let services: Vec<F> = (0..arrivals.len()).map(|_| sampler.sample(rng)).collect();
    QueueTrace::from_parts(arrivals, &services, warmup.count(arrivals))
}

/// Normalized histogram of the post-warm-up waits on `{0, w, 2w, ...}`.
pub fn wait_distribution<F: Real>(trace: &QueueTrace<F>, bin_width: F) -> Result<EmpiricalDistribution<F>> {
    wait_histogram(trace, bin_width)?.to_distribution()
}

pub fn wait_histogram<F: Real>(trace: &QueueTrace<F>, bin_width: F) -> Result<Histogram<F>> {
    let mut hist = Histogram::new(bin_width)?;
    if trace.steady().is_empty() {
        return Err(Error::NoData(format!("all {} records are warm-up", trace.len())));
    }
    for r in trace.steady() {
        hist.add(r.wait)?;
    }
    Ok(hist)
}

/// Histogram of the number of customers found ahead on arrival, unit bins.
pub fn queue_length_histogram<F: Real>(trace: &QueueTrace<F>) -> Result<Histogram<F>> {
    let mut hist = Histogram::new(F::one())?;
    if trace.steady().is_empty() {
        return Err(Error::NoData(format!("all {} records are warm-up", trace.len())));
    }
    for &k in &trace.customers_ahead()[trace.warmup_count()..] {
        hist.add(F::from_count(k))?;
    }
    Ok(hist)
}

/// Right-continuous integer step function of time.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    times: Vec<T>,
    values: Vec<u64>,
}

impl<T: Scalar> StepFunction<T> {
    /// Value at `t`: zero before the first jump.
    pub fn value_at(&self, t: T) -> u64 {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            0
        } else {
            self.values[k - 1]
        }
    }

    /// Jump epochs and the value taken from each one on.
    pub fn steps(&self) -> impl Iterator<Item = (T, u64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// Number in system over time: +1 at each arrival, -1 at each departure.
pub fn queue_length_process<T: Scalar>(trace: &QueueTrace<T>) -> StepFunction<T> {
    let mut events: Vec<(T, i64)> = Vec::with_capacity(2 * trace.len());
    for r in trace.records() {
        events.push((r.arrival, 1));
        events.push((r.departure, -1));
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("ordered epochs"));
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut level: i64 = 0;
    let mut k = 0;
    while k < events.len() {
        let t = events[k].0;
        while k < events.len() && events[k].0 == t {
            level += events[k].1;
            k += 1;
        }
        debug_assert!(level >= 0, "negative number in system");
        times.push(t);
        values.push(level as u64);
    }
    StepFunction { times, values }
}
