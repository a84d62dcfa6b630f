//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type Q = Ratio<i64>;

/// Event-driven single-server FIFO queue with explicit busy/idle bookkeeping.
/// Returns each customer's wait (service start minus arrival).
pub fn event_list_waits(arrivals: &[Q], services: &[Q]) -> Vec<Q> {
    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    enum Kind {
        // departures first at equal times
        Departure,
        Arrival(usize),
    }
    let mut events: BinaryHeap<Reverse<(Q, Kind)>> = BinaryHeap::new();
    for (k, &a) in arrivals.iter().enumerate() {
        events.push(Reverse((a, Kind::Arrival(k))));
    }
    let mut waits = vec![Q::from_integer(-1); arrivals.len()];
    let mut busy = false;
    let mut line: VecDeque<usize> = VecDeque::new();
    while let Some(Reverse((now, kind))) = events.pop() {
        match kind {
            Kind::Arrival(k) => {
                if busy {
                    line.push_back(k);
                } else {
                    busy = true;
                    waits[k] = Q::from_integer(0);
                    events.push(Reverse((now + services[k], Kind::Departure)));
                }
            }
            Kind::Departure => match line.pop_front() {
                Some(k) => {
                    waits[k] = now - arrivals[k];
                    events.push(Reverse((now + services[k], Kind::Departure)));
                }
                None => busy = false,
            },
        }
    }
    waits
}

/// Random sorted rational arrivals and positive rational services, with
/// coarse denominators so ties and exact idle gaps occur.
pub fn random_instance(rng: &mut ChaCha20Rng, max_customers: usize) -> (Vec<Q>, Vec<Q>) {
    let n = rng.random_range(1..=max_customers);
    let den = rng.random_range(1..=6i64);
    let mut t = Q::from_integer(rng.random_range(-5..5));
    let mut arrivals = Vec::with_capacity(n);
    for _ in 0..n {
        t += Q::new(rng.random_range(0..=8), den);
        arrivals.push(t);
    }
    let services = (0..n)
        .map(|_| Q::new(rng.random_range(1..=12), rng.random_range(1..=4)))
        .collect();
    (arrivals, services)
}

pub fn test_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Composite 5-point Gauss-Legendre rule on `[a, b]` with `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for k in 0..5 {
            s += W[k] * f(mid + 0.5 * h * X[k]);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Integral over consecutive breakpoints, so kinks sit on panel boundaries.
pub fn integrate_pieces(f: impl Fn(f64) -> f64 + Copy, breaks: &[f64], panels: usize) -> f64 {
    breaks.windows(2).map(|w| integrate(f, w[0], w[1], panels)).sum()
}

/// CDF of the uniform law with mean 0 and standard deviation `sigma`,
/// written out independently of the library.
pub fn uniform_cdf(sigma: f64, x: f64) -> f64 {
    let h = sigma * 3f64.sqrt();
    ((x + h) / (2.0 * h)).clamp(0.0, 1.0)
}

/// `-Σᵢ pᵢ(t, t+T) pᵢ(t+T, t+2T)` for uniform delays with λ = γ = 1, summed
/// over `i ∈ [lo, hi]`.
pub fn uniform_covariance_oracle(sigma: f64, t: f64, slot: f64, lo: i64, hi: i64) -> f64 {
    let p = |i: i64, a: f64, b: f64| uniform_cdf(sigma, b - i as f64) - uniform_cdf(sigma, a - i as f64);
    -(lo..=hi)
        .map(|i| p(i, t, t + slot) * p(i, t + slot, t + 2.0 * slot))
        .sum::<f64>()
}

/// Poisson(mean) pmf on `0..len`, by logs.
pub fn poisson_pmf_table(mean: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| {
            let log_fact: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
            (k as f64 * mean.ln() - mean - log_fact).exp()
        })
        .collect()
}
