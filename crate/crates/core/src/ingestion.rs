//! Reduction of raw flight records to queue-time samples.
//!
//! For every flight the approaching time is `landing - entry`. Within one
//! entry point the shortest approaching time is taken as the unimpeded
//! transit, and each flight's excess over it is its time in queue. Samples
//! from all entry points are then pooled.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, NaiveTime, TimeDelta};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::significant;
use crate::queueing::{EmpiricalDistribution, Histogram};

/// Entry points retained by the reference Heathrow reduction.
pub const HEATHROW_ENTRY_POINTS: [&str; 3] = ["LOGAN", "ALESO", "NUGRA"];

/// Minutes per landing at 41 landings per hour.
pub const HEATHROW_SERVICE_MINUTES: f64 = 60.0 / 41.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightRecord {
    pub flight_id: String,
    pub entry_point: String,
    pub entry_epoch: NaiveDateTime,
    pub landing_epoch: NaiveDateTime,
}

impl FlightRecord {
    pub fn approaching_time(&self) -> TimeDelta {
        self.landing_epoch - self.entry_epoch
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueSample {
    pub flight_id: String,
    pub entry_point: String,
    pub queue_time: TimeDelta,
}

impl QueueSample {
    pub fn minutes(&self) -> f64 {
        self.queue_time.num_milliseconds() as f64 / 60_000.0
    }
}

/// A malformed input row; `line` is 1-based and counts the header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParsedFlights {
    pub records: Vec<FlightRecord>,
    pub errors: Vec<RowError>,
}

#[derive(Debug, Deserialize)]
struct RawFlight {
    flight_id: String,
    entry_point: String,
    entry_epoch: String,
    landing_epoch: String,
}

/// ISO-8601 date-time, with `T` or space separator and optional fractional
/// seconds. A UTC offset, if present, is dropped: times are wall clock.
pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_local());
    }
    [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ]
    .iter()
    .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
}

/// Reads `flight_id,entry_point,entry_epoch,landing_epoch` rows. Bad rows are
/// reported in [`ParsedFlights::errors`] and the rest are kept.
pub fn parse_flights(path: &Path) -> Result<ParsedFlights> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_flights_from_reader(file)
}

pub fn parse_flights_from_reader<R: Read>(reader: R) -> Result<ParsedFlights> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for col in ["flight_id", "entry_point", "entry_epoch", "landing_epoch"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::param("flights", format!("missing column `{col}`")));
        }
    }
    let mut out = ParsedFlights::default();
    for row in rdr.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let parsed = row
            .deserialize::<RawFlight>(Some(&headers))
            .map_err(|e| e.to_string())
            .and_then(validate_row);
        match parsed {
            Ok(rec) => out.records.push(rec),
            Err(message) => out.errors.push(RowError { line, message }),
        }
    }
    Ok(out)
}

fn validate_row(raw: RawFlight) -> std::result::Result<FlightRecord, String> {
    if raw.flight_id.is_empty() {
        return Err("empty flight_id".into());
    }
    if raw.entry_point.is_empty() {
        return Err(format!("flight {}: empty entry_point", raw.flight_id));
    }
    let entry = parse_timestamp(&raw.entry_epoch)
        .ok_or_else(|| format!("flight {}: bad entry_epoch `{}`", raw.flight_id, raw.entry_epoch))?;
    let landing = parse_timestamp(&raw.landing_epoch)
        .ok_or_else(|| format!("flight {}: bad landing_epoch `{}`", raw.flight_id, raw.landing_epoch))?;
    if landing < entry {
        return Err(format!(
            "flight {}: landing {landing} precedes entry {entry}",
            raw.flight_id
        ));
    }
    Ok(FlightRecord {
        flight_id: raw.flight_id,
        entry_point: raw.entry_point,
        entry_epoch: entry,
        landing_epoch: landing,
    })
}

/// Time-of-day window `[start, end)` within a single day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyWindow {
    pub start: NaiveTime,
    pub end: NaiveTime,
}

impl DailyWindow {
    pub fn new(start: NaiveTime, end: NaiveTime) -> Result<Self> {
        if start >= end {
            return Err(Error::param("window", format!("start {start} must precede end {end}")));
        }
        Ok(DailyWindow { start, end })
    }

    /// Parses `HH:MM-HH:MM`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| Error::param("window", format!("expected HH:MM-HH:MM, got `{s}`")))?;
        let time = |x: &str| {
            NaiveTime::parse_from_str(x.trim(), "%H:%M")
                .or_else(|_| NaiveTime::parse_from_str(x.trim(), "%H:%M:%S"))
                .map_err(|_| Error::param("window", format!("bad time `{x}`")))
        };
        DailyWindow::new(time(a)?, time(b)?)
    }

    pub fn contains(&self, t: NaiveTime) -> bool {
        self.start <= t && t < self.end
    }
}

/// 06:00-10:30 and 16:00-20:00.
pub fn heathrow_windows() -> Vec<DailyWindow> {
    let hm = |h, m| NaiveTime::from_hms_opt(h, m, 0).expect("valid time");
    vec![
        DailyWindow {
            start: hm(6, 0),
            end: hm(10, 30),
        },
        DailyWindow {
            start: hm(16, 0),
            end: hm(20, 0),
        },
    ]
}

/// Checks that windows do not overlap.
pub fn validate_windows(windows: &[DailyWindow]) -> Result<()> {
    let mut sorted = windows.to_vec();
    sorted.sort_by_key(|w| w.start);
    if let Some(w) = sorted.windows(2).find(|w| w[1].start < w[0].end) {
        return Err(Error::param(
            "windows",
            format!("{}-{} overlaps {}-{}", w[0].start, w[0].end, w[1].start, w[1].end),
        ));
    }
    Ok(())
}

/// Keeps records that land inside one of `windows` and enter through one of
/// `entry_points`.
pub fn filter_records<S: AsRef<str>>(
    records: &[FlightRecord],
    windows: &[DailyWindow],
    entry_points: &[S],
) -> Vec<FlightRecord> {
    let allowed: BTreeSet<&str> = entry_points.iter().map(|s| s.as_ref()).collect();
    records
        .iter()
        .filter(|r| allowed.contains(r.entry_point.as_str()))
        .filter(|r| {
            let tod = r.landing_epoch.time();
            windows.iter().any(|w| w.contains(tod))
        })
        .cloned()
        .collect()
}

/// Queue time of each record: its approaching time minus the minimum
/// approaching time over records with the same entry point. Output order
/// follows input order.
pub fn queue_times(records: &[FlightRecord]) -> Vec<QueueSample> {
    let mut minimum: BTreeMap<&str, TimeDelta> = BTreeMap::new();
    for r in records {
        let a = r.approaching_time();
        minimum
            .entry(r.entry_point.as_str())
            .and_modify(|m| *m = (*m).min(a))
            .or_insert(a);
    }
    records
        .iter()
        .map(|r| QueueSample {
            flight_id: r.flight_id.clone(),
            entry_point: r.entry_point.clone(),
            queue_time: r.approaching_time() - minimum[r.entry_point.as_str()],
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficIntensity {
    pub rho: f64,
    /// Set when `rho > 1`: the queue has no steady state.
    pub unstable: bool,
}

/// `ρ = average arrivals per hour / maximum landings per hour`.
pub fn traffic_intensity(avg_arrivals_per_hour: f64, max_landings_per_hour: f64) -> Result<TrafficIntensity> {
    for (name, v) in [
        ("avg_arrivals_per_hour", avg_arrivals_per_hour),
        ("max_landings_per_hour", max_landings_per_hour),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
        }
    }
    let rho = avg_arrivals_per_hour / max_landings_per_hour;
    Ok(TrafficIntensity {
        rho,
        unstable: rho > 1.0,
    })
}

/// Pooled queue times in service-time units (`minutes / service_minutes`),
/// binned on `{0, w, 2w, ...}`.
pub fn queue_time_distribution(
    samples: &[QueueSample],
    service_minutes: f64,
    bin_width: f64,
) -> Result<EmpiricalDistribution<f64>> {
    if !(service_minutes.is_finite() && service_minutes > 0.0) {
        return Err(Error::param(
            "service_minutes",
            format!("must be > 0, got {service_minutes}"),
        ));
    }
    let mut hist = Histogram::new(bin_width)?;
    for s in samples {
        hist.add(s.minutes() / service_minutes)?;
    }
    hist.to_distribution()
}

/// CSV with header `flight_id,entry_point,queue_time_minutes`.
pub fn write_queue_times<W: std::io::Write>(samples: &[QueueSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["flight_id", "entry_point", "queue_time_minutes"])?;
    for s in samples {
        w.write_record([
            s.flight_id.as_str(),
            s.entry_point.as_str(),
            &significant(s.minutes(), 9),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
