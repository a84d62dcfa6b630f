use std::collections::BTreeMap;
use std::path::PathBuf;

use proptest::prelude::*;
use psra::ingestion::{
    filter_records, heathrow_windows, parse_flights, parse_flights_from_reader, queue_time_distribution, queue_times,
    write_queue_times, HEATHROW_ENTRY_POINTS, HEATHROW_SERVICE_MINUTES,
};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/heathrow_12.csv")
}

const EXPECTED_MINUTES: [(&str, f64); 12] = [
    ("BA101", 5.0),
    ("BA102", 0.0),
    ("BA103", 12.0),
    ("BA104", 7.5),
    ("VS201", 0.0),
    ("VS202", 7.0),
    ("VS203", 22.0),
    ("VS204", 9.5),
    ("LH301", 4.0),
    ("LH302", 4.0),
    ("LH303", 0.0),
    ("LH304", 3.0),
];

#[test]
fn fixture_reduces_to_hand_computed_queue_times() {
    let parsed = parse_flights(&fixture()).unwrap();
    assert!(parsed.errors.is_empty(), "{:?}", parsed.errors);
    let kept = filter_records(&parsed.records, &heathrow_windows(), &HEATHROW_ENTRY_POINTS);
    assert_eq!(kept.len(), 12);
    let samples = queue_times(&kept);
    let got: Vec<(&str, f64)> = samples.iter().map(|s| (s.flight_id.as_str(), s.minutes())).collect();
    assert_eq!(got, EXPECTED_MINUTES.to_vec());

    let mut zeros: BTreeMap<&str, usize> = BTreeMap::new();
    for s in samples.iter().filter(|s| s.minutes() == 0.0) {
        *zeros.entry(s.entry_point.as_str()).or_default() += 1;
    }
    assert_eq!(zeros.len(), 3);
    assert!(zeros.values().all(|&n| n == 1));
}

#[test]
fn queue_times_csv_layout() {
    let parsed = parse_flights(&fixture()).unwrap();
    let samples = queue_times(&parsed.records);
    let mut out = Vec::new();
    write_queue_times(&samples[..4], &mut out).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "flight_id,entry_point,queue_time_minutes\nBA101,LOGAN,5\nBA102,LOGAN,0\nBA103,LOGAN,12\nBA104,LOGAN,7.5\n"
    );
}

#[test]
fn pooled_distribution_is_in_service_units() {
    let parsed = parse_flights(&fixture()).unwrap();
    let samples = queue_times(&parsed.records);
    let d = queue_time_distribution(&samples, HEATHROW_SERVICE_MINUTES, 1.0).unwrap();
    assert_eq!(d.sample_count(), 12);
    // 22 minutes is 15.03 service times
    assert_eq!(d.len(), 16);
    assert_eq!(d.mass()[0], 3.0 / 12.0);
    assert_eq!(d.mass()[15], 1.0 / 12.0);
    assert!((d.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn filtering_drops_other_entry_points_and_out_of_window_landings() {
    let extra = "\
BZ901,BUZAD,2010-07-15T06:10:00,2010-07-15T06:31:00
XX902,LOGAN,2010-07-15T10:05:00,2010-07-15T10:30:00
XX903,ALESO,2010-07-15T19:30:00,2010-07-15T20:00:00
XX904,NUGRA,2010-07-15T12:00:00,2010-07-15T12:10:00
";
    let mut text = std::fs::read_to_string(fixture()).unwrap();
    text.push_str(extra);
    let parsed = parse_flights_from_reader(text.as_bytes()).unwrap();
    assert_eq!(parsed.records.len(), 16);
    let kept = filter_records(&parsed.records, &heathrow_windows(), &HEATHROW_ENTRY_POINTS);
    let ids: Vec<&str> = kept.iter().map(|r| r.flight_id.as_str()).collect();
    assert_eq!(ids, EXPECTED_MINUTES.iter().map(|e| e.0).collect::<Vec<_>>());
}

#[test]
fn malformed_rows_are_reported_with_line_numbers() {
    let text = "\
flight_id,entry_point,entry_epoch,landing_epoch
A1,LOGAN,2010-07-15T06:05:00,2010-07-15T06:30:00
A2,LOGAN,yesterday,2010-07-15T06:30:00
A3,LOGAN,2010-07-15T06:35:00,2010-07-15T06:30:00
A4,LOGAN,2010-07-15T06:05:00
A5,ALESO,2010-07-15T07:05:00,2010-07-15T07:30:00
";
    let parsed = parse_flights_from_reader(text.as_bytes()).unwrap();
    assert_eq!(parsed.records.len(), 2);
    let lines: Vec<u64> = parsed.errors.iter().map(|e| e.line).collect();
    assert_eq!(lines, vec![3, 4, 5]);
}

#[test]
fn missing_column_is_an_error() {
    let text = "flight_id,entry_point,landing_epoch\nA1,LOGAN,2010-07-15T06:30:00\n";
    let err = parse_flights_from_reader(text.as_bytes()).unwrap_err();
    assert_eq!(err.kind(), "invalid_parameter");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn queue_times_do_not_depend_on_row_order(order in Just((0..12).collect::<Vec<usize>>()).prop_shuffle()) {
        let records = parse_flights(&fixture()).unwrap().records;
        let shuffled: Vec<_> = order.iter().map(|&k| records[k].clone()).collect();
        let mut a: Vec<(String, i64)> = queue_times(&records)
            .into_iter()
            .map(|s| (s.flight_id, s.queue_time.num_milliseconds()))
            .collect();
        let mut b: Vec<(String, i64)> = queue_times(&shuffled)
            .into_iter()
            .map(|s| (s.flight_id, s.queue_time.num_milliseconds()))
            .collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }
}
