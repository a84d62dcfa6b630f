use psra::analytics::{analytic_covariance, total_variation};
use psra::arrivals::generate_psra;
use psra::queueing::{simulate_queue, wait_distribution, ServiceSpec, Warmup};
use psra::{
    DelayFamily, DelaySpec, DelaySpecF32, EmpiricalDistributionF32, Horizon, HorizonF32, ProcessSpec, ProcessSpecF32,
    Purpose, Seed, SlotPair, SlotPairF32,
};

#[test]
fn f32_pipeline_runs_end_to_end() {
    let delay = DelaySpecF32::new(DelayFamily::Uniform, 5.0).unwrap();
    let spec = ProcessSpecF32::new(1.0, delay, 0.9, HorizonF32::new(0.0, 20_000.0).unwrap()).unwrap();
    let stream = generate_psra(&spec, Seed::replication(1, 0, Purpose::Arrivals)).unwrap();
    assert!((stream.len() as f32 / 18_000.0 - 1.0).abs() < 0.02);

    let service = ServiceSpec::<f32>::triangular(1.0, 0.8);
    let trace = simulate_queue(
        &stream,
        &service,
        Warmup::Customers(1_000),
        Seed::replication(1, 0, Purpose::Service),
    )
    .unwrap();
    let d: EmpiricalDistributionF32 = wait_distribution(&trace, 0.5).unwrap();
    let total: f32 = d.mass().iter().sum();
    assert!((total - 1.0).abs() < 1e-4);
    assert_eq!(total_variation(&d, &d).unwrap(), 0.0);

    let slots = SlotPairF32::new(0.0, 1.0).unwrap();
    let spec = ProcessSpecF32::new(1.0, delay, 1.0, slots.span()).unwrap();
    let c32 = analytic_covariance(&spec, &slots).unwrap();
    let delay64 = DelaySpec::new(DelayFamily::Uniform, 5.0).unwrap();
    let spec64 = ProcessSpec::new(1.0, delay64, 1.0, Horizon::new(0.0, 2.0).unwrap()).unwrap();
    let c64 = analytic_covariance(&spec64, &SlotPair::new(0.0, 1.0).unwrap()).unwrap();
    assert!((f64::from(c32) - c64).abs() < 1e-5);
}
