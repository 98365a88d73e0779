use scanstat::expfamily::FamilySpec;
use scanstat::fixed_window::{window_sum_tail, ApproxMethod, ScanConfig};
use scanstat::simulate::{self, SimConfig, SimTarget};
use scanstat::varying_window::{lambda_cusum, CusumConfig};

fn run(target: SimTarget, reps: u64, seed: u64) -> scanstat::simulate::SimResult {
    simulate::run(&SimConfig {
        target,
        reps,
        seed,
        workers: 4,
    })
    .unwrap()
}

fn binomial_se(p: f64, reps: u64) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

#[test]
fn fair_coin_runs_of_three() {
    let scan = ScanConfig::new(FamilySpec::bernoulli(0.5).unwrap(), 6, 3, 1.0).unwrap();
    let r = run(SimTarget::FixedScan(scan), 1_000_000, 21);
    let truth = 5.0 / 16.0;
    assert!(
        (r.estimate - truth).abs() <= 4.0 * binomial_se(truth, r.reps),
        "{r:?}"
    );
}

#[test]
fn simple_walk_cusum_against_lambda() {
    let config = CusumConfig::new(FamilySpec::simple_walk(0.25).unwrap(), 1000, 10.0).unwrap();
    let p = lambda_cusum(&config, ApproxMethod::Series).unwrap().p;
    let r = run(SimTarget::Cusum(config), 1_000_000, 22);
    assert!(
        (r.estimate - p).abs() <= 4.0 * binomial_se(p, r.reps),
        "{} vs {p}",
        r.estimate
    );
}

#[test]
fn single_step_cusum_is_the_increment_tail() {
    let family = FamilySpec::table(&[(-2, 0.5), (1, 0.3), (3, 0.2)]).unwrap();
    let tail = window_sum_tail(&family, 1, 2.0).unwrap();
    assert_eq!(tail, 0.2);
    let r = run(
        SimTarget::Cusum(CusumConfig::new(family, 1, 2.0).unwrap()),
        200_000,
        23,
    );
    assert!(
        (r.estimate - tail).abs() <= 4.0 * binomial_se(tail, r.reps),
        "{r:?}"
    );

    let normal = FamilySpec::normal(-0.3).unwrap();
    let tail = window_sum_tail(&normal, 1, 0.5).unwrap();
    let r = run(
        SimTarget::Cusum(CusumConfig::new(normal, 1, 0.5).unwrap()),
        200_000,
        24,
    );
    assert!(
        (r.estimate - tail).abs() <= 4.0 * binomial_se(tail, r.reps),
        "{r:?}"
    );
}

#[test]
fn normal_table_row_three() {
    let scan = ScanConfig::new(FamilySpec::normal(0.0).unwrap(), 1000, 50, 0.5).unwrap();
    let r = run(SimTarget::FixedScan(scan), 100_000, 25);
    assert!(
        (r.estimate - 0.0334).abs() <= 4.0 * binomial_se(0.0334, r.reps),
        "{r:?}"
    );
}
