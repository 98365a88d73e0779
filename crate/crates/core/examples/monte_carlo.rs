// Seeded Monte Carlo for both statistics; the estimate does not depend on
// the worker count.
use scanstat::expfamily::FamilySpec;
use scanstat::fixed_window::{lambda_fixed, ApproxMethod, ScanConfig};
use scanstat::simulate::{run, SimConfig, SimTarget};
use scanstat::varying_window::{lambda_cusum, CusumConfig};

fn main() {
    let scan = ScanConfig::new(FamilySpec::normal(0.0).unwrap(), 1000, 50, 0.5).unwrap();
    let approx = lambda_fixed(&scan, ApproxMethod::Series).unwrap().p;
    for workers in [1, 4] {
        let r = run(&SimConfig {
            target: SimTarget::FixedScan(scan.clone()),
            reps: 20_000,
            seed: 7,
            workers,
        })
        .unwrap();
        println!(
            "fixed, {workers} workers: {:.5} [{:.5}, {:.5}]  approx {approx:.5}",
            r.estimate, r.ci95.0, r.ci95.1
        );
    }

    let cusum = CusumConfig::new(FamilySpec::simple_walk(0.3).unwrap(), 2000, 8.0).unwrap();
    let approx = lambda_cusum(&cusum, ApproxMethod::Series).unwrap().p;
    let r = run(&SimConfig {
        target: SimTarget::Cusum(cusum),
        reps: 50_000,
        seed: 11,
        workers: 2,
    })
    .unwrap();
    println!(
        "cusum: {:.5} +- {:.5}  approx {approx:.5}",
        r.estimate, r.stderr
    );
}
