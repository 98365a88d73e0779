// Exact scan probabilities for small integer problems against the
// approximations.
use scanstat::expfamily::FamilySpec;
use scanstat::fixed_window::{lambda_fixed, ApproxMethod, ScanConfig};
use scanstat::simulate::{exact_fixed_scan_small, DEFAULT_STATE_BUDGET};

fn main() {
    let coin = FamilySpec::bernoulli(0.5).unwrap();
    let exact = exact_fixed_scan_small(&coin, 6, 3, 3, DEFAULT_STATE_BUDGET).unwrap();
    let lambda = lambda_fixed(
        &ScanConfig::new(coin.clone(), 6, 3, 1.0).unwrap(),
        ApproxMethod::Series,
    )
    .unwrap()
    .lambda;
    println!("run of 3 heads in 6 tosses: exact {exact}, corollary lambda {lambda}");

    let exact = exact_fixed_scan_small(&coin, 12, 4, 4, DEFAULT_STATE_BUDGET).unwrap();
    println!(
        "run of 4 heads in 12 tosses: exact {exact} = {}/4096",
        exact * 4096.0
    );

    let die = FamilySpec::table(&[(-1, 0.5), (0, 0.2), (1, 0.2), (2, 0.1)]).unwrap();
    for (n, t, k) in [(20u64, 5u64, 4i64), (30, 6, 5), (40, 8, 6)] {
        let exact = exact_fixed_scan_small(&die, n, t, k, DEFAULT_STATE_BUDGET).unwrap();
        let config = ScanConfig::new(die.clone(), n, t, k as f64 / t as f64).unwrap();
        let approx = lambda_fixed(&config, ApproxMethod::Series).unwrap().p;
        println!("n={n} t={t} k={k}: exact {exact:.6} approx {approx:.6}");
    }
}
