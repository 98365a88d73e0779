use scanstat::expfamily::{solve_tilt_for_mean, FamilySpec};
use scanstat::fixed_window::{lambda_fixed, ApproxMethod, ScanConfig};
use scanstat::simulate::{exact_fixed_scan_small, DEFAULT_STATE_BUDGET};
use scanstat::walk_functionals::{spitzer_series, WalkSpec, DEFAULT_EPS};

/// Counts 0/1 strings of length n containing t consecutive ones.
fn count_runs(n: u32, t: u32) -> u64 {
    (0u64..1 << n)
        .filter(|bits| {
            let mut run = 0;
            (0..n).any(|i| {
                run = if bits >> i & 1 == 1 { run + 1 } else { 0 };
                run >= t
            })
        })
        .count() as u64
}

#[test]
fn coin_run_counts_by_brute_force() {
    assert_eq!(count_runs(6, 3), 20);
    assert_eq!(count_runs(12, 4), 1224);
    let coin = FamilySpec::bernoulli(0.5).unwrap();
    let exact = exact_fixed_scan_small(&coin, 12, 4, 4, DEFAULT_STATE_BUDGET).unwrap();
    assert_eq!(exact, 1224.0 / 4096.0);
    let lambda = lambda_fixed(
        &ScanConfig::new(coin, 12, 4, 1.0).unwrap(),
        ApproxMethod::Series,
    )
    .unwrap()
    .lambda;
    assert_eq!(lambda, 5.0 / 16.0);
}

fn ln_choose(n: u64, k: u64) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn binom_pmf(n: u64, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp())
        .collect()
}

/// Σ_k (1/k) E e^{-θ (B_a - B_μ)^+} with the two binomials summed directly.
fn bernoulli_spitzer(mu: f64, a: f64, theta: f64, k_max: u64) -> f64 {
    (1..=k_max)
        .map(|k| {
            let pa = binom_pmf(k, a);
            let pm = binom_pmf(k, mu);
            let mut e = 0.0;
            for (i, x) in pa.iter().enumerate() {
                for (j, y) in pm.iter().enumerate() {
                    let d = (i as f64 - j as f64).max(0.0);
                    e += x * y * (-theta * d).exp();
                }
            }
            e / k as f64
        })
        .sum()
}

#[test]
fn bernoulli_series_against_direct_binomial_sums() {
    let family = FamilySpec::bernoulli(0.1).unwrap();
    for a in [11.0 / 30.0, 0.4] {
        let tilt = solve_tilt_for_mean(&family, a).unwrap();
        let walk = WalkSpec::scan_difference(&family, &tilt).unwrap();
        let s = spitzer_series(&walk, DEFAULT_EPS).unwrap();
        let direct = bernoulli_spitzer(0.1, a, tilt.theta, 400);
        assert!(
            (s.value - direct).abs() < 1e-9,
            "{a}: {} vs {direct}",
            s.value
        );
    }
}

#[test]
fn bernoulli_quarter_threshold_gives_log_four() {
    // at a = 0.4 the tilt is e^θ = 6 and the series closes to ln 4
    let family = FamilySpec::bernoulli(0.1).unwrap();
    let tilt = solve_tilt_for_mean(&family, 0.4).unwrap();
    assert!((tilt.theta - 6f64.ln()).abs() < 1e-12);
    let walk = WalkSpec::scan_difference(&family, &tilt).unwrap();
    let s = spitzer_series(&walk, DEFAULT_EPS).unwrap();
    assert!((s.value - 4f64.ln()).abs() < 1e-9, "{}", s.value);
}
