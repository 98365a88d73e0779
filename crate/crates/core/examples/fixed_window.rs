// Every fixed-window approximation on one Bernoulli configuration.
use scanstat::expfamily::FamilySpec;
use scanstat::fixed_window::*;

fn main() {
    let family = FamilySpec::bernoulli(0.1).unwrap();
    let config = ScanConfig::new(family.clone(), 7680, 30, 11.0 / 30.0).unwrap();
    let tilt = config.tilt.unwrap();
    println!(
        "theta_a = {:.6}, sigma_a = {:.6}",
        tilt.theta,
        tilt.variance.sqrt()
    );
    println!(
        "at = {}, ceil gap = {}",
        config.threshold(),
        config.ceil_gap()
    );

    let rows = [
        lambda_fixed(&config, ApproxMethod::Series),
        lambda_fixed(&config, ApproxMethod::Integral),
        lambda_bernoulli_reduced(&config),
        lambda_dembo_karlin(&config),
    ];
    for r in rows {
        let r = r.unwrap();
        println!("{:<18} lambda {:.6e}  p {:.6}", r.method, r.lambda, r.p);
    }

    // a at the top of the support: the corollary takes over
    let top = ScanConfig::new(family, 7680, 8, 1.0).unwrap();
    let r = lambda_fixed(&top, ApproxMethod::Series).unwrap();
    println!("{:<18} lambda {:.6e}  p {:.6}", r.method, r.lambda, r.p);
}
