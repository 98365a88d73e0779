// Varying-window maximum: lambda from the series, the two closed forms for
// skip-free walks, and the ladder identity for the simple walk.
use scanstat::expfamily::FamilySpec;
use scanstat::fixed_window::ApproxMethod;
use scanstat::varying_window::*;
use scanstat::walk_functionals::{spitzer, SpitzerMethod, WalkSpec};

fn main() {
    let (n, b) = (1000u64, 10i64);
    for p in [0.1, 0.25, 0.4] {
        let config = CusumConfig::new(FamilySpec::simple_walk(p).unwrap(), n, b as f64).unwrap();
        let series = lambda_cusum(&config, ApproxMethod::Series).unwrap();
        let walk = LatticeWalkSpec::simple(p).unwrap();
        let up = lambda_closed_form_max_up_one(&walk, n, b).unwrap();
        let scaled = series.lambda * n as f64 / config.effective_windows();
        let sigma = spitzer(
            &WalkSpec::tilted_partial_sums(&config.family, &config.tilt).unwrap(),
            SpitzerMethod::Series,
        )
        .unwrap()
        .value;
        let q = 1.0 - p;
        println!(
            "p={p}: theta1 {:.6} mu1 {:.6}  lambda {:.6e}  n-scaled {:.6e}  closed {:.6e}  e^-sigma {:.6} (q-p)^2/q {:.6}",
            config.theta1(),
            config.mu1(),
            series.lambda,
            scaled,
            up.lambda,
            (-sigma).exp(),
            (q - p) * (q - p) / q
        );
    }

    // a walk with a jump of +2 only matches the down-one form
    let walk = LatticeWalkSpec::new(vec![0.1, 0.0, 0.2], vec![0.7]).unwrap();
    let z0 = z0_root(&walk).unwrap();
    let closed = lambda_closed_form_min_down_one(&walk, n, b).unwrap();
    let family = FamilySpec::table(&[(-1, 0.7), (0, 0.1), (2, 0.2)]).unwrap();
    let config = CusumConfig::new(family, n, b as f64).unwrap();
    let series = lambda_cusum(&config, ApproxMethod::Series).unwrap();
    println!(
        "skip-free down: z0 {z0:.12}  closed {:.6e}  series n-scaled {:.6e}",
        closed.lambda,
        series.lambda * n as f64 / config.effective_windows()
    );

    let normal = CusumConfig::new(FamilySpec::normal(-0.5).unwrap(), n, 6.0).unwrap();
    let r = lambda_cusum(&normal, ApproxMethod::Series).unwrap();
    println!(
        "normal(-0.5), b=6: lambda {:.6e} p {:.6} rate term {:?}",
        r.lambda, r.p, r.rate_term
    );
}
