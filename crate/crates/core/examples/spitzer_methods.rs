// The Spitzer factor sum_k E[e^{-theta W_k+}]/k by every evaluator that
// applies to each walk.
use scanstat::expfamily::{solve_tilt_for_mean, FamilySpec};
use scanstat::walk_functionals::*;

fn show(label: &str, walk: &WalkSpec, methods: &[SpitzerMethod]) {
    println!("{label}");
    for &m in methods {
        match spitzer(walk, m) {
            Ok(s) => println!(
                "  {:<20} {:.15}  nodes {:>5}  est err {:.1e}",
                format!("{m:?}"),
                s.value,
                s.nodes,
                s.est_error
            ),
            Err(e) => println!("  {:<20} {e}", format!("{m:?}")),
        }
    }
}

fn main() {
    use SpitzerMethod::*;
    let normal = FamilySpec::normal(0.0).unwrap();
    for a in [0.2, 0.4, 0.5] {
        let walk =
            WalkSpec::scan_difference(&normal, &solve_tilt_for_mean(&normal, a).unwrap()).unwrap();
        show(
            &format!("normal, a = {a}"),
            &walk,
            &[Series, IntegralContinuous, ClosedFormNormal],
        );
    }
    let bern = FamilySpec::bernoulli(0.1).unwrap();
    for a in [11.0 / 30.0, 0.4] {
        let walk =
            WalkSpec::scan_difference(&bern, &solve_tilt_for_mean(&bern, a).unwrap()).unwrap();
        show(
            &format!("bernoulli(0.1), a = {a:.6}"),
            &walk,
            &[Series, IntegralLattice],
        );
    }
    let pois = FamilySpec::poisson(2.0).unwrap();
    let walk = WalkSpec::scan_difference(&pois, &solve_tilt_for_mean(&pois, 3.5).unwrap()).unwrap();
    show("poisson(2), a = 3.5", &walk, &[Series, IntegralLattice]);

    println!(
        "gaussian_trunc_exp(0, 1, 1) = {}",
        gaussian_trunc_exp(0.0, 1.0, 1.0)
    );
}
