// Cumulant functions, tilts and the positive zero of psi for each family.
use scanstat::expfamily::*;

fn main() {
    let families = [
        ("normal(0)", FamilySpec::normal(0.0).unwrap(), 0.5),
        ("bernoulli(0.1)", FamilySpec::bernoulli(0.1).unwrap(), 0.4),
        ("poisson(2)", FamilySpec::poisson(2.0).unwrap(), 3.0),
        ("walk(0.3)", FamilySpec::simple_walk(0.3).unwrap(), 0.2),
        (
            "table",
            FamilySpec::table(&[(-2, 0.3), (-1, 0.3), (0, 0.2), (1, 0.15), (3, 0.05)]).unwrap(),
            1.0,
        ),
    ];
    for (name, f, a) in families {
        let tilt = solve_tilt_for_mean(&f, a).unwrap();
        let case = classify_case(&f)
            .map(|c| format!("{c:?}"))
            .unwrap_or_else(|e| e.to_string());
        print!(
            "{name:<15} mean {:>7.4}  theta_a {:>8.5} (a={a})  var_a {:.5}  case {case}",
            f.mean(),
            tilt.theta,
            tilt.variance
        );
        match solve_zero_of_psi(&f) {
            Ok(z) => println!("  theta1 {:.6} mu1 {:.6}", z.theta, z.mean),
            Err(e) => println!("  theta1: {e}"),
        }
    }
}
