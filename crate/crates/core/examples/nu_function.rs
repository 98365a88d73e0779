// Siegmund's nu: exact series against its closed-form approximation.
use scanstat::walk_functionals::{nu_approx, nu_exact};

fn main() {
    println!("{:>6} {:>12} {:>12} {:>8}", "x", "exact", "approx", "rel");
    for x in [
        0.01, 0.1, 0.3, 0.5, 0.707, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 28.28,
    ] {
        let e = nu_exact(x).unwrap();
        let a = nu_approx(x);
        println!("{x:>6} {e:>12.8} {a:>12.8} {:>8.4}", (a - e) / e);
    }
    let x = 0.01 * std::f64::consts::SQRT_2;
    println!(
        "small x: nu {:.8} vs exp(-0.583x) {:.8}",
        nu_exact(x).unwrap(),
        (-0.583 * x).exp()
    );
}
