// Driving the command layer in-process and reading the JSON record back.
use scanstat::cli::{run_from_args, OutputRecord};

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = [
        "scanstat",
        "compare",
        "cusum",
        "--family",
        "walk:p=0.25",
        "--n",
        "1000",
        "--b",
        "10",
        "--reps",
        "20000",
        "--seed",
        "3",
    ];
    let code = run_from_args(args, &mut out, &mut err);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    let record: OutputRecord = serde_json::from_slice(&out).unwrap();
    let approx = record.approximation.unwrap();
    let sim = record.simulation.unwrap();
    println!("lambda {:.6e}, p {:.6}", approx.lambda, approx.p);
    println!(
        "simulated {:.6} in [{:.6}, {:.6}]",
        sim.estimate, sim.ci95.0, sim.ci95.1
    );

    let code = run_from_args(
        [
            "scanstat",
            "approx",
            "fixed",
            "--family",
            "poisson:mu=1",
            "--n",
            "50",
            "--t",
            "60",
            "--a",
            "2",
        ],
        &mut out,
        &mut err,
    );
    println!(
        "t > n exits with {code}: {}",
        String::from_utf8_lossy(&err).trim()
    );
}
