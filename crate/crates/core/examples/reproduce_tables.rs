// Regenerates both reference tables: approximation p1 next to a fresh
// Monte Carlo p2.
//
// $ cargo run --release --example reproduce_tables -- 20000
use scanstat::cli::{reproduce_table, TableId};

fn main() {
    let reps: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("reps"))
        .unwrap_or(10_000);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    for (name, table) in [("normal", TableId::Table1), ("bernoulli", TableId::Table2)] {
        println!("{name}: n, t, mu0, a, p1, p2 (seed)");
        for r in reproduce_table(table, reps, 1, workers).unwrap() {
            println!(
                "  {:>6} {:>3} {:>4} {:.5} {:.5} {:.5} ({})",
                r.n, r.t, r.mu0, r.a, r.p1, r.p2, r.seed
            );
        }
    }
}
