//! One classic and one gated run on the same instance, side by side.
//!
//! cargo run --release --example classic_vs_gated -- [file.tsp] [rounds] [interval]

use std::time::Instant;

use divmig::{run_dea, DeaConfig, DiversityParams, MigrationPolicy, TspInstance};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let path = args.get(1).map_or(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/berlin52.tsp"),
        String::as_str,
    );
    let rounds: usize = args.get(2).map_or(50, |s| s.parse().expect("rounds"));
    let interval: u64 = args.get(3).map_or(200, |s| s.parse().expect("interval"));
    let inst = TspInstance::from_path(path).expect("readable TSPLIB file");

    let gate = DiversityParams::new(0.5, 1.0).unwrap();
    for (label, policy) in [
        ("classic", MigrationPolicy::classic(interval, rounds)),
        ("gated  ", MigrationPolicy::gated(interval, rounds, gate)),
    ] {
        let mut cfg = DeaConfig::new(policy, 42);
        cfg.islands = 8;
        cfg.subpop_size = 50;
        let start = Instant::now();
        let result = run_dea(&inst, &cfg).expect("run");
        println!(
            "{label} best {:>8}  accepted {:>5.1}%  {:.2?}",
            result.best_length,
            100.0 * result.acceptance_rate(),
            start.elapsed()
        );
    }
    if let Some(opt) = inst.known_optimum() {
        println!("optimum {opt}");
    }
}
