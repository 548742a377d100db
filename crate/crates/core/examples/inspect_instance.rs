//! Parse a TSPLIB file and print its header and a few edge weights.
//!
//! cargo run --example inspect_instance -- [file.tsp]

use divmig::TspInstance;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/berlin52.tsp").into());
    let inst = match TspInstance::from_path(&path) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    };
    print!("{}", inst.header());
    println!("distance matrix cached: {}", inst.has_matrix());
    match inst.known_optimum() {
        Some(opt) => println!("known optimum: {opt}"),
        None => println!("known optimum: not registered"),
    }
    let n = inst.dimension().min(5);
    println!("first {n} x {n} weights:");
    for a in 0..n {
        let row: Vec<String> = (0..n).map(|b| format!("{:>5}", inst.dist(a, b))).collect();
        println!("  {}", row.join(" "));
    }
}
