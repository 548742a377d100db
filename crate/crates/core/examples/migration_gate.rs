// The acceptance probability p(d) = (1 - d^alpha)^beta and how often the
// gate opens at a few diversity levels.

use divmig::{accept_migrants, success_probability, DiversityParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() {
    let grid = [0.5, 1.0, 2.0];
    print!("{:>12}", "d");
    for a in grid {
        for b in grid {
            print!("{:>9}", format!("{a}/{b}"));
        }
    }
    println!();
    for step in 0..=10 {
        let d = step as f64 / 10.0;
        print!("{d:>12.1}");
        for a in grid {
            for b in grid {
                let p = success_probability(d, &DiversityParams::new(a, b).unwrap()).unwrap();
                print!("{p:>9.4}");
            }
        }
        println!();
    }

    let params = DiversityParams::new(1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("\nalpha = beta = 1, 100000 draws:");
    for d in [0.1, 0.5, 0.9] {
        let hits = (0..100_000)
            .filter(|_| accept_migrants(d, &params, &mut rng).unwrap())
            .count();
        println!(
            "  d = {d}: accepted {:.4} (expected {:.4})",
            hits as f64 / 1e5,
            1.0 - d
        );
    }
}

fn main() {
    run();
}
