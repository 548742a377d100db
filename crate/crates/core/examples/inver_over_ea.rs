//! A single population evolved with inver-over and the mapping operator,
//! without any islands.
//!
//! cargo run --release --example inver_over_ea -- [file.tsp] [generations]

use divmig::ea::{evolve_generation, EaParams, EvolutionState};
use divmig::{Tour, TspInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/berlin52.tsp").into());
    let generations: u64 = args
        .next()
        .map_or(3000, |s| s.parse().expect("generations"));
    let inst = TspInstance::from_path(&path).expect("readable TSPLIB file");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pop: Vec<Tour> = (0..50).map(|_| Tour::random(&inst, &mut rng)).collect();
    let initial = pop.iter().map(Tour::length).min().unwrap();
    let mut state = EvolutionState::new(&EaParams::default(), generations, initial);

    println!("generation 0: best {initial}");
    let mut mappings = 0;
    for g in 1..=generations {
        let out = evolve_generation(&mut pop, &mut state, &inst, &mut rng).unwrap();
        mappings += out.mapped as usize;
        if g % (generations / 10).max(1) == 0 {
            let (p_mu, p_ma) = state.rates.current_rates();
            println!(
                "generation {g}: best {}  p_mu {p_mu:.4}  p_ma {p_ma:.4}  mappings so far {mappings}",
                out.best_length
            );
        }
    }
    if let Some(opt) = inst.known_optimum() {
        let best = pop.iter().map(Tour::length).min().unwrap();
        println!(
            "optimum {opt}, gap {:.2}%",
            100.0 * (best as f64 - opt as f64) / opt as f64
        );
    }
}
