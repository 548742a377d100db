// Successor-based tour difference and subpopulation diversity as a
// population converges.

use divmig::diversity::best_index;
use divmig::ea::{evolve_generation, EaParams, EvolutionState};
use divmig::{subpop_diversity, tour_difference, DiversityMeasure, Tour, TspInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() {
    let inst = TspInstance::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/data/berlin52.tsp"))
        .expect("bundled instance");

    let a = Tour::new((0..52).collect(), &inst).unwrap();
    let b = Tour::new((0..52).rev().collect(), &inst).unwrap();
    println!("identity vs itself:   {}", tour_difference(&a, &a).unwrap());
    println!("identity vs reversed: {}", tour_difference(&a, &b).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pop: Vec<Tour> = (0..30).map(|_| Tour::random(&inst, &mut rng)).collect();
    let best = pop.iter().map(Tour::length).min().unwrap();
    let mut state = EvolutionState::new(&EaParams::default(), 2000, best);
    println!("\ngeneration  best-based  pairwise  best length");
    for g in 0..=2000u64 {
        if g % 250 == 0 {
            let b = best_index(&pop).unwrap();
            let bb = subpop_diversity(&pop, b, DiversityMeasure::BestBased).unwrap();
            let pw = subpop_diversity(&pop, b, DiversityMeasure::Pairwise).unwrap();
            println!(
                "{g:>10}  {:>10.4}  {:>8.4}  {}",
                bb.d,
                pw.d,
                pop[b].length()
            );
        }
        evolve_generation(&mut pop, &mut state, &inst, &mut rng).unwrap();
    }
}

fn main() {
    run();
}
