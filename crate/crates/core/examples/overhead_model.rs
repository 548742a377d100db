//! Running-time model of the gated scheme against the classic one, using
//! timings measured on this machine.

use std::time::Instant;

use divmig::diversity::best_index;
use divmig::ea::{evolve_generation, EaParams, EvolutionState};
use divmig::{
    overhead_model, subpop_diversity, CostModelInputs, DiversityMeasure, Tour, TspInstance,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let inst = TspInstance::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/data/berlin52.tsp"))
        .expect("bundled instance");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pop: Vec<Tour> = (0..100).map(|_| Tour::random(&inst, &mut rng)).collect();
    let best = pop.iter().map(Tour::length).min().unwrap();
    let mut state = EvolutionState::new(&EaParams::default(), 1000, best);

    let reps = 1000;
    let t = Instant::now();
    for _ in 0..reps {
        evolve_generation(&mut pop, &mut state, &inst, &mut rng).unwrap();
    }
    let dt_e = t.elapsed().as_secs_f64() / reps as f64;

    let t = Instant::now();
    for _ in 0..reps {
        let b = best_index(&pop).unwrap();
        std::hint::black_box(subpop_diversity(&pop, b, DiversityMeasure::BestBased).unwrap());
    }
    let dt_d = t.elapsed().as_secs_f64() / reps as f64;

    // A migration round is one tour copy; both schemes pay it.
    let t = Instant::now();
    for i in 0..reps {
        std::hint::black_box(pop[i % pop.len()].clone());
    }
    let dt_m = t.elapsed().as_secs_f64() / reps as f64;

    println!("measured: dt_e {dt_e:.3e}s  dt_d {dt_d:.3e}s  dt_m {dt_m:.3e}s");
    println!(
        "{:>10}  {:>12}  {:>12}  {:>8}",
        "interval", "t_gated", "t_classic", "overhead"
    );
    for interval in [1.0, 10.0, 100.0, 1000.0, 10000.0] {
        let est = overhead_model(&CostModelInputs {
            dt_e,
            dt_d,
            dt_m,
            dt_m_classic: dt_m,
            interval,
            generations: 1e6,
        })
        .unwrap();
        println!(
            "{interval:>10}  {:>11.2}s  {:>11.2}s  {:>7.3}%",
            est.t_gated,
            est.t_classic,
            100.0 * est.delta / est.t_classic
        );
    }
}
