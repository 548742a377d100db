// Tours as permutations: successors, cyclic segment inversion and the
// incrementally maintained length.

use divmig::{Tour, TspInstance};

pub fn run() {
    // Six cities on a 3 x 2 grid.
    let coords = vec![
        (0.0, 0.0),
        (1.0, 0.0),
        (2.0, 0.0),
        (2.0, 1.0),
        (1.0, 1.0),
        (0.0, 1.0),
    ];
    let inst = TspInstance::from_coords("grid6", divmig::Metric::Euc2d, coords).unwrap();

    let mut tour = Tour::new(vec![0, 1, 2, 3, 4, 5], &inst).unwrap();
    println!("start          {tour}");
    println!(
        "succ(2) = {}, pred(0) = {}",
        tour.successor(2),
        tour.predecessor(0)
    );

    tour.invert_segment(1, 3, &inst).unwrap();
    println!("invert 1..=3   {tour}");

    // Wrapping segment: positions 4, 5, 0, 1.
    tour.invert_segment(4, 1, &inst).unwrap();
    println!("invert 4..=1   {tour}");

    let recomputed = tour.cycle_length(&inst).unwrap();
    assert_eq!(recomputed, tour.length());
    println!("recomputed length {recomputed} matches the cached one");

    let bad = Tour::new(vec![0, 1, 1, 3, 4, 5], &inst);
    println!("duplicate city rejected: {}", bad.unwrap_err());
}

fn main() {
    run();
}
