use std::path::PathBuf;

use divmig::{Metric, Tour, TspInstance};
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

/// Zero-based city order from a TSPLIB `.tour` file.
fn read_tour(text: &str) -> Vec<usize> {
    text.lines()
        .skip_while(|l| l.trim() != "TOUR_SECTION")
        .skip(1)
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<i64>().unwrap())
        .take_while(|&v| v != -1)
        .map(|v| v as usize - 1)
        .collect()
}

#[test]
fn pcb442_header() {
    let inst = TspInstance::from_path(data("pcb442.tsp")).unwrap();
    assert_eq!(inst.name(), "pcb442");
    assert_eq!(inst.dimension(), 442);
    assert_eq!(inst.metric(), Metric::Euc2d);
    assert_eq!(inst.known_optimum(), Some(50778));
    assert!(inst.has_matrix());
}

#[test]
fn pcb442_optimal_tour_has_registered_length() {
    let inst = TspInstance::from_path(data("pcb442.tsp")).unwrap();
    let order = read_tour(&std::fs::read_to_string(data("pcb442.opt.tour")).unwrap());
    assert_eq!(order.len(), 442);
    let tour = Tour::new(order, &inst).unwrap();
    assert_eq!(tour.length(), 50778);

    // Same answer when weights are computed on demand.
    let lazy = inst.clone().without_matrix();
    assert_eq!(tour.cycle_length(&lazy).unwrap(), 50778);
}

#[test]
fn berlin52_header() {
    let inst = TspInstance::from_path(data("berlin52.tsp")).unwrap();
    assert_eq!(inst.dimension(), 52);
    assert_eq!(inst.metric(), Metric::Euc2d);
    assert_eq!(inst.known_optimum(), Some(7542));
    // First two cities: (565, 575) and (25, 185).
    assert_eq!(inst.dist(0, 1), 666);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = TspInstance::from_path(data("no-such.tsp")).unwrap_err();
    assert!(matches!(err, divmig::TsplibError::Io(_)), "{err:?}");
}

#[test]
fn serialized_instance_parses_back() {
    let inst = TspInstance::from_path(data("berlin52.tsp")).unwrap();
    let again = TspInstance::parse(&inst.to_tsplib()).unwrap();
    assert_eq!(again.dimension(), inst.dimension());
    for a in 0..52 {
        for b in 0..52 {
            assert_eq!(again.dist(a, b), inst.dist(a, b));
        }
    }
}

proptest! {
    #[test]
    fn random_coordinate_instances_round_trip(
        coords in prop::collection::vec((0.0f64..1e4, 0.0f64..1e4), 3..40),
        ceil in any::<bool>(),
    ) {
        let metric = if ceil { Metric::Ceil2d } else { Metric::Euc2d };
        let coords: Vec<(f64, f64)> =
            coords.into_iter().map(|(x, y)| (x.round(), y.round())).collect();
        let inst = TspInstance::from_coords("rand", metric, coords).unwrap();
        let again = TspInstance::parse(&inst.to_tsplib()).unwrap();
        prop_assert_eq!(again.header(), inst.header());
        for a in 0..inst.dimension() {
            for b in 0..inst.dimension() {
                prop_assert_eq!(again.dist(a, b), inst.dist(a, b));
            }
        }
    }
}
