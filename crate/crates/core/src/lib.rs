//! Island-model evolutionary algorithm for the symmetric TSP with
//! diversity-gated migration.
//!
//! Each island evolves a subpopulation of tours with the inver-over
//! operator and an occasional segment-mapping step. Every `interval`
//! generations islands send migrants along a ring; in gated mode the
//! receiver accepts them with probability `(1 - d^alpha)^beta`, where `d`
//! is its own current diversity.
//!
//! ```no_run
//! use divmig::{run_dea, DeaConfig, DiversityParams, MigrationPolicy, TspInstance};
//!
//! let inst = TspInstance::from_path("data/berlin52.tsp").unwrap();
//! let params = DiversityParams::new(0.5, 1.0).unwrap();
//! let mut cfg = DeaConfig::new(MigrationPolicy::gated(500, 100, params), 7);
//! cfg.islands = 4;
//! cfg.subpop_size = 50;
//! let result = run_dea(&inst, &cfg).unwrap();
//! println!("best: {}", result.best_length);
//! ```

// Parameter checks use `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diversity;
pub mod ea;
pub mod harness;
pub mod island;
pub mod stats;
pub mod tour;
pub mod tsplib;

pub use diversity::{
    accept_migrants, subpop_diversity, success_probability, tour_difference, DiversityError,
    DiversityMeasure, DiversityParams, DiversityReport,
};
pub use ea::{
    evolve_generation, inver_over_step, mapping_operator, EaError, EaParams, EvolutionState,
};
pub use island::{
    migration_round, overhead_model, run_dea, run_dea_with, CostModelInputs, DeaConfig, Island,
    IslandError, MigrationMode, MigrationPolicy, MigrationRecord, OverheadEstimate, RunResult,
    Topology,
};
pub use stats::{welch_t_test, StatsError, WelchResult};
pub use tour::{Tour, TourError};
pub use tsplib::{Metric, TspInstance, TsplibError};
