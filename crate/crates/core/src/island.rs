//! Island-model scheduler: synchronous rounds of `interval` generations
//! per island followed by a migration round on a unidirectional ring.
//!
//! In [`MigrationMode::Classic`] every inbox is inserted. In
//! [`MigrationMode::Gated`] each island measures its residents' diversity
//! `d`, turns it into `p = (1 - d^alpha)^beta` and inserts the whole inbox
//! only if a uniform draw `r` satisfies `r < p`. Both modes consume the
//! same random draws, so with `p` forced to 1 they are bit-identical.

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diversity::{
    best_index, subpop_diversity, success_probability, DiversityError, DiversityParams,
};
use crate::ea::{evolve_generation, EaError, EaParams, EvolutionState};
use crate::tour::Tour;
use crate::tsplib::TspInstance;

#[derive(Debug, Clone, PartialEq)]
pub enum IslandError {
    TooFewIslands(usize),
    IslandOutOfRange {
        island: usize,
        islands: usize,
    },
    TooManyMigrants {
        requested: usize,
        available: usize,
    },
    Unsynchronized {
        island: usize,
        generation: u64,
        expected: u64,
    },
    InvalidPolicy(String),
    InvalidCost(String),
    Ea(EaError),
    Diversity(DiversityError),
}

impl fmt::Display for IslandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewIslands(n) => write!(f, "a ring needs at least 2 islands, got {n}"),
            Self::IslandOutOfRange { island, islands } => {
                write!(f, "island {island} out of range for {islands} islands")
            }
            Self::TooManyMigrants {
                requested,
                available,
            } => write!(
                f,
                "requested {requested} migrants from {available} residents"
            ),
            Self::Unsynchronized {
                island,
                generation,
                expected,
            } => write!(
                f,
                "island {island} is at generation {generation}, expected {expected}"
            ),
            Self::InvalidPolicy(msg) => write!(f, "invalid migration policy: {msg}"),
            Self::InvalidCost(msg) => write!(f, "invalid cost model input: {msg}"),
            Self::Ea(e) => write!(f, "{e}"),
            Self::Diversity(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for IslandError {}

impl From<EaError> for IslandError {
    fn from(e: EaError) -> Self {
        IslandError::Ea(e)
    }
}

impl From<DiversityError> for IslandError {
    fn from(e: DiversityError) -> Self {
        IslandError::Diversity(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    /// Island `j` sends to island `j + 1 (mod n)`.
    #[default]
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MigrationMode {
    /// Migrants always enter the target subpopulation.
    Classic,
    /// Migrants enter with probability `p(d)`.
    Gated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationPolicy {
    pub topology: Topology,
    /// Generations between migration rounds.
    pub interval: u64,
    /// Migrants sent by each island per round.
    pub size: usize,
    pub mode: MigrationMode,
    pub diversity: DiversityParams,
    /// Terminal criterion: number of migration rounds.
    pub rounds: usize,
}

impl MigrationPolicy {
    pub fn classic(interval: u64, rounds: usize) -> Self {
        MigrationPolicy {
            topology: Topology::Ring,
            interval,
            size: 1,
            mode: MigrationMode::Classic,
            diversity: DiversityParams {
                alpha: 1.0,
                beta: 1.0,
                measure: Default::default(),
            },
            rounds,
        }
    }

    pub fn gated(interval: u64, rounds: usize, diversity: DiversityParams) -> Self {
        MigrationPolicy {
            mode: MigrationMode::Gated,
            diversity,
            ..Self::classic(interval, rounds)
        }
    }

    pub fn validate(&self) -> Result<(), IslandError> {
        if self.interval == 0 {
            return Err(IslandError::InvalidPolicy("interval must be >= 1".into()));
        }
        if self.size == 0 {
            return Err(IslandError::InvalidPolicy(
                "migration size must be >= 1".into(),
            ));
        }
        if self.rounds == 0 {
            return Err(IslandError::InvalidPolicy("rounds must be >= 1".into()));
        }
        if !(self.diversity.alpha >= 0.0 && self.diversity.beta >= 0.0) {
            return Err(IslandError::InvalidPolicy(
                "alpha and beta must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Total generations per island over the whole run.
    pub fn horizon(&self) -> u64 {
        self.interval * self.rounds as u64
    }
}

/// One subpopulation with its own random stream.
#[derive(Debug, Clone)]
pub struct Island {
    pub id: usize,
    pub tours: Vec<Tour>,
    pub rng: ChaCha8Rng,
    pub state: EvolutionState,
    pub inbox: Vec<Tour>,
}

impl Island {
    /// `size` random tours; the stream is `(seed, id)` on ChaCha8.
    pub fn new(
        id: usize,
        size: usize,
        inst: &TspInstance,
        params: &EaParams,
        horizon: u64,
        seed: u64,
    ) -> Self {
        let mut rng = island_rng(seed, id);
        let tours: Vec<Tour> = (0..size).map(|_| Tour::random(inst, &mut rng)).collect();
        let best = tours.iter().map(Tour::length).min().unwrap_or(u64::MAX);
        Island {
            id,
            tours,
            rng,
            state: EvolutionState::new(params, horizon, best),
            inbox: Vec::new(),
        }
    }

    pub fn generation(&self) -> u64 {
        self.state.rates.generation
    }

    pub fn best(&self) -> Option<&Tour> {
        best_index(&self.tours).map(|i| &self.tours[i])
    }

    pub fn evolve(&mut self, generations: u64, inst: &TspInstance) -> Result<(), IslandError> {
        for _ in 0..generations {
            evolve_generation(&mut self.tours, &mut self.state, inst, &mut self.rng)?;
        }
        Ok(())
    }
}

/// Random stream for island `id` of a run seeded with `seed`.
pub fn island_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

pub fn ring_target(island: usize, n: usize) -> Result<usize, IslandError> {
    if n < 2 {
        return Err(IslandError::TooFewIslands(n));
    }
    if island >= n {
        return Err(IslandError::IslandOutOfRange { island, islands: n });
    }
    Ok((island + 1) % n)
}

/// Copies of `s` distinct residents chosen uniformly, in random order.
pub fn select_emigrants<R: Rng + ?Sized>(
    tours: &[Tour],
    s: usize,
    rng: &mut R,
) -> Result<Vec<Tour>, IslandError> {
    if s > tours.len() {
        return Err(IslandError::TooManyMigrants {
            requested: s,
            available: tours.len(),
        });
    }
    Ok(index::sample(rng, tours.len(), s)
        .into_iter()
        .map(|i| tours[i].clone())
        .collect())
}

/// Each migrant overwrites a distinct, uniformly chosen resident.
pub fn replace_with_immigrants<R: Rng + ?Sized>(
    tours: &mut [Tour],
    migrants: Vec<Tour>,
    rng: &mut R,
) -> Result<(), IslandError> {
    if migrants.is_empty() {
        return Ok(());
    }
    if migrants.len() > tours.len() {
        return Err(IslandError::TooManyMigrants {
            requested: migrants.len(),
            available: tours.len(),
        });
    }
    let slots = index::sample(rng, tours.len(), migrants.len());
    for (slot, migrant) in slots.into_iter().zip(migrants) {
        tours[slot] = migrant;
    }
    Ok(())
}

/// What happened at one island in one migration round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationRecord {
    pub island: usize,
    pub diversity: f64,
    /// Effective insertion probability (1 in classic mode).
    pub probability: f64,
    pub accepted: bool,
}

/// Exchanges migrants once around the ring.
///
/// All islands must be at the same generation. Diversity is measured on
/// the residents before anything is inserted; a single draw per island
/// decides the whole inbox.
pub fn migration_round(
    islands: &mut [Island],
    policy: &MigrationPolicy,
) -> Result<Vec<MigrationRecord>, IslandError> {
    let n = islands.len();
    if n < 2 {
        return Err(IslandError::TooFewIslands(n));
    }
    let expected = islands[0].generation();
    if let Some(off) = islands.iter().find(|isl| isl.generation() != expected) {
        return Err(IslandError::Unsynchronized {
            island: off.id,
            generation: off.generation(),
            expected,
        });
    }

    let mut outboxes = Vec::with_capacity(n);
    for isl in islands.iter_mut() {
        outboxes.push(select_emigrants(&isl.tours, policy.size, &mut isl.rng)?);
    }
    for (source, batch) in outboxes.into_iter().enumerate() {
        let target = ring_target(source, n)?;
        islands[target].inbox.extend(batch);
    }

    let mut records = Vec::with_capacity(n);
    for isl in islands.iter_mut() {
        let best = best_index(&isl.tours).expect("islands are never empty");
        let d = subpop_diversity(&isl.tours, best, policy.diversity.measure)?.d;
        let p = match policy.mode {
            MigrationMode::Classic => 1.0,
            MigrationMode::Gated => success_probability(d, &policy.diversity)?,
        };
        let r: f64 = isl.rng.gen();
        let accepted = match policy.mode {
            MigrationMode::Classic => true,
            MigrationMode::Gated => r < p,
        };
        let inbox = std::mem::take(&mut isl.inbox);
        if accepted {
            replace_with_immigrants(&mut isl.tours, inbox, &mut isl.rng)?;
        }
        records.push(MigrationRecord {
            island: isl.id,
            diversity: d,
            probability: p,
            accepted,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeaConfig {
    pub islands: usize,
    pub subpop_size: usize,
    pub policy: MigrationPolicy,
    pub ea: EaParams,
    pub seed: u64,
}

impl DeaConfig {
    /// Defaults: 16 islands of 100, one migrant per round.
    pub fn new(policy: MigrationPolicy, seed: u64) -> Self {
        DeaConfig {
            islands: 16,
            subpop_size: 100,
            policy,
            ea: EaParams::default(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_tour: Tour,
    pub best_length: u64,
    /// Global best-so-far after each migration round.
    pub best_trace: Vec<u64>,
    /// `rounds[r][j]` is island `j`'s record for round `r`.
    pub rounds: Vec<Vec<MigrationRecord>>,
}

impl RunResult {
    pub fn diversity_trace(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.rounds
            .iter()
            .map(|round| round.iter().map(|r| r.diversity).collect())
    }

    pub fn acceptance_rate(&self) -> f64 {
        let total: usize = self.rounds.iter().map(Vec::len).sum();
        if total == 0 {
            return 0.0;
        }
        let accepted = self.rounds.iter().flatten().filter(|r| r.accepted).count();
        accepted as f64 / total as f64
    }
}

/// A complete island-model run.
pub fn run_dea(inst: &TspInstance, cfg: &DeaConfig) -> Result<RunResult, IslandError> {
    run_dea_with(inst, cfg, |_, _| {})
}

/// [`run_dea`] with a callback invoked after every migration round.
pub fn run_dea_with<F>(
    inst: &TspInstance,
    cfg: &DeaConfig,
    mut on_round: F,
) -> Result<RunResult, IslandError>
where
    F: FnMut(usize, &[Island]),
{
    cfg.policy.validate()?;
    if cfg.islands < 2 {
        return Err(IslandError::TooFewIslands(cfg.islands));
    }
    if cfg.subpop_size < 2 {
        return Err(EaError::PopulationTooSmall(cfg.subpop_size).into());
    }
    if cfg.policy.size > cfg.subpop_size {
        return Err(IslandError::TooManyMigrants {
            requested: cfg.policy.size,
            available: cfg.subpop_size,
        });
    }
    let horizon = cfg.policy.horizon();
    let mut islands: Vec<Island> = (0..cfg.islands)
        .map(|id| Island::new(id, cfg.subpop_size, inst, &cfg.ea, horizon, cfg.seed))
        .collect();

    let mut best_tour = global_best(&islands).clone();
    let mut best_trace = Vec::with_capacity(cfg.policy.rounds);
    let mut rounds = Vec::with_capacity(cfg.policy.rounds);
    for round in 0..cfg.policy.rounds {
        islands
            .par_iter_mut()
            .try_for_each(|isl| isl.evolve(cfg.policy.interval, inst))?;
        let candidate = global_best(&islands);
        if candidate.length() < best_tour.length() {
            best_tour = candidate.clone();
        }
        rounds.push(migration_round(&mut islands, &cfg.policy)?);
        best_trace.push(best_tour.length());
        on_round(round, &islands);
    }
    Ok(RunResult {
        best_length: best_tour.length(),
        best_tour,
        best_trace,
        rounds,
    })
}

fn global_best(islands: &[Island]) -> &Tour {
    islands
        .iter()
        .filter_map(Island::best)
        .min_by_key(|t| t.length())
        .expect("at least one island")
}

/// Per-step timings for the running-time comparison of the two schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModelInputs {
    /// Evolutionary operations for one generation.
    pub dt_e: f64,
    /// One diversity computation.
    pub dt_d: f64,
    /// One gated migration round.
    pub dt_m: f64,
    /// One classic migration round.
    pub dt_m_classic: f64,
    pub interval: f64,
    pub generations: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadEstimate {
    /// Total time with the diversity gate.
    pub t_gated: f64,
    /// Total time of the classic scheme.
    pub t_classic: f64,
    /// Extra time spent by the gated scheme.
    pub delta: f64,
}

pub fn overhead_model(c: &CostModelInputs) -> Result<OverheadEstimate, IslandError> {
    if !(c.interval >= 1.0) {
        return Err(IslandError::InvalidCost(format!(
            "interval must be >= 1, got {}",
            c.interval
        )));
    }
    for (name, v) in [
        ("dt_e", c.dt_e),
        ("dt_d", c.dt_d),
        ("dt_m", c.dt_m),
        ("dt_m_classic", c.dt_m_classic),
        ("generations", c.generations),
    ] {
        if !(v >= 0.0) {
            return Err(IslandError::InvalidCost(format!(
                "{name} must be >= 0, got {v}"
            )));
        }
    }
    let t_gated = (c.dt_e + (c.dt_d + c.dt_m) / c.interval) * c.generations;
    let t_classic = (c.dt_e + c.dt_m_classic / c.interval) * c.generations;
    let delta = (c.dt_d + c.dt_m - c.dt_m_classic) / c.interval * c.generations;
    Ok(OverheadEstimate {
        t_gated,
        t_classic,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diversity::DiversityMeasure;
    use crate::tsplib::Metric;

    fn scattered(k: usize, seed: u64) -> TspInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..k)
            .map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0)))
            .collect();
        TspInstance::from_coords("rand", Metric::Euc2d, coords).unwrap()
    }

    fn islands(inst: &TspInstance, n: usize, ni: usize, seed: u64) -> Vec<Island> {
        (0..n)
            .map(|id| Island::new(id, ni, inst, &EaParams::default(), 100, seed))
            .collect()
    }

    #[test]
    fn ring_targets() {
        assert_eq!(ring_target(3, 4).unwrap(), 0);
        assert_eq!(ring_target(0, 16).unwrap(), 1);
        assert_eq!(ring_target(0, 2).unwrap(), 1);
        assert_eq!(ring_target(1, 2).unwrap(), 0);
        assert_eq!(ring_target(0, 1), Err(IslandError::TooFewIslands(1)));
        assert!(ring_target(4, 4).is_err());
    }

    #[test]
    fn emigrants_are_copies() {
        let inst = scattered(10, 1);
        let mut isl = islands(&inst, 1, 8, 2).remove(0);
        let before = isl.tours.clone();
        let all = select_emigrants(&isl.tours, 8, &mut isl.rng).unwrap();
        assert_eq!(isl.tours, before);
        let mut sorted: Vec<_> = all
            .iter()
            .map(|t| before.iter().position(|b| b == t))
            .collect();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
        assert!(select_emigrants(&isl.tours, 9, &mut isl.rng).is_err());
    }

    #[test]
    fn immigrant_replacement() {
        let inst = scattered(10, 3);
        let mut isl = islands(&inst, 1, 6, 4).remove(0);
        let before = isl.tours.clone();
        replace_with_immigrants(&mut isl.tours, vec![], &mut isl.rng).unwrap();
        assert_eq!(isl.tours, before);

        let mut rng = island_rng(5, 0);
        let migrant = Tour::random(&inst, &mut rng);
        let mut single = vec![before[0].clone()];
        replace_with_immigrants(&mut single, vec![migrant.clone()], &mut rng).unwrap();
        assert_eq!(single, vec![migrant.clone()]);

        let migrants = vec![migrant.clone(); 3];
        replace_with_immigrants(&mut isl.tours, migrants, &mut rng).unwrap();
        assert_eq!(isl.tours.len(), 6);
        assert_eq!(isl.tours.iter().filter(|t| **t == migrant).count(), 3);
    }

    #[test]
    fn classic_round_accepts_everything() {
        let inst = scattered(20, 6);
        let mut isl = islands(&inst, 4, 10, 7);
        let policy = MigrationPolicy::classic(5, 1);
        let records = migration_round(&mut isl, &policy).unwrap();
        assert!(records.iter().all(|r| r.accepted && r.probability == 1.0));
        assert!(isl
            .iter()
            .all(|i| i.tours.len() == 10 && i.inbox.is_empty()));
    }

    #[test]
    fn converged_islands_accept() {
        let inst = scattered(20, 8);
        let mut isl = islands(&inst, 3, 5, 9);
        let t = isl[0].tours[0].clone();
        for i in &mut isl {
            i.tours = vec![t.clone(); 5];
        }
        let policy = MigrationPolicy::gated(5, 1, DiversityParams::new(1.0, 1.0).unwrap());
        let records = migration_round(&mut isl, &policy).unwrap();
        assert!(records.iter().all(|r| r.diversity == 0.0 && r.accepted));
    }

    #[test]
    fn fresh_random_islands_rarely_accept() {
        let inst = scattered(100, 10);
        let mut isl = islands(&inst, 4, 20, 11);
        let policy = MigrationPolicy::gated(5, 1, DiversityParams::new(1.0, 1.0).unwrap());
        let mut accepted = 0;
        let mut total = 0;
        for _ in 0..100 {
            let records = migration_round(&mut isl, &policy).unwrap();
            total += records.len();
            accepted += records.iter().filter(|r| r.accepted).count();
        }
        assert!((accepted as f64) < 0.05 * total as f64);
    }

    #[test]
    fn unsynchronized_islands_rejected() {
        let inst = scattered(10, 12);
        let mut isl = islands(&inst, 3, 4, 13);
        isl[1].evolve(1, &inst).unwrap();
        assert!(matches!(
            migration_round(&mut isl, &MigrationPolicy::classic(1, 1)),
            Err(IslandError::Unsynchronized { island: 1, .. })
        ));
    }

    #[test]
    fn population_conserved_in_both_modes() {
        let inst = scattered(15, 14);
        for mode in [MigrationMode::Classic, MigrationMode::Gated] {
            let mut isl = islands(&inst, 5, 7, 15);
            let mut policy = MigrationPolicy::classic(2, 1);
            policy.mode = mode;
            policy.size = 3;
            for _ in 0..20 {
                for i in &mut isl {
                    i.evolve(2, &inst).unwrap();
                }
                migration_round(&mut isl, &policy).unwrap();
                assert_eq!(isl.iter().map(|i| i.tours.len()).sum::<usize>(), 35);
            }
        }
    }

    #[test]
    fn run_is_deterministic_and_monotone() {
        let inst = scattered(30, 16);
        let policy = MigrationPolicy::gated(10, 15, DiversityParams::new(0.5, 1.0).unwrap());
        let cfg = DeaConfig {
            islands: 3,
            subpop_size: 8,
            ..DeaConfig::new(policy, 17)
        };
        let a = run_dea(&inst, &cfg).unwrap();
        let b = run_dea(&inst, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.best_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.best_trace.len(), 15);
        assert_eq!(a.best_length, a.best_tour.cycle_length(&inst).unwrap());
        assert!(a
            .diversity_trace()
            .flatten()
            .all(|d| (0.0..=1.0).contains(&d)));
    }

    #[test]
    fn pairwise_measure_runs() {
        let inst = scattered(12, 18);
        let params = DiversityParams::new(1.0, 2.0)
            .unwrap()
            .with_measure(DiversityMeasure::Pairwise);
        let cfg = DeaConfig {
            islands: 2,
            subpop_size: 5,
            ..DeaConfig::new(MigrationPolicy::gated(3, 4, params), 1)
        };
        let res = run_dea(&inst, &cfg).unwrap();
        assert_eq!(res.rounds.len(), 4);
    }

    #[test]
    fn bad_configs() {
        let inst = scattered(10, 19);
        let mut cfg = DeaConfig::new(MigrationPolicy::classic(0, 1), 1);
        assert!(run_dea(&inst, &cfg).is_err());
        cfg.policy.interval = 1;
        cfg.islands = 1;
        assert!(run_dea(&inst, &cfg).is_err());
        cfg.islands = 2;
        cfg.subpop_size = 2;
        cfg.policy.size = 3;
        assert!(run_dea(&inst, &cfg).is_err());
    }

    #[test]
    fn overhead_example() {
        let est = overhead_model(&CostModelInputs {
            dt_e: 1.0,
            dt_d: 10.0,
            dt_m: 2.0,
            dt_m_classic: 2.0,
            interval: 100.0,
            generations: 1000.0,
        })
        .unwrap();
        assert_eq!(est.t_gated, 1120.0);
        assert_eq!(est.t_classic, 1020.0);
        assert_eq!(est.delta, 100.0);

        let degenerate = overhead_model(&CostModelInputs {
            dt_e: 3.0,
            dt_d: 0.0,
            dt_m: 5.0,
            dt_m_classic: 5.0,
            interval: 7.0,
            generations: 11.0,
        })
        .unwrap();
        assert_eq!(degenerate.delta, 0.0);
        assert_eq!(degenerate.t_gated, degenerate.t_classic);
    }

    #[test]
    fn overhead_rejects_bad_input() {
        let base = CostModelInputs {
            dt_e: 1.0,
            dt_d: 1.0,
            dt_m: 1.0,
            dt_m_classic: 1.0,
            interval: 0.0,
            generations: 1.0,
        };
        assert!(overhead_model(&base).is_err());
        assert!(overhead_model(&CostModelInputs {
            interval: 1.0,
            dt_d: -1.0,
            ..base
        })
        .is_err());
    }
}
