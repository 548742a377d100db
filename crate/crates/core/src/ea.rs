//! The sequential EA run inside every island.
//!
//! Variation is inver-over: each individual produces one offspring by a
//! chain of segment inversions and the offspring replaces its parent only
//! if it is no longer. On top of that a mapping operator (a PMX-repaired
//! segment transplant from a better tour into a worse one) is applied
//! when the subpopulation's best improves slowly enough.

use std::fmt;

use rand::Rng;

use crate::tour::Tour;
use crate::tsplib::TspInstance;

#[derive(Debug, Clone, PartialEq)]
pub enum EaError {
    /// Velocity requested with zero generations between the two bests.
    ZeroGenerationGap,
    PopulationTooSmall(usize),
    DimensionMismatch {
        left: usize,
        right: usize,
    },
    InvalidRate(f64),
}

impl fmt::Display for EaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroGenerationGap => f.write_str("velocity needs a generation gap of at least 1"),
            Self::PopulationTooSmall(n) => write!(f, "population of {n} is too small"),
            Self::DimensionMismatch { left, right } => {
                write!(f, "tours have different dimensions ({left} vs {right})")
            }
            Self::InvalidRate(p) => write!(f, "rate {p} is not a probability"),
        }
    }
}

impl std::error::Error for EaError {}

/// Initial rates and the velocity threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EaParams {
    pub p_mu0: f64,
    pub p_ma0: f64,
    pub velocity_threshold: f64,
}

impl Default for EaParams {
    fn default() -> Self {
        EaParams {
            p_mu0: 0.02,
            p_ma0: 0.05,
            velocity_threshold: 5000.0,
        }
    }
}

/// Mutation rate decays linearly to half its initial value over the run;
/// mapping rate grows linearly to three times its initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSchedule {
    pub p_mu0: f64,
    pub p_ma0: f64,
    /// Maximal number of generations.
    pub horizon: u64,
    /// Generations done so far.
    pub generation: u64,
}

impl RateSchedule {
    pub fn new(p_mu0: f64, p_ma0: f64, horizon: u64) -> Self {
        RateSchedule {
            p_mu0,
            p_ma0,
            horizon: horizon.max(1),
            generation: 0,
        }
    }

    /// `(p_mu, p_ma)` at the current generation; generations past the
    /// horizon are clamped to it.
    pub fn current_rates(&self) -> (f64, f64) {
        let progress = self.generation.min(self.horizon) as f64 / self.horizon as f64;
        let p_mu = self.p_mu0 * (1.0 - progress * 0.5);
        let p_ma = self.p_ma0 * (progress * 2.0 + 1.0);
        (p_mu, p_ma)
    }

    pub fn advance(&mut self) {
        self.generation += 1;
    }
}

/// Bookkeeping for `v = |f_b - f_b'| / dg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityState {
    /// Best length seen so far.
    pub best: u64,
    /// The best before the latest improvement; `None` until one happened.
    pub previous_best: Option<u64>,
    /// Generations between `previous_best` and `best`.
    pub generation_gap: u64,
    pub generations_since_best: u64,
    pub threshold: f64,
}

impl VelocityState {
    pub fn new(initial_best: u64, threshold: f64) -> Self {
        VelocityState {
            best: initial_best,
            previous_best: None,
            generation_gap: 0,
            generations_since_best: 0,
            threshold,
        }
    }

    /// Records the subpopulation best after one more generation.
    pub fn observe(&mut self, best_now: u64) {
        self.generations_since_best += 1;
        if best_now < self.best {
            self.previous_best = Some(self.best);
            self.generation_gap = self.generations_since_best;
            self.best = best_now;
            self.generations_since_best = 0;
        }
    }

    pub fn mapping_allowed(&self) -> bool {
        match evolutionary_velocity(self) {
            Ok(v) => v < self.threshold,
            Err(_) => false,
        }
    }
}

/// Improvement of the best per generation. Infinite until the first
/// improvement has been observed.
pub fn evolutionary_velocity(state: &VelocityState) -> Result<f64, EaError> {
    let Some(previous) = state.previous_best else {
        return Ok(f64::INFINITY);
    };
    if state.generation_gap == 0 {
        return Err(EaError::ZeroGenerationGap);
    }
    Ok(previous.abs_diff(state.best) as f64 / state.generation_gap as f64)
}

/// Per-subpopulation EA state carried across generations.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub rates: RateSchedule,
    pub velocity: VelocityState,
}

impl EvolutionState {
    pub fn new(params: &EaParams, horizon: u64, initial_best: u64) -> Self {
        EvolutionState {
            rates: RateSchedule::new(params.p_mu0, params.p_ma0, horizon),
            velocity: VelocityState::new(initial_best, params.velocity_threshold),
        }
    }
}

/// Picks a pool index uniformly, skipping `exclude`.
#[inline]
fn pick_other<R: Rng + ?Sized>(len: usize, exclude: Option<usize>, rng: &mut R) -> usize {
    match exclude {
        Some(skip) => {
            let j = rng.gen_range(0..len - 1);
            if j >= skip {
                j + 1
            } else {
                j
            }
        }
        None => rng.gen_range(0..len),
    }
}

/// Runs the inver-over inversion chain on `work`, logging every inversion
/// as `(from_pos, to_pos)` so the caller can undo it.
fn inver_over_chain<R: Rng + ?Sized>(
    work: &mut Tour,
    pool: &[Tour],
    exclude: Option<usize>,
    p_mu: f64,
    inst: &TspInstance,
    rng: &mut R,
    log: &mut Vec<(u32, u32)>,
) {
    let k = work.dimension();
    let mut c = rng.gen_range(0..k);
    // Each inversion makes c' adjacent to c; k inversions bound the chain.
    for _ in 0..k {
        let next = if rng.gen::<f64>() < p_mu {
            let x = rng.gen_range(0..k - 1);
            if x >= c {
                x + 1
            } else {
                x
            }
        } else {
            pool[pick_other(pool.len(), exclude, rng)].successor(c)
        };
        if work.successor(c) == next || work.predecessor(c) == next {
            break;
        }
        let pc = work.position_of(c);
        let from = if pc + 1 == k { 0 } else { pc + 1 };
        let to = work.position_of(next);
        work.invert(from, to, inst);
        log.push((from as u32, to as u32));
        c = next;
    }
}

/// One inver-over offspring of `parent` guided by `pool`; returns the
/// offspring if it is not longer than the parent, else the parent.
pub fn inver_over_step<R: Rng + ?Sized>(
    parent: &Tour,
    pool: &[Tour],
    p_mu: f64,
    inst: &TspInstance,
    rng: &mut R,
) -> Result<Tour, EaError> {
    if pool.is_empty() {
        return Err(EaError::PopulationTooSmall(0));
    }
    if !(0.0..=1.0).contains(&p_mu) {
        return Err(EaError::InvalidRate(p_mu));
    }
    if let Some(t) = pool.iter().find(|t| t.dimension() != parent.dimension()) {
        return Err(EaError::DimensionMismatch {
            left: parent.dimension(),
            right: t.dimension(),
        });
    }
    let mut child = parent.clone();
    let mut log = Vec::new();
    inver_over_chain(&mut child, pool, None, p_mu, inst, rng, &mut log);
    if child.length() <= parent.length() {
        Ok(child)
    } else {
        Ok(parent.clone())
    }
}

/// Replaces the segment of `worse` starting at position `start` with the
/// `len` cities that follow the same anchor city in `better`, then
/// resolves duplicates outside the segment with the PMX mapping.
pub fn transplant_segment(
    worse: &Tour,
    better: &Tour,
    start: usize,
    len: usize,
    inst: &TspInstance,
) -> Tour {
    let k = worse.dimension();
    let anchor = worse.city_at(start);
    let from_better = better.position_of(anchor);
    let mut slot_in_better = vec![u32::MAX; k];
    let mut replaced = Vec::with_capacity(len);
    let mut child: Vec<u32> = worse.raw_order().to_vec();
    for j in 0..len {
        let incoming = better.city_at((from_better + j) % k);
        let pos = (start + j) % k;
        replaced.push(worse.city_at(pos) as u32);
        slot_in_better[incoming] = j as u32;
        child[pos] = incoming as u32;
    }
    for off in len..k {
        let pos = (start + off) % k;
        let mut city = child[pos];
        while slot_in_better[city as usize] != u32::MAX {
            city = replaced[slot_in_better[city as usize] as usize];
        }
        child[pos] = city;
    }
    let mut out = worse.clone();
    out.reset_from_order(&child, inst);
    out
}

/// Mapping operator on a pair. The longer tour is the one rewritten; on a
/// tie the second argument counts as the worse one.
pub fn mapping_operator<R: Rng + ?Sized>(
    a: &Tour,
    b: &Tour,
    inst: &TspInstance,
    rng: &mut R,
) -> Result<Tour, EaError> {
    if a.dimension() != b.dimension() {
        return Err(EaError::DimensionMismatch {
            left: a.dimension(),
            right: b.dimension(),
        });
    }
    let (worse, better) = if a.length() > b.length() {
        (a, b)
    } else {
        (b, a)
    };
    let k = worse.dimension();
    let start = rng.gen_range(0..k);
    let len = rng.gen_range(2..k);
    Ok(transplant_segment(worse, better, start, len, inst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationOutcome {
    pub best_length: u64,
    pub accepted_offspring: usize,
    pub mapped: bool,
}

/// One generation over a subpopulation: an inver-over offspring for every
/// individual, then at most one mapping when the velocity gate is open.
pub fn evolve_generation<R: Rng + ?Sized>(
    tours: &mut [Tour],
    state: &mut EvolutionState,
    inst: &TspInstance,
    rng: &mut R,
) -> Result<GenerationOutcome, EaError> {
    let n = tours.len();
    if n < 2 {
        return Err(EaError::PopulationTooSmall(n));
    }
    let (p_mu, p_ma) = state.rates.current_rates();
    let mut log = Vec::new();
    let mut accepted_offspring = 0;
    for idx in 0..n {
        let mut work = std::mem::take(&mut tours[idx]);
        let parent_length = work.length();
        log.clear();
        inver_over_chain(&mut work, tours, Some(idx), p_mu, inst, rng, &mut log);
        if work.length() > parent_length {
            for &(from, to) in log.iter().rev() {
                work.invert(from as usize, to as usize, inst);
            }
            debug_assert_eq!(work.length(), parent_length);
        } else if !log.is_empty() {
            accepted_offspring += 1;
        }
        tours[idx] = work;
    }

    let mut mapped = false;
    if state.velocity.mapping_allowed() && rng.gen::<f64>() < p_ma {
        let i = rng.gen_range(0..n);
        let j = pick_other(n, Some(i), rng);
        let worse = if tours[i].length() > tours[j].length() {
            i
        } else {
            j
        };
        tours[worse] = mapping_operator(&tours[i], &tours[j], inst, rng)?;
        mapped = true;
    }

    let best_length = tours.iter().map(Tour::length).min().unwrap_or(u64::MAX);
    state.velocity.observe(best_length);
    state.rates.advance();
    Ok(GenerationOutcome {
        best_length,
        accepted_offspring,
        mapped,
    })
}
