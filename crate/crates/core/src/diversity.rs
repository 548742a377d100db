//! Subpopulation diversity and the diversity-dependent migration gate.
//!
//! Two tours are compared row by row on their connection matrices
//! (`a[l][m] = 1` iff city `m` directly follows city `l`). Every row of a
//! permutation's connection matrix holds exactly one 1, so two rows are
//! equal exactly when the two successors agree; everything here works on
//! successor arrays and never materialises a matrix.

use std::fmt;

use rand::Rng;

use crate::tour::Tour;

#[derive(Debug, Clone, PartialEq)]
pub enum DiversityError {
    DimensionMismatch { left: usize, right: usize },
    TooFewIndividuals(usize),
    BestIndexOutOfRange { index: usize, len: usize },
    DiversityOutOfRange(f64),
    InvalidParams { alpha: f64, beta: f64 },
}

impl fmt::Display for DiversityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { left, right } => {
                write!(f, "tours have different dimensions ({left} vs {right})")
            }
            Self::TooFewIndividuals(n) => {
                write!(f, "diversity needs at least 2 individuals, got {n}")
            }
            Self::BestIndexOutOfRange { index, len } => {
                write!(f, "best index {index} out of range for {len} individuals")
            }
            Self::DiversityOutOfRange(d) => write!(f, "diversity {d} is outside [0, 1]"),
            Self::InvalidParams { alpha, beta } => {
                write!(
                    f,
                    "alpha and beta must be non-negative (got {alpha}, {beta})"
                )
            }
        }
    }
}

impl std::error::Error for DiversityError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DiversityMeasure {
    /// Mean difference between the best individual and each other one.
    #[default]
    BestBased,
    /// Mean difference over all unordered pairs.
    Pairwise,
}

impl DiversityMeasure {
    pub fn name(self) -> &'static str {
        match self {
            DiversityMeasure::BestBased => "best_based",
            DiversityMeasure::Pairwise => "pairwise",
        }
    }
}

/// Shape parameters of the success probability `p = (1 - d^alpha)^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityParams {
    pub alpha: f64,
    pub beta: f64,
    pub measure: DiversityMeasure,
}

impl DiversityParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, DiversityError> {
        if !(alpha >= 0.0 && beta >= 0.0) {
            return Err(DiversityError::InvalidParams { alpha, beta });
        }
        Ok(DiversityParams {
            alpha,
            beta,
            measure: DiversityMeasure::BestBased,
        })
    }

    pub fn with_measure(mut self, measure: DiversityMeasure) -> Self {
        self.measure = measure;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    pub d: f64,
    /// BEST_BASED: difference to the best (0 for the best itself).
    /// PAIRWISE: mean difference to every other individual.
    pub per_individual: Vec<f64>,
    pub computed_at_round: usize,
}

/// `D = 1 - k'/k` where `k'` counts cities with the same successor in both tours.
pub fn tour_difference(x: &Tour, y: &Tour) -> Result<f64, DiversityError> {
    if x.dimension() != y.dimension() {
        return Err(DiversityError::DimensionMismatch {
            left: x.dimension(),
            right: y.dimension(),
        });
    }
    let k = x.dimension();
    let same = (0..k).filter(|&c| x.successor(c) == y.successor(c)).count();
    Ok(1.0 - same as f64 / k as f64)
}

fn difference_to(succ: &[u32], y: &Tour) -> f64 {
    let k = succ.len();
    let same = (0..k)
        .filter(|&c| succ[c] as usize == y.successor(c))
        .count();
    1.0 - same as f64 / k as f64
}

/// Index of the shortest tour; ties go to the lowest index.
pub fn best_index(tours: &[Tour]) -> Option<usize> {
    tours
        .iter()
        .enumerate()
        .min_by_key(|(i, t)| (t.length(), *i))
        .map(|(i, _)| i)
}

pub fn subpop_diversity(
    tours: &[Tour],
    best: usize,
    measure: DiversityMeasure,
) -> Result<DiversityReport, DiversityError> {
    let ni = tours.len();
    if ni < 2 {
        return Err(DiversityError::TooFewIndividuals(ni));
    }
    if best >= ni {
        return Err(DiversityError::BestIndexOutOfRange {
            index: best,
            len: ni,
        });
    }
    let k = tours[0].dimension();
    if let Some(t) = tours.iter().find(|t| t.dimension() != k) {
        return Err(DiversityError::DimensionMismatch {
            left: k,
            right: t.dimension(),
        });
    }

    let mut succ = Vec::with_capacity(k);
    match measure {
        DiversityMeasure::BestBased => {
            tours[best].successors_into(&mut succ);
            let per_individual: Vec<f64> = tours
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    if i == best {
                        0.0
                    } else {
                        difference_to(&succ, t)
                    }
                })
                .collect();
            let d = per_individual.iter().sum::<f64>() / (ni - 1) as f64;
            Ok(DiversityReport {
                d,
                per_individual,
                computed_at_round: 0,
            })
        }
        DiversityMeasure::Pairwise => {
            let mut per_individual = vec![0.0; ni];
            let mut total = 0.0;
            for x in 0..ni {
                tours[x].successors_into(&mut succ);
                for y in (x + 1)..ni {
                    let diff = difference_to(&succ, &tours[y]);
                    total += diff;
                    per_individual[x] += diff;
                    per_individual[y] += diff;
                }
            }
            for v in &mut per_individual {
                *v /= (ni - 1) as f64;
            }
            let pairs = (ni * (ni - 1) / 2) as f64;
            Ok(DiversityReport {
                d: total / pairs,
                per_individual,
                computed_at_round: 0,
            })
        }
    }
}

/// `p = (1 - d^alpha)^beta`, with `0^0 = 1`.
pub fn success_probability(d: f64, params: &DiversityParams) -> Result<f64, DiversityError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(DiversityError::DiversityOutOfRange(d));
    }
    // f64::powf already follows the 0^0 = 1 convention.
    Ok((1.0 - d.powf(params.alpha)).powf(params.beta))
}

/// Draws `r` uniformly from `[0, 1)` and accepts iff `r < p`.
pub fn accept_migrants<R: Rng + ?Sized>(
    d: f64,
    params: &DiversityParams,
    rng: &mut R,
) -> Result<bool, DiversityError> {
    let p = success_probability(d, params)?;
    let r: f64 = rng.gen();
    Ok(r < p)
}
