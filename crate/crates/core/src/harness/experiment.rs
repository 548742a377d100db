//! Repeated-run experiments over (mode, interval) cells.

use rayon::prelude::*;

use crate::island::run_dea;
use crate::stats::{difficulty, mean, sample_stddev, welch_t_test, WelchResult};
use crate::tsplib::TspInstance;

use super::config::{ExperimentConfig, ModeSpec};
use super::HarnessError;

/// Confidence level of the cell-versus-classic comparisons.
pub const CONFIDENCE: f64 = 0.95;

/// One row of the raw results file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub instance: String,
    pub mode: ModeSpec,
    pub interval: u64,
    pub run_index: usize,
    pub best_length: u64,
}

/// Aggregate of one (mode, interval) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub mode: ModeSpec,
    pub interval: u64,
    pub lengths: Vec<u64>,
    pub mean: f64,
    pub stddev: f64,
    pub optimum: Option<u64>,
    pub difficulty: Option<f64>,
    /// Welch test of this cell against the classic cell at the same
    /// interval (`t > 0`: this cell has the larger, i.e. worse, mean).
    pub comparison: Option<WelchResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub raw: Vec<RawRow>,
    pub reports: Vec<RunReport>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mode_key(mode: ModeSpec) -> u64 {
    match mode {
        ModeSpec::Classic => 0,
        ModeSpec::Gated { alpha, beta } => {
            (splitmix64(alpha.to_bits()) ^ splitmix64(beta.to_bits()).rotate_left(17)) | 1
        }
    }
}

/// Seed of run `run_index` in cell (`mode`, `interval`).
pub fn derive_seed(master: u64, mode: ModeSpec, interval: u64, run_index: usize) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ mode_key(mode));
    h = splitmix64(h ^ interval);
    splitmix64(h ^ run_index as u64)
}

/// Runs every cell `repetitions` times and aggregates the results.
/// Runs execute in parallel; results do not depend on scheduling.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    inst: &TspInstance,
) -> Result<ExperimentOutcome, HarnessError> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &mode in &cfg.modes {
        for &interval in &cfg.intervals {
            for run_index in 0..cfg.repetitions {
                tasks.push((mode, interval, run_index));
            }
        }
    }
    let raw: Vec<RawRow> = tasks
        .par_iter()
        .map(|&(mode, interval, run_index)| {
            let seed = derive_seed(cfg.seed, mode, interval, run_index);
            let result = run_dea(inst, &cfg.dea_config(mode, interval, seed))?;
            Ok(RawRow {
                instance: inst.name().to_string(),
                mode,
                interval,
                run_index,
                best_length: result.best_length,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    let optimum = cfg.optimum.or(inst.known_optimum());
    let reports = aggregate(&raw, |_| optimum)?;
    Ok(ExperimentOutcome { raw, reports })
}

/// Groups raw rows into cells (first-appearance order) and compares every
/// non-classic cell with the classic cell of the same instance and interval.
pub fn aggregate<F>(raw: &[RawRow], optimum_of: F) -> Result<Vec<RunReport>, HarnessError>
where
    F: Fn(&str) -> Option<u64>,
{
    let mut reports: Vec<RunReport> = Vec::new();
    for row in raw {
        let existing = reports.iter_mut().find(|r| {
            r.instance == row.instance && r.mode == row.mode && r.interval == row.interval
        });
        match existing {
            Some(r) => r.lengths.push(row.best_length),
            None => reports.push(RunReport {
                instance: row.instance.clone(),
                mode: row.mode,
                interval: row.interval,
                lengths: vec![row.best_length],
                mean: 0.0,
                stddev: 0.0,
                optimum: optimum_of(&row.instance),
                difficulty: None,
                comparison: None,
            }),
        }
    }
    for r in &mut reports {
        let xs: Vec<f64> = r.lengths.iter().map(|&v| v as f64).collect();
        r.mean = mean(&xs);
        r.stddev = sample_stddev(&xs);
        r.difficulty = r
            .optimum
            .map(|o| difficulty(r.mean, o as f64))
            .transpose()?;
    }
    let baselines: Vec<(String, u64, Vec<f64>)> = reports
        .iter()
        .filter(|r| r.mode == ModeSpec::Classic)
        .map(|r| {
            (
                r.instance.clone(),
                r.interval,
                r.lengths.iter().map(|&v| v as f64).collect(),
            )
        })
        .collect();
    for r in reports.iter_mut().filter(|r| r.mode != ModeSpec::Classic) {
        let base = baselines
            .iter()
            .find(|(inst, interval, _)| *inst == r.instance && *interval == r.interval);
        if let Some((_, _, base)) = base {
            let xs: Vec<f64> = r.lengths.iter().map(|&v| v as f64).collect();
            if xs.len() >= 2 && base.len() >= 2 {
                r.comparison = Some(welch_t_test(&xs, base, CONFIDENCE)?);
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let modes = [
            ModeSpec::Classic,
            ModeSpec::Gated {
                alpha: 0.5,
                beta: 1.0,
            },
            ModeSpec::Gated {
                alpha: 1.0,
                beta: 0.5,
            },
            ModeSpec::Gated {
                alpha: 2.0,
                beta: 2.0,
            },
        ];
        let mut seen = HashSet::new();
        for master in 0..3 {
            for &m in &modes {
                for interval in [100, 200, 300] {
                    for run in 0..30 {
                        let s = derive_seed(master, m, interval, run);
                        assert_eq!(s, derive_seed(master, m, interval, run));
                        assert!(seen.insert(s));
                    }
                }
            }
        }
    }

    fn row(mode: ModeSpec, interval: u64, run_index: usize, best_length: u64) -> RawRow {
        RawRow {
            instance: "toy".into(),
            mode,
            interval,
            run_index,
            best_length,
        }
    }

    #[test]
    fn aggregate_pairs_with_classic() {
        let g = ModeSpec::Gated {
            alpha: 0.5,
            beta: 1.0,
        };
        let raw = vec![
            row(ModeSpec::Classic, 10, 0, 100),
            row(ModeSpec::Classic, 10, 1, 102),
            row(g, 10, 0, 90),
            row(g, 10, 1, 91),
            row(g, 20, 0, 95),
            row(g, 20, 1, 96),
        ];
        let reports = aggregate(&raw, |_| Some(90)).unwrap();
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].mean, 101.0);
        assert_eq!(reports[0].stddev, 2f64.sqrt());
        assert!(reports[0].comparison.is_none());
        assert_eq!(reports[1].difficulty, Some(0.5 / 90.0));
        assert!(reports[1].comparison.unwrap().t_stat < 0.0);
        // no classic cell at interval 20
        assert!(reports[2].comparison.is_none());
    }
}
