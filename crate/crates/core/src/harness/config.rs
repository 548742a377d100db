//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Every parallel/evolutionary key defaults to the reference
//! settings (16 islands of 100, one migrant, 2000 rounds, threshold 5000,
//! initial rates 0.02 / 0.05).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diversity::{DiversityMeasure, DiversityParams};
use crate::ea::EaParams;
use crate::island::{DeaConfig, MigrationPolicy, Topology};

use super::HarnessError;

/// Algorithm variant of one experiment cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeSpec {
    Classic,
    Gated { alpha: f64, beta: f64 },
}

impl ModeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModeSpec::Classic => "classic",
            ModeSpec::Gated { .. } => "gated",
        }
    }

    pub fn alpha_beta(&self) -> Option<(f64, f64)> {
        match *self {
            ModeSpec::Classic => None,
            ModeSpec::Gated { alpha, beta } => Some((alpha, beta)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModeSpec::Classic => "classic".to_string(),
            ModeSpec::Gated { alpha, beta } => format!("gated(a={alpha}, b={beta})"),
        }
    }
}

pub const KNOWN_KEYS: &[&str] = &[
    "instance",
    "modes",
    "alphas",
    "betas",
    "intervals",
    "repetitions",
    "islands",
    "subpop",
    "migration_size",
    "rounds",
    "velocity_threshold",
    "p_mu0",
    "p_ma0",
    "seed",
    "out_dir",
    "measure",
    "optimum",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: PathBuf,
    /// Expanded cells: `classic` plus one `gated` cell per (alpha, beta).
    pub modes: Vec<ModeSpec>,
    pub intervals: Vec<u64>,
    pub repetitions: usize,
    pub islands: usize,
    pub subpop: usize,
    pub migration_size: usize,
    pub rounds: usize,
    pub ea: EaParams,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub measure: DiversityMeasure,
    /// Overrides the registered optimum for the instance.
    pub optimum: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // Relative paths are relative to the config file.
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        if cfg.instance.is_relative() {
            cfg.instance = base.join(&cfg.instance);
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected `key = value`", idx + 1))
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(HarnessError::Config(format!(
                    "line {}: unknown key `{key}`",
                    idx + 1
                )));
            }
            if map
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(HarnessError::Config(format!(
                    "line {}: duplicate key `{key}`",
                    idx + 1
                )));
            }
        }

        let defaults = EaParams::default();
        let instance = map
            .get("instance")
            .ok_or_else(|| HarnessError::Config("missing key `instance`".into()))?
            .into();
        let alphas: Vec<f64> = list(&map, "alphas")?.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
        let betas: Vec<f64> = list(&map, "betas")?.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
        let mode_names: Vec<String> =
            list(&map, "modes")?.unwrap_or_else(|| vec!["classic".into(), "gated".into()]);
        let mut modes = Vec::new();
        for name in &mode_names {
            match name.as_str() {
                "classic" => modes.push(ModeSpec::Classic),
                "gated" => {
                    for &alpha in &alphas {
                        for &beta in &betas {
                            DiversityParams::new(alpha, beta)
                                .map_err(|e| HarnessError::Config(format!("alphas/betas: {e}")))?;
                            modes.push(ModeSpec::Gated { alpha, beta });
                        }
                    }
                }
                other => {
                    return Err(HarnessError::Config(format!(
                        "modes: unknown mode `{other}` (expected classic or gated)"
                    )))
                }
            }
        }
        let intervals: Vec<u64> = list(&map, "intervals")?
            .ok_or_else(|| HarnessError::Config("missing key `intervals`".into()))?;
        let measure = match map.get("measure").map(String::as_str) {
            None | Some("best_based") => DiversityMeasure::BestBased,
            Some("pairwise") => DiversityMeasure::Pairwise,
            Some(other) => {
                return Err(HarnessError::Config(format!(
                    "measure: unknown value `{other}` (expected best_based or pairwise)"
                )))
            }
        };

        let cfg = ExperimentConfig {
            instance,
            modes,
            intervals,
            repetitions: scalar(&map, "repetitions")?.unwrap_or(30),
            islands: scalar(&map, "islands")?.unwrap_or(16),
            subpop: scalar(&map, "subpop")?.unwrap_or(100),
            migration_size: scalar(&map, "migration_size")?.unwrap_or(1),
            rounds: scalar(&map, "rounds")?.unwrap_or(2000),
            ea: EaParams {
                p_mu0: scalar(&map, "p_mu0")?.unwrap_or(defaults.p_mu0),
                p_ma0: scalar(&map, "p_ma0")?.unwrap_or(defaults.p_ma0),
                velocity_threshold: scalar(&map, "velocity_threshold")?
                    .unwrap_or(defaults.velocity_threshold),
            },
            seed: scalar(&map, "seed")?.unwrap_or(0),
            out_dir: map
                .get("out_dir")
                .map_or_else(|| "results".into(), PathBuf::from),
            measure,
            optimum: scalar(&map, "optimum")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: &str| Err(HarnessError::Config(msg.to_string()));
        if self.modes.is_empty() {
            return fail("modes: at least one mode is required");
        }
        if self.intervals.is_empty() || self.intervals.contains(&0) {
            return fail("intervals: need at least one interval, all >= 1");
        }
        if self.repetitions < 2 {
            return fail("repetitions: need at least 2 runs per cell for the t-test");
        }
        if self.islands < 2 {
            return fail("islands: a ring needs at least 2 islands");
        }
        if self.subpop < 2 {
            return fail("subpop: need at least 2 individuals per island");
        }
        if self.migration_size == 0 || self.migration_size > self.subpop {
            return fail("migration_size: must be between 1 and subpop");
        }
        if self.rounds == 0 {
            return fail("rounds: must be >= 1");
        }
        for (name, p) in [("p_mu0", self.ea.p_mu0), ("p_ma0", self.ea.p_ma0)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(HarnessError::Config(format!(
                    "{name}: {p} is not a probability"
                )));
            }
        }
        // p_ma can grow to three times its initial value.
        if self.ea.p_ma0 * 3.0 > 1.0 {
            return fail("p_ma0: must be <= 1/3 so the mapping rate stays a probability");
        }
        if !(self.ea.velocity_threshold > 0.0) {
            return fail("velocity_threshold: must be positive");
        }
        Ok(())
    }

    /// Island-model settings for one run of `mode` at `interval`.
    pub fn dea_config(&self, mode: ModeSpec, interval: u64, seed: u64) -> DeaConfig {
        let (alpha, beta) = mode.alpha_beta().unwrap_or((1.0, 1.0));
        let diversity = DiversityParams {
            alpha,
            beta,
            measure: self.measure,
        };
        let policy = MigrationPolicy {
            topology: Topology::Ring,
            interval,
            size: self.migration_size,
            mode: match mode {
                ModeSpec::Classic => crate::island::MigrationMode::Classic,
                ModeSpec::Gated { .. } => crate::island::MigrationMode::Gated,
            },
            diversity,
            rounds: self.rounds,
        };
        DeaConfig {
            islands: self.islands,
            subpop_size: self.subpop,
            policy,
            ea: self.ea,
            seed,
        }
    }
}

fn scalar<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, HarnessError>
where
    T::Err: std::fmt::Display,
{
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| HarnessError::Config(format!("{key}: `{v}`: {e}")))
        })
        .transpose()
}

fn list<T: FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<Vec<T>>, HarnessError>
where
    T::Err: std::fmt::Display,
{
    map.get(key)
        .map(|v| {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<T>()
                        .map_err(|e| HarnessError::Config(format!("{key}: `{s}`: {e}")))
                })
                .collect()
        })
        .transpose()
}
