//! Experiment orchestration behind the `divmig` command-line tool.

pub mod config;
pub mod experiment;
pub mod report;

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use crate::diversity::{success_probability, DiversityParams};
use crate::island::{run_dea_with, IslandError, RunResult};
use crate::stats::StatsError;
use crate::tsplib::{
    known_optimum, OptimumRegistry, TspInstance, TsplibError, DEFAULT_MATRIX_THRESHOLD,
};

pub use config::{ExperimentConfig, ModeSpec};
pub use experiment::{
    aggregate, derive_seed, run_experiment, ExperimentOutcome, RawRow, RunReport,
};
pub use report::{emit_reports, render_markdown, ReportFormat};

#[derive(Debug, Clone, PartialEq)]
pub enum HarnessError {
    Config(String),
    Instance(TsplibError),
    Io(String),
    Run(String),
}

impl HarnessError {
    /// Process exit code: 1 for configuration or input errors, 2 for
    /// failures while running or writing results.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Instance(_) => 1,
            HarnessError::Io(_) | HarnessError::Run(_) => 2,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "configuration error: {msg}"),
            Self::Instance(e) => write!(f, "instance error: {e}"),
            Self::Io(msg) => write!(f, "I/O error: {msg}"),
            Self::Run(msg) => write!(f, "run failed: {msg}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<TsplibError> for HarnessError {
    fn from(e: TsplibError) -> Self {
        HarnessError::Instance(e)
    }
}

impl From<IslandError> for HarnessError {
    fn from(e: IslandError) -> Self {
        HarnessError::Run(e.to_string())
    }
}

impl From<StatsError> for HarnessError {
    fn from(e: StatsError) -> Self {
        HarnessError::Run(e.to_string())
    }
}

/// Loads the instance named by a config, applying its optimum override.
pub fn load_instance(cfg: &ExperimentConfig) -> Result<TspInstance, HarnessError> {
    let text = std::fs::read_to_string(&cfg.instance).map_err(|e| {
        HarnessError::Instance(TsplibError::Io(format!("{}: {e}", cfg.instance.display())))
    })?;
    let mut inst =
        TspInstance::parse_with(&text, &OptimumRegistry::new(), DEFAULT_MATRIX_THRESHOLD)?;
    if cfg.optimum.is_some() {
        inst.set_known_optimum(cfg.optimum);
    }
    Ok(inst)
}

/// One-paragraph summary of a TSPLIB file.
pub fn inspect(path: &Path) -> Result<String, HarnessError> {
    let inst = TspInstance::from_path(path)?;
    let mut out = String::new();
    let _ = writeln!(out, "name:      {}", inst.name());
    let _ = writeln!(out, "dimension: {}", inst.dimension());
    let _ = writeln!(out, "metric:    {}", inst.metric());
    let _ = writeln!(
        out,
        "optimum:   {}",
        inst.known_optimum()
            .map_or_else(|| "unknown".to_string(), |o| o.to_string())
    );
    if !inst.coords().is_empty() {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for &(x, y) in inst.coords() {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let _ = writeln!(out, "bounds:    x in [{x0}, {x1}], y in [{y0}, {y1}]");
    }
    let identity: u64 = (0..inst.dimension())
        .map(|i| inst.dist(i, (i + 1) % inst.dimension()) as u64)
        .sum();
    let _ = writeln!(out, "identity tour length: {identity}");
    Ok(out)
}

/// Executes a single run: the first configured mode at the first interval.
/// Writes `trace.csv` (one row per island per round) into `out_dir`.
pub fn run_single(cfg: &ExperimentConfig) -> Result<(RunResult, String), HarnessError> {
    let inst = load_instance(cfg)?;
    let mode = cfg.modes[0];
    let interval = cfg.intervals[0];
    let seed = derive_seed(cfg.seed, mode, interval, 0);
    let result = run_dea_with(&inst, &cfg.dea_config(mode, interval, seed), |_, _| {})?;

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", cfg.out_dir.display())))?;
    let path = cfg.out_dir.join("trace.csv");
    let mut w = csv::Writer::from_path(&path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| HarnessError::Io(e.to_string());
    w.write_record([
        "round",
        "island",
        "diversity",
        "probability",
        "accepted",
        "best_so_far",
    ])
    .map_err(io)?;
    for (round, records) in result.rounds.iter().enumerate() {
        for rec in records {
            w.write_record([
                round.to_string(),
                rec.island.to_string(),
                rec.diversity.to_string(),
                rec.probability.to_string(),
                rec.accepted.to_string(),
                result.best_trace[round].to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))?;

    let mut summary = String::new();
    let _ = writeln!(summary, "instance:    {}", inst.name());
    let _ = writeln!(summary, "mode:        {}", mode.label());
    let _ = writeln!(summary, "interval:    {interval}");
    let _ = writeln!(summary, "rounds:      {}", cfg.rounds);
    let _ = writeln!(summary, "best length: {}", result.best_length);
    if let Some(opt) = inst.known_optimum() {
        let gap = (result.best_length as f64 - opt as f64) / opt as f64;
        let _ = writeln!(summary, "optimum:     {opt} (gap {:.4}%)", gap * 100.0);
    }
    let _ = writeln!(summary, "acceptance:  {:.4}", result.acceptance_rate());
    let _ = writeln!(summary, "trace:       {}", path.display());
    Ok((result, summary))
}

/// Full grid: runs, aggregates and writes CSV plus Markdown reports.
pub fn experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let inst = load_instance(cfg)?;
    let outcome = run_experiment(cfg, &inst)?;
    emit_reports(
        &cfg.out_dir,
        &outcome.raw,
        &outcome.reports,
        ReportFormat::Markdown,
    )?;
    Ok(outcome)
}

/// Recomputes aggregates and t-tests from a raw results file. `optimum`
/// overrides the built-in table for every instance in the file.
pub fn stats_from_raw(path: &Path, optimum: Option<u64>) -> Result<Vec<RunReport>, HarnessError> {
    let file = std::fs::File::open(path)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let rows = report::read_raw_csv(file)?;
    aggregate(&rows, |name| optimum.or_else(|| known_optimum(name)))
}

/// Two-column `d p` dump of the success probability for plotting.
pub fn probability_curve(alpha: f64, beta: f64, points: usize) -> Result<String, HarnessError> {
    let params =
        DiversityParams::new(alpha, beta).map_err(|e| HarnessError::Config(e.to_string()))?;
    if points < 2 {
        return Err(HarnessError::Config("curve needs at least 2 points".into()));
    }
    let mut out = format!("# d p  (alpha = {alpha}, beta = {beta})\n");
    for i in 0..points {
        let d = i as f64 / (points - 1) as f64;
        let p = success_probability(d, &params).map_err(|e| HarnessError::Run(e.to_string()))?;
        let _ = writeln!(out, "{d} {p}");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 1);
        assert_eq!(
            HarnessError::Instance(TsplibError::MissingField("NAME")).exit_code(),
            1
        );
        assert_eq!(HarnessError::Io("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Run("x".into()).exit_code(), 2);
    }

    #[test]
    fn curve_endpoints() {
        let curve = probability_curve(0.5, 2.0, 5).unwrap();
        let lines: Vec<&str> = curve.lines().skip(1).collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "0 1");
        assert_eq!(lines[4], "1 0");
        assert_eq!(lines[1], "0.25 0.25");
        assert!(probability_curve(-1.0, 1.0, 5).is_err());
        assert!(probability_curve(1.0, 1.0, 1).is_err());
    }
}
