//! CSV and Markdown rendering of experiment results.
//!
//! Raw file: `instance,mode,alpha,beta,interval,run_index,best_length`.
//! Aggregate file: `instance,mode,alpha,beta,interval,mean,stddev,optimum,
//! DF,t_stat,p_value,significant`. Classic rows leave `alpha`, `beta` and
//! the test columns empty. Floats use the shortest representation that
//! parses back to the same value.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::stats::WelchResult;

use super::config::ModeSpec;
use super::experiment::{RawRow, RunReport};
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawRecord {
    instance: String,
    mode: String,
    alpha: Option<f64>,
    beta: Option<f64>,
    interval: u64,
    run_index: usize,
    best_length: u64,
}

/// One parsed row of the aggregate file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub instance: String,
    pub mode: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub interval: u64,
    pub mean: f64,
    pub stddev: f64,
    pub optimum: Option<u64>,
    #[serde(rename = "DF")]
    pub df: Option<f64>,
    pub t_stat: Option<f64>,
    pub p_value: Option<f64>,
    pub significant: Option<bool>,
}

impl From<&RunReport> for AggregateRecord {
    fn from(r: &RunReport) -> Self {
        let (alpha, beta) = r.mode.alpha_beta().unzip();
        AggregateRecord {
            instance: r.instance.clone(),
            mode: r.mode.name().to_string(),
            alpha,
            beta,
            interval: r.interval,
            mean: r.mean,
            stddev: r.stddev,
            optimum: r.optimum,
            df: r.difficulty,
            t_stat: r.comparison.map(|c| c.t_stat),
            p_value: r.comparison.map(|c| c.p_value),
            significant: r.comparison.map(|c| c.significant),
        }
    }
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Io(e.to_string())
}

fn mode_from(mode: &str, alpha: Option<f64>, beta: Option<f64>) -> Result<ModeSpec, HarnessError> {
    match (mode, alpha, beta) {
        ("classic", _, _) => Ok(ModeSpec::Classic),
        ("gated", Some(alpha), Some(beta)) => Ok(ModeSpec::Gated { alpha, beta }),
        _ => Err(HarnessError::Config(format!(
            "raw CSV: bad mode `{mode}` (gated rows need alpha and beta)"
        ))),
    }
}

pub fn write_raw_csv<W: io::Write>(out: W, rows: &[RawRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        let (alpha, beta) = row.mode.alpha_beta().unzip();
        w.serialize(RawRecord {
            instance: row.instance.clone(),
            mode: row.mode.name().to_string(),
            alpha,
            beta,
            interval: row.interval,
            run_index: row.run_index,
            best_length: row.best_length,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn read_raw_csv<R: io::Read>(input: R) -> Result<Vec<RawRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize::<RawRecord>() {
        let rec = rec.map_err(|e| HarnessError::Config(format!("raw CSV: {e}")))?;
        rows.push(RawRow {
            mode: mode_from(&rec.mode, rec.alpha, rec.beta)?,
            instance: rec.instance,
            interval: rec.interval,
            run_index: rec.run_index,
            best_length: rec.best_length,
        });
    }
    Ok(rows)
}

pub fn write_aggregate_csv<W: io::Write>(
    out: W,
    reports: &[RunReport],
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(AggregateRecord::from(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn read_aggregate_csv<R: io::Read>(input: R) -> Result<Vec<AggregateRecord>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<AggregateRecord>()
        .map(|rec| rec.map_err(|e| HarnessError::Config(format!("aggregate CSV: {e}"))))
        .collect()
}

fn flag(text: String, comparison: Option<WelchResult>) -> String {
    match comparison {
        Some(c) if c.significant => format!("***{text}***"),
        _ => text,
    }
}

/// Markdown tables, one per instance. Cells whose mean differs
/// significantly from the classic cell at the same interval are set in
/// bold italics.
pub fn render_markdown(reports: &[RunReport]) -> String {
    let mut out = String::new();
    let mut instances: Vec<&str> = Vec::new();
    for r in reports {
        if !instances.contains(&r.instance.as_str()) {
            instances.push(&r.instance);
        }
    }
    for inst in instances {
        let _ = writeln!(out, "## {inst}\n");
        let _ = writeln!(
            out,
            "| Mode | alpha | beta | Interval | Outcomes average | Standard deviation | Optimal solution | DF | t | p |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|---|");
        for r in reports.iter().filter(|r| r.instance == inst) {
            let (alpha, beta) = r
                .mode
                .alpha_beta()
                .map_or((String::new(), String::new()), |(a, b)| {
                    (a.to_string(), b.to_string())
                });
            let c = r.comparison;
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.mode.name(),
                alpha,
                beta,
                flag(r.interval.to_string(), c),
                flag(format!("{:.1}", r.mean), c),
                flag(format!("{:.2}", r.stddev), c),
                r.optimum.map_or(String::new(), |o| o.to_string()),
                r.difficulty.map_or(String::new(), |d| format!("{d:.6}")),
                c.map_or(String::new(), |c| format!("{:.3}", c.t_stat)),
                c.map_or(String::new(), |c| format!("{:.4}", c.p_value)),
            );
        }
        out.push('\n');
    }
    out.push_str(
        "Comparisons: Welch two-sample t-test (unequal variances), two-tailed, \
         95% confidence, each gated cell against the classic cell at the same interval. \
         Significant cells are set in ***bold italics***.\n",
    );
    out
}

/// Writes `raw.csv` and `aggregate.csv` (and `report.md` for Markdown)
/// into `dir`, creating it if needed.
pub fn emit_reports(
    dir: &Path,
    raw: &[RawRow],
    reports: &[RunReport],
    format: ReportFormat,
) -> Result<(), HarnessError> {
    if reports.is_empty() {
        return Err(HarnessError::Config("no reports to emit".into()));
    }
    let io_err = |p: &Path, e: io::Error| HarnessError::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let raw_path = dir.join("raw.csv");
    write_raw_csv(
        std::fs::File::create(&raw_path).map_err(|e| io_err(&raw_path, e))?,
        raw,
    )?;
    let agg_path = dir.join("aggregate.csv");
    write_aggregate_csv(
        std::fs::File::create(&agg_path).map_err(|e| io_err(&agg_path, e))?,
        reports,
    )?;
    if format == ReportFormat::Markdown {
        let md_path = dir.join("report.md");
        std::fs::write(&md_path, render_markdown(reports)).map_err(|e| io_err(&md_path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::aggregate;

    fn sample_rows() -> Vec<RawRow> {
        let g = ModeSpec::Gated {
            alpha: 0.5,
            beta: 2.0,
        };
        let mut rows = Vec::new();
        for (i, len) in [7600u64, 7610, 7590].into_iter().enumerate() {
            rows.push(RawRow {
                instance: "berlin52".into(),
                mode: ModeSpec::Classic,
                interval: 500,
                run_index: i,
                best_length: len,
            });
        }
        for (i, len) in [7542u64, 7542, 7544].into_iter().enumerate() {
            rows.push(RawRow {
                instance: "berlin52".into(),
                mode: g,
                interval: 500,
                run_index: i,
                best_length: len,
            });
        }
        rows
    }

    #[test]
    fn raw_csv_shape_and_round_trip() {
        let rows = sample_rows();
        let mut buf = Vec::new();
        write_raw_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("instance,mode,alpha,beta,interval,run_index,best_length")
        );
        assert_eq!(lines.next(), Some("berlin52,classic,,,500,0,7600"));
        assert_eq!(text.lines().count(), 7);
        assert_eq!(read_raw_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn aggregate_csv_round_trip_is_exact() {
        let reports = aggregate(&sample_rows(), |_| Some(7542)).unwrap();
        let mut buf = Vec::new();
        write_aggregate_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "instance,mode,alpha,beta,interval,mean,stddev,optimum,DF,t_stat,p_value,significant\n"
        ));
        let parsed = read_aggregate_csv(&buf[..]).unwrap();
        assert_eq!(parsed.len(), 2);
        for (p, r) in parsed.iter().zip(&reports) {
            assert_eq!(*p, AggregateRecord::from(r));
        }
        assert_eq!(parsed[1].significant, Some(true));
        assert_eq!(parsed[0].significant, None);
    }

    #[test]
    fn markdown_flags_significant_cells() {
        let reports = aggregate(&sample_rows(), |_| Some(7542)).unwrap();
        let md = render_markdown(&reports);
        assert!(md.contains("## berlin52"));
        assert!(md.contains("| gated | 0.5 | 2 | ***500*** |"));
        assert!(md.contains("| classic |  |  | 500 |"));
        assert!(md.contains("Welch"));
    }

    #[test]
    fn emit_to_unwritable_path_fails() {
        let reports = aggregate(&sample_rows(), |_| None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = emit_reports(
            &blocker.join("sub"),
            &sample_rows(),
            &reports,
            ReportFormat::Csv,
        );
        assert!(matches!(err, Err(HarnessError::Io(_))));
        assert!(emit_reports(dir.path(), &[], &[], ReportFormat::Csv).is_err());
    }
}
