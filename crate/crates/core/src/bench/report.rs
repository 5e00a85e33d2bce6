//! Experiment reports and their JSON and CSV encodings.
//!
//! The CSV form starts with one `# report: {...}` comment line carrying the
//! configuration and graph size as JSON, followed by a header and one row
//! per (run, iteration), one row per run and the aggregate rows. Both
//! encodings round-trip exactly.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{BenchError, ExperimentConfig, OutputFormat};
use crate::trace::PartitionTrace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub warmup: bool,
    pub total_secs: f64,
    pub init_secs: f64,
    pub iteration_secs: Vec<f64>,
    pub peak_bytes: u64,
    pub iterations_executed: usize,
    pub terminated_early: bool,
    pub block_count: usize,
}

impl RunRecord {
    pub fn from_trace(run: usize, warmup: bool, total_secs: f64, peak_bytes: u64, t: &PartitionTrace) -> Self {
        RunRecord {
            run,
            warmup,
            total_secs,
            init_secs: t.init_time.as_secs_f64(),
            iteration_secs: t.iteration_times.iter().map(|d| d.as_secs_f64()).collect(),
            peak_bytes,
            iterations_executed: t.iterations_executed,
            terminated_early: t.terminated_early,
            block_count: t.block_count(),
        }
    }
}

/// Means over measured runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub measured_runs: usize,
    pub mean_total_secs: f64,
    pub mean_init_secs: f64,
    /// Entry `i` averages iteration `i + 1` over the runs that executed it.
    pub mean_iteration_secs: Vec<f64>,
    pub mean_peak_bytes: f64,
    pub block_count: usize,
}

impl Aggregate {
    /// `None` when there is no measured run.
    pub fn of(runs: &[RunRecord]) -> Option<Aggregate> {
        let measured: Vec<&RunRecord> = runs.iter().filter(|r| !r.warmup).collect();
        let n = measured.len();
        if n == 0 {
            return None;
        }
        let mean = |f: &dyn Fn(&RunRecord) -> f64| measured.iter().map(|r| f(r)).sum::<f64>() / n as f64;
        let depth = measured.iter().map(|r| r.iteration_secs.len()).max().unwrap_or(0);
        let mean_iteration_secs = (0..depth)
            .map(|i| {
                let xs: Vec<f64> = measured.iter().filter_map(|r| r.iteration_secs.get(i).copied()).collect();
                xs.iter().sum::<f64>() / xs.len() as f64
            })
            .collect();
        Some(Aggregate {
            measured_runs: n,
            mean_total_secs: mean(&|r| r.total_secs),
            mean_init_secs: mean(&|r| r.init_secs),
            mean_iteration_secs,
            mean_peak_bytes: mean(&|r| r.peak_bytes as f64),
            block_count: measured[n - 1].block_count,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    OutOfMemory,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub run: usize,
    pub kind: FailureKind,
    pub peak_bytes: u64,
    pub limit_bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub runs: Vec<RunRecord>,
    pub aggregate: Option<Aggregate>,
    pub failure: Option<Failure>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: ExperimentConfig,
    vertex_count: usize,
    edge_count: usize,
    failure: Option<Failure>,
}

const COMMENT_PREFIX: &str = "# report: ";
const COLUMNS: [&str; 11] = [
    "kind",
    "run",
    "warmup",
    "iteration",
    "iteration_secs",
    "total_secs",
    "init_secs",
    "peak_bytes",
    "iterations_executed",
    "terminated_early",
    "block_count",
];

#[derive(Default)]
struct Row {
    cells: [String; 11],
}

impl Row {
    fn new(kind: &str) -> Self {
        let mut r = Row::default();
        r.cells[0] = kind.into();
        r
    }

    fn set(mut self, column: &str, value: impl ToString) -> Self {
        let i = COLUMNS.iter().position(|c| *c == column).expect("known column");
        self.cells[i] = value.to_string();
        self
    }
}

fn cell<'a>(rec: &'a csv::StringRecord, column: &str) -> &'a str {
    let i = COLUMNS.iter().position(|c| *c == column).expect("known column");
    rec.get(i).unwrap_or("")
}

fn parse<T: std::str::FromStr>(rec: &csv::StringRecord, column: &str) -> Result<T, BenchError> {
    let s = cell(rec, column);
    s.parse()
        .map_err(|_| BenchError::Report(format!("bad value `{s}` in column {column}")))
}

impl ExperimentReport {
    pub fn emit(&self, format: OutputFormat, out: &mut dyn Write) -> Result<(), BenchError> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut *out, self).map_err(|e| BenchError::Report(e.to_string()))?;
                out.write_all(b"\n").map_err(|e| BenchError::Report(e.to_string()))
            }
            OutputFormat::Csv => out
                .write_all(self.to_csv().as_bytes())
                .map_err(|e| BenchError::Report(e.to_string())),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, BenchError> {
        serde_json::from_str(s).map_err(|e| BenchError::Report(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let header = Header {
            config: self.config.clone(),
            vertex_count: self.vertex_count,
            edge_count: self.edge_count,
            failure: self.failure.clone(),
        };
        let mut out = format!("{COMMENT_PREFIX}{}\n", serde_json::to_string(&header).expect("header serializes"));
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut rows = Vec::new();
        for r in &self.runs {
            for (i, secs) in r.iteration_secs.iter().enumerate() {
                rows.push(
                    Row::new("iteration")
                        .set("run", r.run)
                        .set("warmup", r.warmup)
                        .set("iteration", i + 1)
                        .set("iteration_secs", secs),
                );
            }
            rows.push(
                Row::new("run")
                    .set("run", r.run)
                    .set("warmup", r.warmup)
                    .set("total_secs", r.total_secs)
                    .set("init_secs", r.init_secs)
                    .set("peak_bytes", r.peak_bytes)
                    .set("iterations_executed", r.iterations_executed)
                    .set("terminated_early", r.terminated_early)
                    .set("block_count", r.block_count),
            );
        }
        if let Some(a) = &self.aggregate {
            rows.push(
                Row::new("aggregate")
                    .set("run", a.measured_runs)
                    .set("total_secs", a.mean_total_secs)
                    .set("init_secs", a.mean_init_secs)
                    .set("peak_bytes", a.mean_peak_bytes)
                    .set("block_count", a.block_count),
            );
            for (i, secs) in a.mean_iteration_secs.iter().enumerate() {
                rows.push(Row::new("aggregate").set("iteration", i + 1).set("iteration_secs", secs));
            }
        }
        w.write_record(COLUMNS).expect("in-memory write");
        for row in rows {
            w.write_record(&row.cells).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
        out
    }

    pub fn from_csv(s: &str) -> Result<Self, BenchError> {
        let (first, rest) = s.split_once('\n').unwrap_or((s, ""));
        let json = first
            .strip_prefix(COMMENT_PREFIX)
            .ok_or_else(|| BenchError::Report("missing report comment line".into()))?;
        let header: Header = serde_json::from_str(json).map_err(|e| BenchError::Report(e.to_string()))?;
        let mut reader = csv::Reader::from_reader(rest.as_bytes());
        let mut runs: Vec<RunRecord> = Vec::new();
        let mut pending: Vec<f64> = Vec::new();
        let mut aggregate: Option<Aggregate> = None;
        for rec in reader.records() {
            let rec = rec.map_err(|e| BenchError::Report(e.to_string()))?;
            match cell(&rec, "kind") {
                "iteration" => pending.push(parse(&rec, "iteration_secs")?),
                "run" => runs.push(RunRecord {
                    run: parse(&rec, "run")?,
                    warmup: parse(&rec, "warmup")?,
                    total_secs: parse(&rec, "total_secs")?,
                    init_secs: parse(&rec, "init_secs")?,
                    iteration_secs: std::mem::take(&mut pending),
                    peak_bytes: parse(&rec, "peak_bytes")?,
                    iterations_executed: parse(&rec, "iterations_executed")?,
                    terminated_early: parse(&rec, "terminated_early")?,
                    block_count: parse(&rec, "block_count")?,
                }),
                "aggregate" if cell(&rec, "iteration").is_empty() => {
                    aggregate = Some(Aggregate {
                        measured_runs: parse(&rec, "run")?,
                        mean_total_secs: parse(&rec, "total_secs")?,
                        mean_init_secs: parse(&rec, "init_secs")?,
                        mean_iteration_secs: Vec::new(),
                        mean_peak_bytes: parse(&rec, "peak_bytes")?,
                        block_count: parse(&rec, "block_count")?,
                    })
                }
                "aggregate" => aggregate
                    .as_mut()
                    .ok_or_else(|| BenchError::Report("aggregate iteration row before aggregate row".into()))?
                    .mean_iteration_secs
                    .push(parse(&rec, "iteration_secs")?),
                other => return Err(BenchError::Report(format!("unknown row kind `{other}`"))),
            }
        }
        if !pending.is_empty() {
            return Err(BenchError::Report("iteration rows without a run row".into()));
        }
        Ok(ExperimentReport {
            config: header.config,
            vertex_count: header.vertex_count,
            edge_count: header.edge_count,
            runs,
            aggregate,
            failure: header.failure,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::bench::{Algorithm, InputSource};
    use crate::brs::GsmSpec;

    pub(crate) fn sample_report(runs: usize, iterations: usize) -> ExperimentReport {
        let runs: Vec<RunRecord> = (0..runs)
            .map(|r| RunRecord {
                run: r,
                warmup: r == 0,
                total_secs: 1.5 + r as f64 / 8.0,
                init_secs: 0.125,
                iteration_secs: (0..iterations).map(|i| 0.1 + (i * r) as f64 / 1024.0).collect(),
                peak_bytes: 1 << (20 + r),
                iterations_executed: iterations,
                terminated_early: r % 2 == 1,
                block_count: 42,
            })
            .collect();
        ExperimentReport {
            config: ExperimentConfig {
                algorithm: Algorithm::Brs,
                gsm: Some(GsmSpec::schaetzle(iterations)),
                input: InputSource::Example,
                k: iterations,
                ..Default::default()
            },
            vertex_count: 10,
            edge_count: 8,
            aggregate: Aggregate::of(&runs),
            runs,
            failure: None,
        }
    }

    #[test]
    fn aggregate_excludes_warmup() {
        let mut r = sample_report(3, 2);
        r.runs[0].total_secs = 1000.0;
        let a = Aggregate::of(&r.runs).unwrap();
        assert_eq!(a.measured_runs, 2);
        assert_eq!(a.mean_total_secs, (1.625 + 1.75) / 2.0);
        assert!(Aggregate::of(&r.runs[..1]).is_none());
    }

    #[test]
    fn aggregate_handles_uneven_depths() {
        let mut r = sample_report(3, 3);
        r.runs[2].iteration_secs.truncate(1);
        let a = Aggregate::of(&r.runs).unwrap();
        assert_eq!(a.mean_iteration_secs.len(), 3);
        assert_eq!(a.mean_iteration_secs[2], r.runs[1].iteration_secs[2]);
    }

    #[test]
    fn json_fixpoint() {
        let r = sample_report(4, 3);
        let text = r.to_json();
        let back = ExperimentReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn csv_round_trip() {
        for (runs, its) in [(1, 0), (2, 1), (6, 10)] {
            let r = sample_report(runs, its);
            let text = r.to_csv();
            assert_eq!(ExperimentReport::from_csv(&text).unwrap(), r);
        }
    }

    #[test]
    fn csv_row_counts() {
        let text = sample_report(5, 10).to_csv();
        let iteration_rows = text.lines().filter(|l| l.starts_with("iteration,")).count();
        let run_rows = text.lines().filter(|l| l.starts_with("run,")).count();
        assert_eq!(iteration_rows, 50);
        assert_eq!(run_rows, 5);
    }

    #[test]
    fn failure_survives_csv() {
        let mut r = sample_report(2, 1);
        r.failure = Some(Failure {
            run: 1,
            kind: FailureKind::OutOfMemory,
            peak_bytes: 9,
            limit_bytes: 8,
        });
        assert_eq!(ExperimentReport::from_csv(&r.to_csv()).unwrap(), r);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(ExperimentReport::from_csv("kind,run\n").is_err());
        let mut text = sample_report(1, 1).to_csv();
        text.push_str("bogus,,,,,,,,,,\n");
        assert!(ExperimentReport::from_csv(&text).is_err());
    }
}
