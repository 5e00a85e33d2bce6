//! Experiment configuration, execution and reporting.
//!
//! An experiment loads or generates one graph, executes the configured
//! number of warm-up runs followed by measured runs in the same process and
//! records per-iteration wall times, peak memory and block counts.

pub mod memory;
pub mod report;
pub mod runner;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brs::GsmSpec;
use crate::hashing::HashCollision;
use crate::ingest::{GeneratorParams, IngestError};
use crate::oracle::OracleVariant;

pub use report::{Aggregate, ExperimentReport, Failure, FailureKind, RunRecord};
pub use runner::{compare_algorithms, load_input, run_algorithm, run_experiment, run_experiment_on, Comparison};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Collision(#[from] HashCollision),
    #[error("run {run} produced a partition different from run 0")]
    Nondeterministic { run: usize },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("malformed report: {0}")]
    Report(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    NativeSchaetzle,
    NativeKaushik,
    NaivePt,
    Brs,
    OracleForward,
    OracleBackward,
    OracleEdgeLabeledForward,
    OracleVertexLabeledBackward,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::NativeSchaetzle,
        Algorithm::NativeKaushik,
        Algorithm::NaivePt,
        Algorithm::Brs,
        Algorithm::OracleForward,
        Algorithm::OracleBackward,
        Algorithm::OracleEdgeLabeledForward,
        Algorithm::OracleVertexLabeledBackward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NativeSchaetzle => "native-schaetzle",
            Algorithm::NativeKaushik => "native-kaushik",
            Algorithm::NaivePt => "naive-pt",
            Algorithm::Brs => "brs",
            Algorithm::OracleForward => "oracle-forward",
            Algorithm::OracleBackward => "oracle-backward",
            Algorithm::OracleEdgeLabeledForward => "oracle-edge-labeled-forward",
            Algorithm::OracleVertexLabeledBackward => "oracle-vertex-labeled-backward",
        }
    }

    pub fn oracle_variant(self) -> Option<OracleVariant> {
        match self {
            Algorithm::OracleForward => Some(OracleVariant::Forward),
            Algorithm::OracleBackward => Some(OracleVariant::Backward),
            Algorithm::OracleEdgeLabeledForward => Some(OracleVariant::EdgeLabeledForward),
            Algorithm::OracleVertexLabeledBackward => Some(OracleVariant::VertexLabeledBackward),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            BenchError::Config(format!("unknown algorithm `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputSource {
    /// N-Triples files, optionally gzip-compressed, loaded as one graph.
    Files(Vec<PathBuf>),
    Generate(GeneratorParams),
    /// The built-in ten-vertex example graph.
    Example,
}

/// Parses `n=..,m=..,seed=..` with optional `edge_labels`, `vertex_labels`,
/// `max_labels` and `skew`; unspecified keys keep their defaults.
pub fn parse_generator_spec(s: &str) -> Result<GeneratorParams, BenchError> {
    let mut p = GeneratorParams::default();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| BenchError::Config(format!("expected key=value, got `{part}`")))?;
        let bad = |_| BenchError::Config(format!("invalid value `{value}` for `{key}`"));
        let int = |v: &str| -> Result<usize, BenchError> {
            v.trim().parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0 && x.fract() == 0.0)
                .map(|x| x as usize)
                .ok_or_else(|| BenchError::Config(format!("invalid value `{value}` for `{key}`")))
        };
        match key.trim() {
            "n" | "vertices" => p.vertex_count = int(value)?,
            "m" | "edges" => p.edge_count = int(value)?,
            "seed" => p.seed = value.trim().parse().map_err(bad)?,
            "edge_labels" => p.edge_labels = int(value)?,
            "vertex_labels" => p.vertex_labels = int(value)?,
            "max_labels" => p.max_labels_per_vertex = int(value)?,
            "skew" => p.skew = value.trim().parse().map_err(|_| BenchError::Config(format!("invalid value `{value}` for `skew`")))?,
            other => return Err(BenchError::Config(format!("unknown generator parameter `{other}`"))),
        }
    }
    p.validate()?;
    Ok(p)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(BenchError::Config(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

mod gsm_text {
    use super::GsmSpec;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(spec: &Option<GsmSpec>, s: S) -> Result<S::Ok, S::Error> {
        match spec {
            Some(g) => s.serialize_some(&g.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<GsmSpec>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| t.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    /// Required for `brs`; its depth is replaced by `k`.
    #[serde(default, with = "gsm_text")]
    pub gsm: Option<GsmSpec>,
    pub input: InputSource,
    pub k: usize,
    pub warmup_runs: usize,
    pub measured_runs: usize,
    /// Worker threads; `None` uses one per core.
    pub threads: Option<usize>,
    pub format: OutputFormat,
    pub exact: bool,
    /// A run whose sampled peak exceeds this many bytes is reported as out
    /// of memory.
    #[serde(default)]
    pub memory_limit: Option<u64>,
    #[serde(default)]
    pub explode_label_sets: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithm: Algorithm::NativeSchaetzle,
            gsm: None,
            input: InputSource::Example,
            k: 10,
            warmup_runs: 1,
            measured_runs: 5,
            threads: None,
            format: OutputFormat::Json,
            exact: false,
            memory_limit: None,
            explode_label_sets: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.measured_runs == 0 {
            return Err(BenchError::Config("at least one measured run is required".into()));
        }
        if self.threads == Some(0) {
            return Err(BenchError::Config("thread count must be positive".into()));
        }
        match (self.algorithm, &self.gsm) {
            (Algorithm::Brs, None) => Err(BenchError::Config("brs requires a graph summary model (--gsm)".into())),
            (Algorithm::Brs, Some(g)) => g.validate().map_err(|e| BenchError::Config(e.to_string())),
            (a, Some(_)) => Err(BenchError::Config(format!("{a} does not take a graph summary model"))),
            _ => Ok(()),
        }
    }

    /// The spec actually executed: the configured model at depth `k`.
    pub fn effective_gsm(&self) -> Option<GsmSpec> {
        self.gsm.as_ref().map(|g| g.with_k(self.k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{}\"", a.name()));
        }
        assert!("schaetzle".parse::<Algorithm>().is_err());
    }

    #[test]
    fn generator_spec() {
        let p = parse_generator_spec("n=1e5, m=1000000, seed=7, vertex_labels=40, skew=0.5").unwrap();
        assert_eq!((p.vertex_count, p.edge_count, p.seed, p.vertex_labels), (100_000, 1_000_000, 7, 40));
        assert_eq!(p.skew, 0.5);
        assert!(parse_generator_spec("n=10,q=3").is_err());
        assert!(parse_generator_spec("n=ten").is_err());
        assert!(parse_generator_spec("n=2,m=5").is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.measured_runs = 0;
        assert!(c.validate().is_err());
        c.measured_runs = 1;
        c.algorithm = Algorithm::Brs;
        assert!(c.validate().is_err());
        c.gsm = Some(GsmSpec::schaetzle(3));
        assert!(c.validate().is_ok());
        c.algorithm = Algorithm::NativeKaushik;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let c = ExperimentConfig {
            algorithm: Algorithm::Brs,
            gsm: Some(GsmSpec::kaushik(4)),
            input: InputSource::Generate(GeneratorParams::default()),
            threads: Some(2),
            ..Default::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("cp(inv(OC_type,T,OC_type),k=4)"));
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }
}
