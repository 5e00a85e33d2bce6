use std::time::Instant;

use super::memory::{self, MemoryWatcher, DEFAULT_INTERVAL};
use super::report::{Aggregate, ExperimentReport, Failure, FailureKind, RunRecord};
use super::{Algorithm, BenchError, ExperimentConfig, InputSource};
use crate::brs::{brs_summarize_with, BrsOptions, GsmSpec};
use crate::graph::LabeledGraph;
use crate::ingest::{fixtures, generate_synthetic, load_ntriples_files, IngestionConfig};
use crate::kaushik::{bisim_kaushik, naive_coarsest_partition};
use crate::oracle::oracle_trace;
use crate::partition::{partitions_equal, Partition};
use crate::schaetzle::{bisim_schaetzle_with, SchaetzleOptions};
use crate::trace::PartitionTrace;

pub fn load_input(input: &InputSource, config: &IngestionConfig) -> Result<LabeledGraph, BenchError> {
    Ok(match input {
        InputSource::Files(paths) => load_ntriples_files(paths, config)?,
        InputSource::Generate(params) => generate_synthetic(params)?,
        InputSource::Example => crate::build_graph(fixtures::example_triples(), config).map_err(crate::IngestError::from)?,
    })
}

/// Runs one algorithm once. `gsm` is required for [`Algorithm::Brs`] and
/// executed at depth `k`.
pub fn run_algorithm(
    g: &LabeledGraph,
    algorithm: Algorithm,
    gsm: Option<&GsmSpec>,
    k: usize,
    exact: bool,
) -> Result<PartitionTrace, BenchError> {
    if let Some(variant) = algorithm.oracle_variant() {
        return Ok(oracle_trace(g, variant, k, false));
    }
    match algorithm {
        Algorithm::NativeSchaetzle => Ok(bisim_schaetzle_with(
            g,
            k,
            &SchaetzleOptions {
                exact,
                ..Default::default()
            },
        )?),
        Algorithm::NativeKaushik => Ok(bisim_kaushik(g, k)),
        Algorithm::NaivePt => Ok(naive_trace(g)),
        Algorithm::Brs => {
            let spec = gsm.ok_or_else(|| BenchError::Config("brs requires a graph summary model".into()))?;
            Ok(brs_summarize_with(
                g,
                &spec.with_k(k),
                &BrsOptions {
                    exact,
                    ..Default::default()
                },
            )?)
        }
        _ => unreachable!("oracle variants handled above"),
    }
}

fn naive_trace(g: &LabeledGraph) -> PartitionTrace {
    let start = Instant::now();
    let initial = Partition::by_vertex_labels(g);
    let initial_block_count = initial.block_count();
    let init_time = start.elapsed();
    let t = Instant::now();
    let partition = naive_coarsest_partition(initial, g);
    PartitionTrace {
        initial_block_count,
        block_counts: vec![partition.block_count()],
        init_time,
        iteration_times: vec![t.elapsed()],
        partition,
        terminated_early: false,
        iterations_executed: 1,
        levels: None,
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    cfg.validate()?;
    let ingest = IngestionConfig {
        explode_label_sets: cfg.explode_label_sets,
        ..Default::default()
    };
    let g = load_input(&cfg.input, &ingest)?;
    run_experiment_on(&g, cfg)
}

/// Executes the warm-up and measured runs of `cfg` on an already loaded
/// graph. A run exceeding the memory limit ends the experiment with a
/// [`Failure`] in the report rather than an error.
pub fn run_experiment_on(g: &LabeledGraph, cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| BenchError::ThreadPool(e.to_string()))?;
    let gsm = cfg.effective_gsm();

    pool.install(|| {
        let mut runs = Vec::new();
        let mut reference: Option<Partition> = None;
        let mut failure = None;
        for run in 0..cfg.warmup_runs + cfg.measured_runs {
            let watcher = MemoryWatcher::start(DEFAULT_INTERVAL);
            let start = Instant::now();
            let trace = run_algorithm(g, cfg.algorithm, gsm.as_ref(), cfg.k, cfg.exact)?;
            let total = start.elapsed().as_secs_f64();
            let peak = if memory::is_active() { watcher.finish() as u64 } else { 0 };
            runs.push(RunRecord::from_trace(run, run < cfg.warmup_runs, total, peak, &trace));
            match &reference {
                None => reference = Some(trace.partition),
                Some(p) => {
                    if !partitions_equal(p, &trace.partition).unwrap_or(false) {
                        return Err(BenchError::Nondeterministic { run });
                    }
                }
            }
            if let Some(limit) = cfg.memory_limit {
                if peak > limit {
                    failure = Some(Failure {
                        run,
                        kind: FailureKind::OutOfMemory,
                        peak_bytes: peak,
                        limit_bytes: limit,
                    });
                    break;
                }
            }
        }
        Ok(ExperimentReport {
            config: cfg.clone(),
            vertex_count: g.vertex_count(),
            edge_count: g.triple_count(),
            aggregate: Aggregate::of(&runs),
            runs,
            failure,
        })
    })
}

/// Outcome of running two algorithms on the same graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub equal: bool,
    pub left_blocks: usize,
    pub right_blocks: usize,
}

pub fn compare_algorithms(
    g: &LabeledGraph,
    left: (Algorithm, Option<&GsmSpec>),
    right: (Algorithm, Option<&GsmSpec>),
    k: usize,
    exact: bool,
) -> Result<Comparison, BenchError> {
    let a = run_algorithm(g, left.0, left.1, k, exact)?.partition;
    let b = run_algorithm(g, right.0, right.1, k, exact)?.partition;
    Ok(Comparison {
        equal: partitions_equal(&a, &b).expect("same vertex set"),
        left_blocks: a.block_count(),
        right_blocks: b.block_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::OutputFormat;
    use crate::ingest::GeneratorParams;

    fn config(algorithm: Algorithm, gsm: Option<GsmSpec>, input: InputSource, k: usize) -> ExperimentConfig {
        ExperimentConfig {
            algorithm,
            gsm,
            input,
            k,
            warmup_runs: 1,
            measured_runs: 2,
            threads: Some(2),
            format: OutputFormat::Json,
            exact: true,
            memory_limit: None,
            explode_label_sets: false,
        }
    }

    #[test]
    fn example_brs_report() {
        let r = run_experiment(&config(Algorithm::Brs, Some(GsmSpec::schaetzle(1)), InputSource::Example, 10)).unwrap();
        assert_eq!(r.runs.len(), 3);
        assert!(r.runs.iter().all(|x| x.terminated_early && x.block_count == 3));
        assert!(r.runs[0].warmup && !r.runs[1].warmup);
        assert_eq!(r.aggregate.as_ref().unwrap().measured_runs, 2);
        assert_eq!((r.vertex_count, r.edge_count), (10, 8));
    }

    #[test]
    fn oracle_on_empty_graph() {
        let mut c = config(Algorithm::OracleForward, None, InputSource::Files(Vec::new()), 3);
        c.warmup_runs = 0;
        c.measured_runs = 1;
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.runs.len(), 1);
        assert_eq!(r.runs[0].block_count, 0);
    }

    #[test]
    fn every_algorithm_runs() {
        for a in Algorithm::ALL {
            let gsm = (a == Algorithm::Brs).then(|| GsmSpec::kaushik(1));
            let r = run_experiment(&config(a, gsm, InputSource::Example, 2)).unwrap();
            assert!(r.failure.is_none(), "{a}");
        }
    }

    #[test]
    fn generated_graph_agreement() {
        let params = GeneratorParams {
            vertex_count: 20_000,
            edge_count: 100_000,
            seed: 7,
            ..Default::default()
        };
        let g = generate_synthetic(&params).unwrap();
        let mut c = config(Algorithm::NativeSchaetzle, None, InputSource::Generate(params), 10);
        c.exact = false;
        let native = run_experiment_on(&g, &c).unwrap();
        c.algorithm = Algorithm::Brs;
        c.gsm = Some(GsmSpec::schaetzle(10));
        let brs = run_experiment_on(&g, &c).unwrap();
        assert_eq!(native.aggregate.unwrap().block_count, brs.aggregate.unwrap().block_count);
    }

    #[test]
    fn iteration_times_account_for_the_run() {
        let params = GeneratorParams {
            vertex_count: 20_000,
            edge_count: 100_000,
            seed: 3,
            ..Default::default()
        };
        let g = generate_synthetic(&params).unwrap();
        let mut c = config(Algorithm::NativeSchaetzle, None, InputSource::Generate(params), 6);
        c.exact = false;
        for r in run_experiment_on(&g, &c).unwrap().runs {
            let iters: f64 = r.iteration_secs.iter().sum();
            let rest = r.total_secs - r.init_secs;
            assert!((iters - rest).abs() <= 0.05 * rest + 1e-3, "{iters} vs {rest}");
        }
    }

    #[test]
    fn comparison() {
        let g = fixtures::example_graph();
        let c = compare_algorithms(
            &g,
            (Algorithm::NativeKaushik, None),
            (Algorithm::Brs, Some(&GsmSpec::kaushik(1))),
            2,
            true,
        )
        .unwrap();
        assert!(c.equal);
        let c = compare_algorithms(&g, (Algorithm::NativeKaushik, None), (Algorithm::NativeSchaetzle, None), 2, true).unwrap();
        assert!(!c.equal);
        assert_eq!((c.left_blocks, c.right_blocks), (10, 3));
    }
}
