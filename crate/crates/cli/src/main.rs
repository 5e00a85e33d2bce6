use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use kbisim::bench::memory::CountingAllocator;
use kbisim::bench::{
    compare_algorithms, load_input, parse_generator_spec, run_experiment, Algorithm, ExperimentConfig, InputSource,
    OutputFormat,
};
use kbisim::brs::GsmSpec;
use kbisim::graph::compute_statistics;
use kbisim::ingest::{save_ntriples, GeneratorParams, IngestionConfig};

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

const EXIT_MISMATCH: u8 = 2;
const EXIT_OOM: u8 = 3;

#[derive(Parser)]
#[command(name = "kbisim", version, about = "Compute and benchmark k-bisimulation partitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and emit a timing report.
    Run(RunArgs),
    /// Write a synthetic graph as N-Triples.
    Generate(GenerateArgs),
    /// Print dataset statistics as JSON.
    Stats(InputArgs),
    /// Check that two algorithms produce the same partition.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InputArgs {
    /// N-Triples file (.nt or .nt.gz); repeat to merge several files.
    #[arg(long = "input", value_name = "PATH", conflicts_with_all = ["generate", "example"])]
    inputs: Vec<PathBuf>,
    /// Generator parameters, e.g. `n=100000,m=1000000,seed=7`.
    #[arg(long, value_name = "PARAMS", conflicts_with = "example")]
    generate: Option<String>,
    /// Use the built-in ten-vertex example graph.
    #[arg(long)]
    example: bool,
    /// Keep one edge record per predicate instead of grouping label sets.
    #[arg(long)]
    explode_label_sets: bool,
}

impl InputArgs {
    fn source(&self) -> Result<InputSource> {
        if self.example {
            Ok(InputSource::Example)
        } else if let Some(g) = &self.generate {
            Ok(InputSource::Generate(parse_generator_spec(g)?))
        } else if !self.inputs.is_empty() {
            Ok(InputSource::Files(self.inputs.clone()))
        } else {
            bail!("no input given: use --input, --generate or --example")
        }
    }

    fn ingestion(&self) -> IngestionConfig {
        IngestionConfig {
            explode_label_sets: self.explode_label_sets,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "NAME")]
    algorithm: String,
    /// Graph summary model for `brs`, e.g. `cp((T,id,T),k=5)`.
    #[arg(long, value_name = "SPEC")]
    gsm: Option<String>,
    /// Bisimulation depth; defaults to the depth in --gsm, else 10.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    input: InputArgs,
    /// Measured runs.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Collision-check every hash-derived identifier.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Treat runs whose sampled peak exceeds this size as out of memory
    /// (bytes, or with a K/M/G suffix).
    #[arg(long, value_name = "SIZE")]
    memory_limit: Option<String>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator parameters, e.g. `n=100000,m=1000000,seed=7`.
    #[arg(long, value_name = "PARAMS")]
    params: String,
    /// Output path; a `.gz` suffix compresses.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_name = "NAME")]
    left: String,
    #[arg(long, value_name = "SPEC")]
    left_gsm: Option<String>,
    #[arg(long, value_name = "NAME")]
    right: String,
    #[arg(long, value_name = "SPEC")]
    right_gsm: Option<String>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    exact: bool,
}

fn parse_size(s: &str) -> Result<u64> {
    let s = s.trim();
    let (digits, scale) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&s[..s.len() - 1], 1u64 << 10),
        Some('M') => (&s[..s.len() - 1], 1 << 20),
        Some('G') => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    let n: u64 = digits.trim().parse().with_context(|| format!("invalid size `{s}`"))?;
    n.checked_mul(scale).with_context(|| format!("size `{s}` overflows"))
}

fn parse_gsm(text: Option<&str>) -> Result<Option<GsmSpec>> {
    text.map(|t| t.parse::<GsmSpec>().with_context(|| format!("invalid graph summary model `{t}`")))
        .transpose()
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let gsm = parse_gsm(args.gsm.as_deref())?;
    let k = args.k.or(gsm.as_ref().map(|g| g.k)).unwrap_or(10);
    let format: OutputFormat = args.format.parse()?;
    let cfg = ExperimentConfig {
        algorithm: args.algorithm.parse()?,
        gsm,
        input: args.input.source()?,
        k,
        warmup_runs: args.warmup,
        measured_runs: args.runs,
        threads: args.threads,
        format,
        exact: args.exact,
        memory_limit: args.memory_limit.as_deref().map(parse_size).transpose()?,
        explode_label_sets: args.input.explode_label_sets,
    };
    let report = run_experiment(&cfg)?;
    let mut out = output(args.out.as_ref())?;
    report.emit(format, &mut out)?;
    out.flush()?;
    if let Some(f) = &report.failure {
        eprintln!(
            "run {} exceeded the memory limit: peak {} bytes > {} bytes",
            f.run, f.peak_bytes, f.limit_bytes
        );
        return Ok(ExitCode::from(EXIT_OOM));
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let params: GeneratorParams = parse_generator_spec(&args.params)?;
    let g = kbisim::ingest::generate_synthetic(&params)?;
    save_ntriples(&g, &args.out, &IngestionConfig::default())?;
    eprintln!(
        "wrote {} vertices and {} triples to {}",
        g.vertex_count(),
        g.triple_count(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn stats(args: InputArgs) -> Result<ExitCode> {
    let g = load_input(&args.source()?, &args.ingestion())?;
    println!("{}", serde_json::to_string_pretty(&compute_statistics(&g))?);
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let g = load_input(&args.input.source()?, &args.input.ingestion())?;
    let left: Algorithm = args.left.parse()?;
    let right: Algorithm = args.right.parse()?;
    let left_gsm = parse_gsm(args.left_gsm.as_deref())?;
    let right_gsm = parse_gsm(args.right_gsm.as_deref())?;
    let c = compare_algorithms(&g, (left, left_gsm.as_ref()), (right, right_gsm.as_ref()), args.k, args.exact)?;
    println!(
        "{} ({} blocks) {} {} ({} blocks) at k={}",
        left,
        c.left_blocks,
        if c.equal { "==" } else { "!=" },
        right,
        c.right_blocks,
        args.k
    );
    Ok(if c.equal { ExitCode::SUCCESS } else { ExitCode::from(EXIT_MISMATCH) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Generate(a) => generate(a),
        Command::Stats(a) => stats(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
