use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Temporal closeness and path queries over a substream index.
#[derive(Debug, Parser)]
#[command(name = "substream", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print vertex, edge, timestamp and reachability statistics.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Build an index and write it to a file.
    Build {
        #[command(flatten)]
        input: InputArgs,
        /// Output index file.
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        params: BuildArgs,
        /// Check all index invariants after building.
        #[arg(long)]
        validate: bool,
    },
    /// Run one single-source query against an index file.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Source vertex label.
        #[arg(long)]
        source: String,
        #[command(flatten)]
        interval: IntervalArgs,
        #[arg(long, value_enum, default_value_t = Kind::Fastest)]
        kind: Kind,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Rank all vertices by harmonic temporal closeness.
    Closeness {
        #[command(flatten)]
        input: OptionalInputArgs,
        /// Existing index file; otherwise one is built from --input.
        #[arg(long)]
        index: Option<PathBuf>,
        #[command(flatten)]
        params: BuildArgs,
        #[command(flatten)]
        interval: IntervalArgs,
        #[arg(long, value_enum, default_value_t = Engine::Index)]
        engine: Engine,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the ranking here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time index builds and closeness for several k against the full-stream baseline.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated substream counts.
        #[arg(long, value_delimiter = ',', default_value = "8,32,128")]
        k: Vec<usize>,
        #[arg(long, default_value_t = substream_index::index::DEFAULT_H)]
        h: usize,
        #[arg(long, default_value_t = 0)]
        batch_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[command(flatten)]
        interval: IntervalArgs,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Edge list: `tail head time [transition]` per line.
    #[arg(long)]
    input: PathBuf,
    /// Add the reverse of every edge.
    #[arg(long)]
    undirected: bool,
    /// Transition time for lines without a fourth column.
    #[arg(long, default_value_t = 1)]
    default_transition: u64,
}

#[derive(Debug, Args)]
struct OptionalInputArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    undirected: bool,
    #[arg(long, default_value_t = 1)]
    default_transition: u64,
}

#[derive(Debug, Args, Clone, Copy)]
struct BuildArgs {
    #[arg(long, value_enum, default_value_t = Algorithm::Sketch)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = substream_index::index::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = substream_index::index::DEFAULT_H)]
    h: usize,
    /// Vertices per batch; 0 picks n below one million vertices, else 2048.
    #[arg(long, default_value_t = 0)]
    batch_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args, Clone, Copy)]
struct IntervalArgs {
    #[arg(long, default_value_t = 0)]
    from: u64,
    /// Defaults to unbounded.
    #[arg(long)]
    to: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Ea,
    Fastest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Greedy,
    Sketch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Index,
    Fullstream,
    Oracle,
}

/// Failure classes mapped to exit codes 1, 2 and 3.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(anyhow::Error),
    Invariant(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<substream_index::Error> for Failure {
    fn from(e: substream_index::Error) -> Self {
        Failure::Data(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(3)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}
