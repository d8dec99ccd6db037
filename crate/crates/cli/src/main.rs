//! `exporamsey`: command-line front end for the exponential Ramsey workbench.
//!
//! Exit codes: 0 success, 1 domain/syntax/input error, 2 capacity limit or
//! inconclusive search, 3 usage error.

mod commands;
mod config;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exporamsey_core::Error;

use config::{FileConfig, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "exporamsey", version, about = "Search and verification tools for exponential Ramsey patterns")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Largest value (in bits) that is ever written out explicitly.
    #[arg(long, global = true)]
    value_bit_cap: Option<u64>,
    /// Largest exponent (in bits) of a symbolic value.
    #[arg(long, global = true)]
    exp_bit_cap: Option<u64>,
    /// Vertex budget for closures.
    #[arg(long, global = true)]
    vertex_budget: Option<usize>,
    /// Deepest closure accepted.
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Node budget for seed and block searches.
    #[arg(long, global = true)]
    search_budget: Option<u64>,
    /// Node budget for the backtracking solver.
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    /// TOML file with defaults; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Single-threaded run.
    #[arg(long, global = true)]
    deterministic: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// FS, FP, FE^I or FE^II of a seed list.
    Structures {
        #[arg(value_parser = ["fs", "fp", "fe1", "fe2"])]
        kind: String,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Exponential triples.
    Triples {
        #[command(subcommand)]
        command: TriplesCommand,
    },
    /// Exponentiation closure of a seed set as a triple hypergraph.
    Closure {
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<String>,
        #[arg(long)]
        depth: usize,
    },
    /// Colorings of triple hypergraphs.
    Color {
        #[command(subcommand)]
        command: ColorCommand,
    },
    /// Windowed set transforms, IP witnesses and progressions.
    Ip {
        #[command(subcommand)]
        command: IpCommand,
    },
    /// Finite FE constructions and certificate checks.
    Greedy {
        #[command(subcommand)]
        command: GreedyCommand,
    },
}

#[derive(Debug, Subcommand)]
enum TriplesCommand {
    /// All (a, b, a^b) with a, b >= 2 and a^b <= MAX.
    Enum {
        /// Decimal or `10^6` style.
        #[arg(long)]
        max: String,
    },
}

#[derive(Debug, Args)]
struct HypergraphSource {
    /// Build the closure of these seeds (needs --depth).
    #[arg(long, value_delimiter = ',', conflicts_with = "hypergraph")]
    seeds: Option<Vec<String>>,
    #[arg(long, requires = "seeds")]
    depth: Option<usize>,
    /// Read a hypergraph written by `closure`.
    #[arg(long)]
    hypergraph: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ColorCommand {
    /// Decide k-colorability.
    Solve {
        #[command(flatten)]
        source: HypergraphSource,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "backtracking")]
        method: String,
    },
    /// DIMACS CNF whose models are proper k-colorings.
    ExportCnf {
        #[command(flatten)]
        source: HypergraphSource,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// List monochromatic edges of a coloring.
    Check {
        #[command(flatten)]
        source: HypergraphSource,
        /// Coloring JSON as written by `color solve`.
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Count monochromatic triples under a coloring rule.
    RuleCount {
        #[arg(long)]
        rule: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// One or more bounds.
        #[arg(long, value_delimiter = ',', required = true)]
        max: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct SetInput {
    /// Explicit members.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["set", "input"])]
    members: Option<Vec<u64>>,
    /// Set description (`even`, `rule:n % 3 == 0`, JSON, …) sampled on the window.
    #[arg(long, conflicts_with = "input")]
    set: Option<String>,
    /// WindowSet JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    lo: Option<u64>,
    #[arg(long)]
    hi: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Additive,
    Multiplicative,
}

#[derive(Debug, Subcommand)]
enum IpCommand {
    /// shift:n, divide:n, log:n or root:n preimage.
    Transform {
        #[command(flatten)]
        input: SetInput,
        #[arg(long)]
        op: String,
    },
    /// Least X of size m with FS(X) (or FP(X)) inside the set.
    FindSeed {
        #[command(flatten)]
        input: SetInput,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        m: usize,
    },
    /// Windowed IP* verdict.
    IpStar {
        #[arg(long)]
        set: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Geometric progressions a, ah, …, ah^(k-1).
    Gp {
        #[command(flatten)]
        input: SetInput,
        #[arg(long)]
        k: usize,
    },
    /// Power progressions h, h², …, h^k.
    Powerprog {
        #[command(flatten)]
        input: SetInput,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Args)]
struct FegenArgs {
    #[arg(long)]
    set: String,
    #[arg(long, value_delimiter = ',', required = true)]
    y: Vec<String>,
    /// `constant:c`, `max-fe1` or `max-fe2`.
    #[arg(long, default_value = "constant:2")]
    f: String,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 4)]
    max_block_size: usize,
    #[arg(long, default_value_t = 32)]
    max_index: usize,
}

#[derive(Debug, Args)]
struct GreedyFeArgs {
    #[arg(long)]
    set: String,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    lo: u64,
    #[arg(long)]
    hi: u64,
}

#[derive(Debug, Subcommand)]
enum GreedyCommand {
    /// Least-choice FE^I construction.
    Fe1(GreedyFeArgs),
    /// Least-choice FE^II construction.
    Fe2(GreedyFeArgs),
    /// Block search with t^(ΣF) in the set.
    Fegen1(FegenArgs),
    /// Block search with (ΠF)^t in the set.
    Fegen2(FegenArgs),
    /// Check FS(X), FE^I(X), FP(Y), FE^II(Y) against the set.
    Verify {
        #[arg(long)]
        set: String,
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        y: Option<Vec<String>>,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Input(String),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Capacity(_)) => 2,
            CliError::Core(_) | CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::merge(&cli.global, file)?;
    if let Some(n) = cfg.worker_threads() {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = commands::dispatch(cli.command, &cfg, &mut out)?;
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("exporamsey: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
