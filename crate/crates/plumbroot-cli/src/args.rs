//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plumbroot::seifert::Leg;

/// Graded roots, lattice cohomology and correction terms of plumbed
/// 3-manifolds.
#[derive(Debug, Parser)]
#[command(name = "plumbroot", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Write the report to this file (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Size of the worker pool; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Report format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned human-readable table.
    Table,
    /// Pretty-printed JSON.
    Json,
    /// CSV with a header row.
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a graph and tabulate d, rank, χ(HF⁺) and sw for each orbit.
    Analyze(AnalyzeArgs),
    /// Write one DOT file per selected orbit.
    Root(RootArgs),
    /// Run identity or oracle suites; exits 3 on any mismatch.
    Verify(VerifyArgs),
    /// Closed-form invariants of the lens space L(p, q).
    Lens(LensArgs),
    /// Closed-form invariants of a Seifert fibered homology sphere
    /// or rational homology sphere.
    Seifert(SeifertArgs),
    /// Brute-force graded roots from sublevel sets (small graphs only).
    Oracle(OracleArgs),
}

/// Where a plumbing graph comes from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GraphInput {
    /// Graph JSON file (`-` for stdin).
    pub graph: Option<PathBuf>,
    /// A built-in graph instead of a file.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(plumbroot::catalog::NAMES))]
    pub catalog: Option<String>,
}

/// Orbit selection.
#[derive(Debug, Args)]
pub struct OrbitSelection {
    /// Comma-separated orbit indices (default: all).
    #[arg(long, value_delimiter = ',')]
    pub orbits: Option<Vec<usize>>,
}

/// Caps of the sublevel-set oracle.
#[derive(Debug, Args)]
pub struct OracleCaps {
    /// Levels computed above the minimum of χ.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(i64).range(0..))]
    pub depth: i64,
    /// Largest number of lattice points enumerated per orbit.
    #[arg(long, default_value_t = plumbroot::enumerate::DEFAULT_POINT_CAP, value_parser = positive_usize)]
    pub point_cap: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub selection: OrbitSelection,
}

#[derive(Debug, Args)]
pub struct RootArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub selection: OrbitSelection,
    /// Directory receiving `<prefix>-orbit<i>.dot`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// File name prefix (default: the input file stem).
    #[arg(long)]
    pub prefix: Option<String>,
    /// Build the roots with the sublevel-set oracle instead of the engine.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub caps: OracleCaps,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct VerifyArgs {
    /// Compare engine and oracle roots on every orbit of this graph.
    #[arg(long, value_name = "GRAPH")]
    pub oracle: Option<PathBuf>,
    #[command(flatten)]
    pub caps: OracleCaps,
    #[command(subcommand)]
    pub suite: Option<VerifySuite>,
}

#[derive(Debug, Subcommand)]
pub enum VerifySuite {
    /// Sweep every L(p, q) with 2 ≤ p ≤ P_MAX.
    Lens {
        /// Largest order.
        #[arg(value_parser = clap::value_parser!(i64).range(2..))]
        p_max: i64,
    },
    /// Check the Seifert identities for one datum.
    Seifert(SeifertData),
}

#[derive(Debug, Args)]
pub struct LensArgs {
    /// Order of H₁.
    pub p: i64,
    /// Coprime parameter, 0 < q < p.
    pub q: i64,
    /// Report only the structure with this index.
    #[arg(long, conflicts_with = "table")]
    pub spinc: Option<i64>,
    /// Report all p structures (the default reports a = 0).
    #[arg(long)]
    pub table: bool,
}

/// Normalized Seifert invariants.
#[derive(Debug, Clone, Args)]
pub struct SeifertData {
    /// Central decoration e₀.
    #[arg(long, allow_hyphen_values = true)]
    pub e0: i64,
    /// A leg α/ω with 0 < ω < α; repeat for each leg.
    #[arg(long = "leg", required = true)]
    pub legs: Vec<Leg>,
}

#[derive(Debug, Args)]
pub struct SeifertArgs {
    #[command(flatten)]
    pub data: SeifertData,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub selection: OrbitSelection,
    #[command(flatten)]
    pub caps: OracleCaps,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}
