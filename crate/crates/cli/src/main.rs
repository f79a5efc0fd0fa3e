mod commands;
mod group;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Portrait growth of contracting regular branch groups.
#[derive(Parser, Debug)]
#[command(name = "portrait-growth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact portrait growth sequence a_0..a_N.
    Growth(GrowthArgs),
    /// Certified enclosure of gamma in a_n ~ e^(gamma d^n).
    Gamma(GammaArgs),
    /// Cross-check the engines, tables and invariants for one group.
    Verify(VerifyArgs),
    /// Render the nucleus portrait of a word.
    Portrait(PortraitArgs),
    /// Count elements by depth by searching the group directly.
    Census(CensusArgs),
    /// Print the group spec as JSON, a template for user-defined groups.
    Spec(SpecArgs),
    /// Print machine-built branch data as JSON.
    BranchData(BranchDataArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// Catalog group.
    #[arg(long, value_enum, conflicts_with = "spec")]
    pub group: Option<Catalog>,
    /// Group spec JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Prime for the GGS family.
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// GGS defining vector (e_1, ..., e_{p-1}).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,2")]
    pub e: Vec<i64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Catalog {
    Grigorchuk,
    Ggs,
    Apollonian,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Dot,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    /// Family formula for catalog groups, branch data otherwise.
    #[default]
    Auto,
    /// Iterate coset decomposition data.
    Generic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    #[default]
    Bfs,
    Closure,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Largest n.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = Engine::Auto)]
    pub engine: Engine,
    /// Branch data JSON for `--engine generic` with a user spec.
    #[arg(long)]
    pub branch_data: Option<PathBuf>,
    /// Quotient level used to build branch data for catalog groups.
    #[arg(long)]
    pub level: Option<usize>,
    /// Refuse to run when the projected size exceeds this many MiB.
    #[arg(long, default_value_t = 4096)]
    pub memory_limit_mib: u64,
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Working precision in bits.
    #[arg(long, env = "PORTRAIT_GROWTH_PRECISION")]
    pub precision: Option<u32>,
    /// Use the observed ratio extremes even where proven bounds exist.
    #[arg(long)]
    pub empirical: bool,
    #[arg(long, value_enum, default_value_t = Engine::Auto)]
    pub engine: Engine,
    #[arg(long)]
    pub branch_data: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Depth of the census compared against the exact series.
    #[arg(long)]
    pub oracle_depth: Option<usize>,
    /// Re-derive every row of the built-in decomposition table.
    #[arg(long)]
    pub table: bool,
    #[arg(long)]
    pub branch_data: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<usize>,
    /// Extra depth allowed to intermediate products in the census.
    #[arg(long)]
    pub slack: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Word over the generators, e.g. `bacac` or `(ab)^2`.
    pub word: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Depth at which the portrait is abandoned.
    #[arg(long, default_value_t = 64)]
    pub max_depth: usize,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Largest depth counted.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = SearchStrategy::Bfs)]
    pub strategy: SearchStrategy,
    #[arg(long, default_value_t = portrait_growth::census::DEFAULT_PATIENCE)]
    pub patience: usize,
    #[arg(long, default_value_t = portrait_growth::census::DEFAULT_RADIUS_CAP)]
    pub radius_cap: usize,
    #[arg(long, default_value_t = portrait_growth::census::DEFAULT_MAX_ELEMENTS)]
    pub max_elements: usize,
    /// Expand elements up to depth n + slack.
    #[arg(long)]
    pub slack: Option<usize>,
    /// Split counts by the coset table of the catalog group.
    #[arg(long)]
    pub cosets: bool,
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SpecArgs {
    #[command(flatten)]
    pub group: GroupArgs,
}

#[derive(Args, Debug)]
pub struct BranchDataArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long)]
    pub level: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Growth(a) => commands::growth(&a),
        Command::Gamma(a) => commands::gamma(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Portrait(a) => commands::portrait(&a),
        Command::Census(a) => commands::census(&a),
        Command::Spec(a) => commands::spec(&a),
        Command::BranchData(a) => commands::branch_data(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
