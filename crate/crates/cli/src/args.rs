use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "robustkz",
    version,
    about = "Robust (k,z)-clustering: generators, solvers and checks"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "ROBUSTKZ_THREADS")]
    pub threads: Option<usize>,
    /// Log progress at info level.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Solve an instance and print a run result.
    Solve(SolveArgs),
    /// Coreset operations.
    Coreset {
        #[command(subcommand)]
        command: CoresetCommand,
    },
    /// Run a verification; exits 3 when it fails.
    Check(CheckArgs),
    /// Run solvers over generated instances and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
pub enum CoresetCommand {
    /// Build a coreset and write it as an instance with `rep` and `params`.
    Build(CoresetArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Cube,
    Gaussian,
    Line,
    Matrix,
    Gadget,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeArg {
    Hadamard,
    RandomLinear,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterArg {
    /// Only vertex points may be centers.
    Vertex,
    /// Any point may be a center.
    All,
}

#[derive(Args, Debug, Clone)]
pub struct GadgetArgs {
    #[arg(long, default_value_t = 3)]
    pub part_size: usize,
    /// `random:<p>` or a JSON file `{"parts": [[...]], "edges": [[u, v], ...]}`.
    #[arg(long, default_value = "random:0.5")]
    pub edges: String,
    #[arg(long, value_enum, default_value_t = CodeArg::Hadamard)]
    pub code: CodeArg,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = CenterArg::Vertex)]
    pub centers: CenterArg,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    /// Number of clients.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Extent of the cube, line or matrix sites.
    #[arg(long, default_value_t = 1.0)]
    pub side: f64,
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Separate facility count; 0 reuses the clients.
    #[arg(long, default_value_t = 0)]
    pub facilities: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub z: u32,
    /// `single`, `partition:<m>` or `random:<m>`.
    #[arg(long, default_value = "single")]
    pub groups: String,
    /// Largest weight drawn for `random:<m>` groups.
    #[arg(long, default_value_t = 3.0)]
    pub max_weight: f64,
    /// Exponent of the l_q metric (gadgets default to 2 as well).
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub gadget: GadgetArgs,
    /// Sidecar path for gadgets; defaults to `<out>.sidecar.json`.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Exact,
    Bicriteria,
    Epas,
    FptEuclid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BicriteriaArg {
    /// Oracle optimum when affordable, greedy otherwise.
    Auto,
    Exact,
    Greedy,
}

#[derive(Args, Debug, Clone)]
pub struct SeedArgs {
    /// Oracle enumeration cap (subsets).
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u128,
    #[arg(long, value_enum, default_value_t = BicriteriaArg::Auto)]
    pub bicriteria: BicriteriaArg,
    /// Greedy bicriteria opens floor(beta * k) centers.
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Ratio to assume for a greedy seed the oracle cannot certify.
    #[arg(long)]
    pub assume_alpha: Option<f64>,
    /// Skip the triangle-inequality scan on matrix metrics.
    #[arg(long)]
    pub trusted: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Leader-search cap (center sets evaluated).
    #[arg(long, default_value_t = 100_000_000)]
    pub search_budget: u128,
    #[command(flatten)]
    pub seed_args: SeedArgs,
    /// Report wall_ms as 0 so output is byte-stable.
    #[arg(long)]
    pub no_timing: bool,
    /// Recorded in the result; solvers are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CoresetArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[command(flatten)]
    pub seed_args: SeedArgs,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Coreset,
    ProjectionLemma,
    AssignmentLemma,
    GadgetGap,
    EpsNet,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub kind: CheckKind,
    /// Instance file for `coreset`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[command(flatten)]
    pub seed_args: SeedArgs,
    /// Samples (lemma checks, per dimension for the projection lemma) or
    /// decomposition calls (`eps-net`).
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,10")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = robustkz::euclid::ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = robustkz::euclid::BETA0)]
    pub beta0: f64,
    /// Parts of the gadget graph.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[command(flatten)]
    pub gadget: GadgetArgs,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,20,30")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    pub facilities: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub z: u32,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// Report wall_ms as 0.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long, short)]
    pub out: PathBuf,
}
