//! Command-line schema. Every argument struct is serialisable so that runs
//! can echo their full parameter set.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "bootperc", version, about = "k-neighbour bootstrap percolation: solvers, forts and simulations")]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; csv is available for `sweep` only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Critical probability p(T_d, k) of the d-ary tree.
    Critical(CriticalArgs),
    /// Critical probability of a Galton-Watson tree.
    GwCritical(GwCriticalArgs),
    /// One run of the dynamics from a random initial configuration.
    Simulate(SimulateArgs),
    /// Monte Carlo sweep over a grid of occupation probabilities.
    Sweep(SweepArgs),
    /// Beta-pruning of a tree, with the inequality sides.
    Prune(PruneArgs),
    /// Fort search, red and blue colourings, certificate checks.
    Forts(FortsArgs),
    /// Analytic bounds.
    Bound(BoundArgs),
    /// Heuristic bracket for the branching number of a tree family.
    Branching(BranchingArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Critical(_) => "critical",
            Self::GwCritical(_) => "gw-critical",
            Self::Simulate(_) => "simulate",
            Self::Sweep(_) => "sweep",
            Self::Prune(_) => "prune",
            Self::Forts(_) => "forts",
            Self::Bound(_) => "bound",
            Self::Branching(_) => "branching",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Simulate(a) => Some(a.seed),
            Self::Sweep(a) => Some(a.seed),
            Self::Prune(a) => a.seed,
            Self::Forts(a) => a.seed,
            _ => None,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CriticalArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    /// Bracket width of the bisection.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GwCriticalArgs {
    /// Offspring law as "j:prob,j:prob,...".
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// d-ary tree (or (d+1)-regular with --arity d-plus-one-regular).
    Regular,
    /// d-ary tree with every edge subdivided.
    Subdivided,
    /// Galton-Watson tree; needs --dist and --seed.
    Gw,
    /// Greedy tree without small forts; needs --n.
    Greedy,
    /// Square grid of side --n with a filled boundary.
    Grid,
    /// Path rooted at one end (branching only).
    Path,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArityArg {
    DAry,
    DPlusOneRegular,
}

#[derive(Debug, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value_t = ArityArg::DAry)]
    pub arity: ArityArg,
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Truncation depth (ignored for grids).
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct TreeSource {
    /// Tree in parent-list format: one parent id per line, -1 for the root.
    #[arg(long, conflicts_with = "family")]
    pub tree: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryArg {
    Vacant,
    Occupied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventArg {
    /// Every vertex ends occupied.
    Complete,
    /// The root or grid centre ends occupied.
    Root,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: TreeSource,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: f64,
    /// Seed of the initial configuration and of random families.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Vacant)]
    pub boundary: BoundaryArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Occupation probability of a generated graph.
    Occupation,
    /// Probability that the root of T_d is occupied with depth-n boundary vacant.
    Extinction,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = SweepMode::Occupation)]
    pub mode: SweepMode,
    #[arg(long)]
    pub k: usize,
    /// Comma-separated occupation probabilities.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p_grid: Vec<f64>,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Vacant)]
    pub boundary: BoundaryArg,
    #[arg(long, value_enum, default_value_t = EventArg::Complete)]
    pub event: EventArg,
    /// Repeat the sweep at twice the depth as a truncation-bias check.
    #[arg(long)]
    pub depth_check: bool,
    /// Also locate the p where the estimate crosses 1/2, to this tolerance.
    #[arg(long)]
    pub find_pc: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PruneArgs {
    #[command(flatten)]
    pub source: TreeSource,
    /// Pruning parameter(s); one per round, or one reused for every round.
    #[arg(long, value_delimiter = ',', required = true)]
    pub beta: Vec<f64>,
    /// Number of rounds; round i leaves an i-fort.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Seed for random families.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FortMode {
    /// Smallest k-fort up to --max-size.
    Min,
    /// Red colouring for the k-rule.
    Red,
    /// Blue colouring fort around --x for the k-rule.
    Blue,
    /// Check the certificate in --certificate.
    Verify,
}

#[derive(Debug, Args, Serialize)]
pub struct FortsArgs {
    #[command(flatten)]
    pub source: TreeSource,
    #[arg(long, value_enum)]
    pub mode: FortMode,
    /// Fort index for min, rule threshold for red and blue.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    /// Restrict the search to non-boundary vertices.
    #[arg(long)]
    pub interior: bool,
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: u64,
    /// Treat truncation leaves as ordinary leaves in the red colouring.
    #[arg(long)]
    pub closed: bool,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Seed for random families.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(subcommand)]
    pub kind: BoundKind,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Lower bound for d-regular graphs with anchored expansion h.
    Anchored {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: f64,
    },
    /// Lower bound on the critical value for an infinite fort.
    QLower {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Branching-number bound for trees without k-forts of size at most n.
    Fortfree {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: f64,
    },
    /// p(T_d, ceil(gamma d)) for a list of d.
    Gamma {
        #[arg(long)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        d_list: Vec<usize>,
    },
    /// Connected-set counts around a vertex of the d-regular tree.
    Animals {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m_max: usize,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct BranchingArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Base depths D; trees of depth D and 2D are compared.
    #[arg(long, value_delimiter = ',', required = true)]
    pub depths: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 8.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn schema_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seeds_are_echoed() {
        let cli = Cli::try_parse_from([
            "bootperc", "sweep", "--k", "2", "--p-grid", "0.1,0.2", "--trials", "5", "--seed", "9",
        ])
        .unwrap();
        assert_eq!(cli.command.seed(), Some(9));
        let Command::Sweep(a) = &cli.command else { panic!() };
        assert_eq!(a.p_grid, vec![0.1, 0.2]);
        assert!(Cli::try_parse_from(["bootperc", "sweep", "--k", "2", "--p-grid", "0.1", "--trials", "5"]).is_err());
    }
}
