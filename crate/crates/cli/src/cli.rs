//! Command-line surface: subcommands, flags, and shared options.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

/// Matrix-weighted Musielak-Orlicz sequence spaces: norms, modulars,
/// s-numbers, and property harnesses with machine-readable output.
#[derive(Debug, Parser)]
#[command(name = "morlicz", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Luxemburg norm of a sequence file, with its certified bracket.
    Norm(NormArgs),
    /// Convex modular of a sequence file at a fixed scale.
    Modular(ModularArgs),
    /// Nonincreasing rearrangement of the coordinate norms of a sequence.
    Rearrange(RearrangeArgs),
    /// Singular values (s-numbers) of a finite operator.
    Snumbers(SnumbersArgs),
    /// Operator-ideal quasi-norm of a finite operator.
    IdealNorm(IdealNormArgs),
    /// Windowed column-halving constant of the configured kernel.
    MatrixM(MatrixMArgs),
    /// Property harnesses (--theorem) and axiom suites (--suite).
    Check(CheckArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output format for results on standard output.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Evaluate independent samples on a thread pool; never changes any
    /// output bit (reduction orders are fixed).
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Sequence file (JSON).
    #[arg(value_name = "SEQUENCE")]
    pub sequence: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ModularArgs {
    /// Sequence file (JSON).
    #[arg(value_name = "SEQUENCE")]
    pub sequence: PathBuf,
    /// Positive scale σ at which to evaluate the modular of x/σ.
    #[arg(long)]
    pub sigma: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct RearrangeArgs {
    /// Sequence file (JSON).
    #[arg(value_name = "SEQUENCE")]
    pub sequence: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SnumbersArgs {
    /// Operator file (JSON: {"rows", "cols", "entries"}).
    #[arg(long, value_name = "PATH")]
    pub matrix: PathBuf,
    /// Run configuration (optional; singular values need none).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output format for results on standard output.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Accepted for interface symmetry; the decomposition is sequential.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct IdealNormArgs {
    /// Operator file (JSON: {"rows", "cols", "entries"}).
    #[arg(long, value_name = "PATH")]
    pub matrix: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct MatrixMArgs {
    /// Window rows for the halving-constant estimate.
    #[arg(long, default_value_t = 64)]
    pub rows: usize,
    /// Window columns for the halving-constant estimate.
    #[arg(long, default_value_t = 32)]
    pub cols: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["theorem", "suite"])))]
pub struct CheckArgs {
    /// Property harness to run.
    #[arg(long, value_enum)]
    pub theorem: Option<TheoremArg>,
    /// Axiom suite to run.
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    /// Sample count (um, sigma-dc, ak, norm-modular, delta2-collapse,
    /// suites) or shift count (opial).
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// ε for um/opial; repeat the flag to sweep several values.
    #[arg(long = "epsilon", value_name = "EPS")]
    pub epsilon: Vec<f64>,
    /// Overrides the configuration seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Chain length for sigma-dc (default 6).
    #[arg(long)]
    pub chain_length: Option<usize>,
    /// Halving-ladder depth for order-cont (default 10).
    #[arg(long)]
    pub ladder: Option<usize>,
    /// Scale grid for delta2-collapse; repeat to override the default
    /// {0.1, 1, 10}.
    #[arg(long = "sigma", value_name = "SIGMA")]
    pub sigma: Vec<f64>,
    /// Probe sequence for opial/order-cont (default: the first unit
    /// coordinate).
    #[arg(value_name = "SEQUENCE")]
    pub sequence: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    /// Unit spheres of norm and modular agree.
    NormModular,
    /// Uniform monotonicity: δ(ε) estimation on the nonnegative cone.
    Um,
    /// Uniform Opial surrogate: μ estimation over disjoint blocks.
    Opial,
    /// σ-Dedekind completeness: suprema of dominated chains.
    SigmaDc,
    /// Order continuity: norms vanish along decreasing ladders.
    OrderCont,
    /// Vanishing tails: section residuals decrease to zero.
    Ak,
    /// Doubling families keep the space and its order-continuous part equal.
    Delta2Collapse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    /// s-number axioms on sampled operator tuples.
    SAxioms,
    /// Quasi-norm axioms for the operator-ideal norm.
    QnAxioms,
    /// Operator-ideal membership axioms.
    IdealAxioms,
}
