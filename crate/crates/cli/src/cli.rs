use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Parser)]
#[command(name = "gfdiv", version, about = "(G,f)-divergences, (G,f)-information and subadditivity checks")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "pretty")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Exit with status 2 when a verdict is FAIL.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Read rates and print information values and exponents in bits.
    #[arg(long, global = true)]
    pub bits: bool,
    /// Random restarts of the output-distribution solver.
    #[arg(long, global = true, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Treat the channel as permutation invariant and use the uniform input.
    #[arg(long, global = true)]
    pub assume_permutation_invariant: bool,
}

#[derive(Debug, Args, Clone)]
pub struct PairArgs {
    /// G-transform registry name.
    #[arg(long, default_value = "x")]
    pub g: String,
    /// G parameters as `k=v,…`.
    #[arg(long, default_value = "")]
    pub g_params: String,
    /// f-generator registry name or JSON spec.
    #[arg(long, default_value = "kl")]
    pub f: String,
    #[arg(long, default_value = "")]
    pub f_params: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// D_f(p‖q) and G(D_f(p‖q)).
    Div {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// I_{G,f}(X;Y) for an input law, or its maximum over inputs.
    Info {
        #[command(flatten)]
        pair: PairArgs,
        /// Preset (`bsc:δ`, `bec:e`, `identity:n`) or JSON matrix.
        #[arg(long)]
        channel: String,
        /// Input law; omitted with `--max`.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        max: bool,
    },
    /// Binary gap scan, or a membership matrix over the registry.
    Subadd {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 25)]
        grid_res: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        matrix: bool,
    },
    /// Class checkers.
    Check {
        #[arg(long, value_enum)]
        class: CheckClass,
        #[command(flatten)]
        pair: PairArgs,
        /// Check a registry curve instead of x² f''.
        #[arg(long)]
        curve: Option<String>,
        #[arg(long, default_value = "")]
        curve_params: String,
        #[arg(long)]
        qz: Option<String>,
        #[arg(long)]
        rz: Option<String>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b: f64,
    },
    /// Fano-type, blocklength, hypothesis-testing and KL-comparison bounds.
    Bounds {
        #[arg(long, value_enum)]
        kind: BoundKind,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        assume_subadditive: bool,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, value_enum, default_value = "plus")]
        direction: DirectionArg,
    },
    /// Sphere-packing exponent curve.
    Exponent {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        rates: String,
        #[arg(long, default_value = "power")]
        family: String,
        /// Add the classical reference exponent as a column.
        #[arg(long)]
        oracle: bool,
    },
    /// Class verdict tables for the standard generators.
    Tables {
        #[arg(long, value_enum, default_value = "all")]
        which: WhichTable,
    },
}

impl Command {
    pub const NAMES: [&'static str; 7] = ["div", "info", "subadd", "check", "bounds", "exponent", "tables"];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckClass {
    T,
    Tplus,
    Tminus,
    InvGprime,
    Roots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Fano,
    Blocklength,
    Ht,
    Klcmp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichTable {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    All,
}
