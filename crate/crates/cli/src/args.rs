use clap::{Args, Parser, Subcommand, ValueEnum};

/// Largest series order accepted on the command line.
pub const MAX_CLI_ORDER: usize = 24;

#[derive(Debug, Parser)]
#[command(name = "lisdist", version, about = "Distribution of the longest increasing subsequence of a Poissonized random permutation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Significant digits in table and CSV output (JSON always uses 17).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=17))]
    pub precision: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// phi_r(y) = P(X_y <= r).
    Cdf(DistArgs),
    /// P(X_y = r).
    Pmf(DistArgs),
    /// F(r; y) = P(X_y >= r), r >= 1.
    Survival(DistArgs),
    /// Mean and variance of X_y.
    Moments(MomentsArgs),
    /// Map Karlin-Altschul parameters to y = K N exp(-lambda x).
    Ka(KaArgs),
    /// Tabulate the Hastings-McLeod solution and the F2 edge law.
    F2Table(F2TableArgs),
    /// Exact rational power-series coefficients in y.
    Series(SeriesArgs),
    /// Ground-truth computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,

    /// Single value of r.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "r_max", conflicts_with = "r_max")]
    pub r: Option<i64>,

    /// Tabulate every r up to this value.
    #[arg(long)]
    pub r_max: Option<usize>,

    #[arg(long, value_enum, default_value_t = RouteArg::Determinant)]
    pub route: RouteArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Determinant,
    Recursion,
    Series,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,

    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,

    /// Series order for `--method small-y`.
    #[arg(long, value_parser = order_parser)]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    SmallY,
    LargeY,
    Auto,
}

#[derive(Debug, Args)]
pub struct KaArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,

    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: f64,

    #[arg(long = "N", allow_negative_numbers = true)]
    pub n: f64,

    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,

    /// Also report the large-y and exact-sum moments.
    #[arg(long)]
    pub moments: bool,
}

#[derive(Debug, Args)]
pub struct F2TableArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = -8.0)]
    pub s_min: f64,

    #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
    pub s_max: f64,

    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, value_enum)]
    pub what: SeriesWhat,

    #[arg(long, value_parser = order_parser, default_value_t = 20)]
    pub order: usize,

    /// Index r of D_r or phi_r.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesWhat {
    Mean,
    Var,
    D,
    Phi,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Count permutations of k <= k-max by longest increasing subsequence.
    Exhaustive {
        #[arg(long, default_value_t = 8)]
        k_max: usize,
    },
    /// Monte Carlo sample of X_y compared with the determinant CDF.
    Mc {
        #[arg(long, allow_negative_numbers = true)]
        y: f64,

        #[arg(long, default_value_t = 100_000)]
        samples: u64,

        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn order_parser(s: &str) -> Result<usize, String> {
    let order: usize = s.parse().map_err(|e| format!("{e}"))?;
    if !(1..=MAX_CLI_ORDER).contains(&order) {
        return Err(format!("order must be in 1..={MAX_CLI_ORDER}"));
    }
    Ok(order)
}
