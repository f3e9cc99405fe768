use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "curvetrend", version, about = "Common stochastic trends in panels of curve time series")]
pub struct Cli {
    /// Overrides the seed in a simulation config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; 0 uses all cores. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo campaign described by a key = value config file.
    Simulate { config: PathBuf },
    /// Ingest a panel, fit an estimator and select the number of trends.
    Fit(FitArgs),
    /// Regress trend increments on external factor series.
    Regress(RegressArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Fpca,
    Panic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Criterion {
    Bic,
    Hq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QChoice {
    Auto,
    Fixed(usize),
}

fn parse_q(s: &str) -> Result<QChoice, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(QChoice::Auto);
    }
    s.parse().map(QChoice::Fixed).map_err(|_| format!("expected `auto` or a count, got `{s}`"))
}

fn parse_domain(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `lower,upper`")?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad lower bound `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad upper bound `{b}`"))?;
    if !(a < b) {
        return Err("lower bound must be below upper bound".into());
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV in the raw (`series_id,period_index,grid_point,value`) or
    /// coefficient (`series_id,period_index,c1,...,cJ`) layout.
    pub data: PathBuf,

    #[arg(long, value_enum, default_value_t = Mode::Fpca)]
    pub mode: Mode,

    /// `auto` or a fixed number of trends.
    #[arg(long, default_value = "auto", value_parser = parse_q)]
    pub q: QChoice,

    /// Basis dimension for raw input (default 51); must match the column
    /// count for coefficient input.
    #[arg(long)]
    pub basis_dim: Option<usize>,

    #[arg(long, value_enum, default_value_t = Criterion::Bic)]
    pub rank_criterion: Criterion,

    /// Periods with fewer observed grid values are treated as missing.
    #[arg(long, default_value_t = 200)]
    pub min_obs: usize,

    /// Basis domain `lower,upper`; defaults to the grid range (raw input)
    /// or `0,1` (coefficient input).
    #[arg(long, value_parser = parse_domain)]
    pub domain: Option<(f64, f64)>,

    /// Largest candidate for the trend-count criterion.
    #[arg(long)]
    pub q_max: Option<usize>,

    /// Penalty for the trend-count criterion instead of the default.
    #[arg(long)]
    pub penalty: Option<f64>,
}

impl FitArgs {
    pub fn new(data: impl Into<PathBuf>) -> Self {
        FitArgs {
            data: data.into(),
            mode: Mode::Fpca,
            q: QChoice::Auto,
            basis_dim: None,
            rank_criterion: Criterion::Bic,
            min_obs: 200,
            domain: None,
            q_max: None,
            penalty: None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RegressArgs {
    /// CSV with a period column followed by one column per trend.
    pub trends: PathBuf,
    /// CSV with a period column followed by one column per factor.
    pub factors: PathBuf,
    /// Fit without an intercept.
    #[arg(long)]
    pub no_intercept: bool,
}
