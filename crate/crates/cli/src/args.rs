use std::path::PathBuf;

use alexandrov::comparison::{Strategy, BASE_TOLERANCE};
use alexandrov::constructions::Threshold;
use alexandrov::space::DEFAULT_INPUT_TOLERANCE;
use alexandrov::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "alexandrov",
    version,
    about = "Numerical checks of curvature lower bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Generate a sample and write its distance matrix as CSV.
    Gen(GenArgs),
    /// Scan quadruples for the (1+3)-point comparison at one curvature bound.
    Check(CheckArgs),
    /// Bisect for the largest curvature bound the sample satisfies.
    KappaMax(KappaMaxArgs),
    /// Estimate a hinge angle from its grid of model angles.
    Hinge(HingeArgs),
    /// Run the cat's cradle iteration and check its domain containment.
    Cradle(CradleArgs),
    /// Check the Key Lemma inequality for a hinge.
    Keylemma(KeyLemmaArgs),
    /// Certify local balls, complete the space and scan the completion.
    Globalize(GlobalizeArgs),
}

/// Exactly one of a space spec or a distance-matrix file.
#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Space spec, e.g. `sphere:r=1,n=20,seed=7`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    /// CSV distance matrix: a header of point ids, then one row per point.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Declared tolerance of matrix input.
    #[arg(long, default_value_t = DEFAULT_INPUT_TOLERANCE)]
    pub input_tolerance: f64,
    /// Report path; CSV series are written next to it. Defaults to stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Reports do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Exhaustive,
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct StrategyArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyKind>,
    /// Quadruples drawn by the random strategy.
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    /// Seed of the random strategy (required with it).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl StrategyArgs {
    pub fn resolve(&self) -> Result<Option<Strategy>> {
        match (self.strategy, self.seed) {
            (None, _) => Ok(None),
            (Some(StrategyKind::Exhaustive), _) => Ok(Some(Strategy::Exhaustive)),
            (Some(StrategyKind::Random), Some(seed)) => Ok(Some(Strategy::Random {
                count: self.count,
                seed,
            })),
            (Some(StrategyKind::Random), None) => Err(Error::InvalidParameter(
                "--seed is required with --strategy random".into(),
            )),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// Space spec of the sample.
    #[arg(long)]
    pub space: String,
    /// CSV path (default: stdout).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: Input,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub strategy: StrategyArgs,
    #[arg(long, default_value_t = BASE_TOLERANCE)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct KappaMaxArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: Input,
    /// Lower end of the bracket; the sample must satisfy this bound.
    #[arg(long, allow_hyphen_values = true)]
    pub lo: f64,
    /// Upper end of the bracket; the sample must fail this bound.
    #[arg(long, allow_hyphen_values = true)]
    pub hi: f64,
    /// Width at which bisection stops.
    #[arg(long, default_value_t = 1e-3)]
    pub resolution: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub strategy: StrategyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct HingeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: Input,
    /// Id of the hinge vertex.
    #[arg(long)]
    pub at: String,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Largest scale (default: an eighth of the shorter side).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub resolution: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct CradleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: Input,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub w: String,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Radius `R` of the containment check around `w`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdArg {
    Distance,
    Bisector,
}

impl From<ThresholdArg> for Threshold {
    fn from(t: ThresholdArg) -> Self {
        match t {
            ThresholdArg::Distance => Threshold::Distance,
            ThresholdArg::Bisector => Threshold::Bisector,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct KeyLemmaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: Input,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub q: String,
    /// Id of the hinge vertex.
    #[arg(long)]
    pub w: String,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, value_enum, default_value_t = ThresholdArg::Distance)]
    pub threshold: ThresholdArg,
    /// Skip certifying the ball around `w`.
    #[arg(long)]
    pub no_domain_check: bool,
    #[arg(long, default_value_t = 0.02)]
    pub resolution: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalizeArgs {
    /// Spec of an incomplete space, e.g. `hemisphere:open,n=40,seed=3`.
    #[arg(long)]
    pub space: String,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long)]
    pub local_radius: f64,
    #[arg(long, default_value_t = 4)]
    pub max_halvings: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub strategy: StrategyArgs,
    /// Report path; CSV series are written next to it. Defaults to stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
}
