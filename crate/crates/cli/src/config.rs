//! Argument and configuration handling. Every model flag can also come from
//! a TOML config file named by `--config`; explicit flags win over file
//! values, which win over the built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(zeno_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(e) => match e {
                zeno_core::Error::Divergent { .. } | zeno_core::Error::NoConvergence { .. } => 3,
                _ => 2,
            },
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<zeno_core::Error> for CliError {
    fn from(e: zeno_core::Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses an angle given as `<value>deg`, `<value>rad`, or a bare number in
/// radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (head, factor) = if let Some(h) = t.strip_suffix("deg") {
        (h, std::f64::consts::PI / 180.0)
    } else if let Some(h) = t.strip_suffix("rad") {
        (h, 1.0)
    } else {
        (t, 1.0)
    };
    let value: f64 = head
        .trim()
        .parse()
        .map_err(|_| format!("invalid angle {s:?}: expected a number with optional deg/rad suffix"))?;
    if !value.is_finite() {
        return Err(format!("invalid angle {s:?}: not finite"));
    }
    Ok(value * factor)
}

#[derive(Parser)]
#[command(
    name = "zeno",
    version,
    about = "Polarization decay under repeated partial measurement: rates, spectra, decay curves, ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Decay rate against measurement effectiveness 1-theta, closed form and overlap quadrature
    RateCurve(RateCurveArgs),
    /// Reservoir spectrum and measurement broadening on the frequency zone
    Spectra(SpectraArgs),
    /// Decay of the horizontal polarization probability under sign-persistent rotations
    Decay(DecayArgs),
    /// Seeded trajectory-ensemble estimate of a decay curve
    Montecarlo(MontecarloArgs),
    /// Ratio checks for the asymptotic rate description
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Base seed for random-number streams
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file supplying any omitted flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModelKind {
    /// Same rotation every round trip
    Fixed,
    /// Independent equiprobable rotation signs
    Iid,
    /// Sign repeats the previous one with probability p
    Persistence,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum ObservableKind {
    /// Horizontally polarized intensity
    Decay,
    /// Total surviving intensity
    Survival,
}

#[derive(Args)]
pub struct RateCurveArgs {
    /// Root-mean-square rotation per round trip
    #[arg(long)]
    pub b: Option<f64>,
    /// Jump correlation degree; repeat for several curves
    #[arg(long)]
    pub gamma: Vec<f64>,
    /// Round-trip time
    #[arg(long)]
    pub tau_r: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct SpectraArgs {
    /// Root-mean-square rotation per round trip
    #[arg(long)]
    pub b: Option<f64>,
    /// Jump correlation degree; repeat for several curves
    #[arg(long)]
    pub gamma: Vec<f64>,
    /// Round-trip time
    #[arg(long)]
    pub tau_r: Option<f64>,
    /// Absorber transmissivity for the partial-measurement broadening column
    #[arg(long)]
    pub theta: Option<f64>,
    /// Number of frequency grid points over the zone
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct DecayArgs {
    /// Rotation magnitude per round trip (deg/rad suffix, bare = radians)
    #[arg(long, value_parser = parse_angle)]
    pub delta_phi: Option<f64>,
    /// Sign repeat probability; repeat for several curves
    #[arg(long)]
    pub p: Vec<f64>,
    /// Largest round-trip number
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Trajectory count for the optional ensemble columns (0 disables them)
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct MontecarloArgs {
    /// Jump model for the rotation angles
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Rotation magnitude per round trip (deg/rad suffix, bare = radians)
    #[arg(long, value_parser = parse_angle)]
    pub delta_phi: Option<f64>,
    /// Sign repeat probability (persistence model)
    #[arg(long)]
    pub p: Option<f64>,
    /// Absorber transmissivity
    #[arg(long)]
    pub theta: Option<f64>,
    /// Largest round-trip number
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Trajectory count
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Worker threads for the ensemble (results are identical for any count)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Recorded observable
    #[arg(long, value_enum)]
    pub observable: Option<ObservableKind>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct ValidateArgs {
    /// Root-mean-square rotation per round trip
    #[arg(long)]
    pub b: Option<f64>,
    /// Jump correlation degree
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Absorber transmissivity
    #[arg(long)]
    pub theta: Option<f64>,
    /// Evolution horizon in round trips
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Largest ratio still counted as satisfying a "much smaller than"
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// One float or a list of floats.
#[derive(Deserialize, Clone)]
#[serde(untagged)]
pub enum ScalarOrList {
    Scalar(f64),
    List(Vec<f64>),
}

impl ScalarOrList {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            ScalarOrList::Scalar(x) => vec![x],
            ScalarOrList::List(v) => v,
        }
    }
}

/// Angle as a bare number in radians or a string with a deg/rad suffix.
#[derive(Deserialize, Clone)]
#[serde(untagged)]
pub enum AngleValue {
    Number(f64),
    Suffixed(String),
}

impl AngleValue {
    pub fn radians(&self) -> Result<f64, CliError> {
        match self {
            AngleValue::Number(x) => Ok(*x),
            AngleValue::Suffixed(s) => parse_angle(s).map_err(CliError::Config),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub b: Option<f64>,
    pub gamma: Option<ScalarOrList>,
    pub tau_r: Option<f64>,
    pub theta: Option<f64>,
    pub delta_phi: Option<AngleValue>,
    pub p: Option<ScalarOrList>,
    pub n_max: Option<usize>,
    pub trajectories: Option<usize>,
    pub seed: Option<u64>,
    pub model: Option<String>,
    pub points: Option<usize>,
    pub threads: Option<usize>,
    pub observable: Option<String>,
    pub threshold: Option<f64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn model_kind(&self) -> Result<Option<ModelKind>, CliError> {
        self.parse_enum::<ModelKind>(self.model.as_deref(), "model")
    }

    pub fn observable_kind(&self) -> Result<Option<ObservableKind>, CliError> {
        self.parse_enum::<ObservableKind>(self.observable.as_deref(), "observable")
    }

    pub fn output_format(&self) -> Result<Option<OutputFormat>, CliError> {
        self.parse_enum::<OutputFormat>(self.format.as_deref(), "format")
    }

    fn parse_enum<E: ValueEnum>(
        &self,
        value: Option<&str>,
        key: &str,
    ) -> Result<Option<E>, CliError> {
        value
            .map(|s| {
                E::from_str(s, true)
                    .map_err(|_| CliError::Config(format!("invalid config value {key}={s:?}")))
            })
            .transpose()
    }
}
