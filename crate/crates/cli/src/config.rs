//! Run configuration: command-line flags over a config file over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fermicloud::models::{sphere_measure, ModelSelection};
use fermicloud::{ModelSpec, NumericsConfig, StatisticsKind};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    MassCurve,
    Phase,
    Multiplicity,
    Converge,
    Crosscheck,
}

impl CommandName {
    fn default_format(self) -> Format {
        match self {
            Self::MassCurve | Self::Phase => Format::Csv,
            _ => Format::Json,
        }
    }

    fn supports(self, format: Format) -> bool {
        match self {
            Self::MassCurve => true,
            Self::Phase => format == Format::Csv,
            _ => format == Format::Json,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Statistics: mb, sfd (simplified Fermi–Dirac) or ffd (full Fermi–Dirac).
    #[arg(long)]
    pub kind: Option<StatisticsKind>,
    /// Space dimension, 3..9.
    #[arg(long)]
    pub d: Option<u32>,
    /// Planck-like parameter; must be positive for Fermi–Dirac kinds.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Central density.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub rho_min: Option<f64>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub points_per_decade: Option<usize>,
    /// Target mass; defaults to 2σ_d.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Log-radius of the asymptotic initial data.
    #[arg(long, allow_hyphen_values = true)]
    pub s_start: Option<f64>,
    /// Final log-radius of a phase portrait; defaults to s_start + 50.
    #[arg(long, allow_hyphen_values = true)]
    pub s_end: Option<f64>,
    /// Strictly decreasing list of η values.
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
    /// Starting radius of the direct radial integration.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    /// Config file, either `key=value` lines or a JSON object.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Values read from a config file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[allow(dead_code)]
    command: Option<String>,
    kind: Option<StatisticsKind>,
    d: Option<u32>,
    eta: Option<f64>,
    rho: Option<f64>,
    rho_min: Option<f64>,
    rho_max: Option<f64>,
    points_per_decade: Option<usize>,
    mass: Option<f64>,
    s_end: Option<f64>,
    etas: Option<Vec<f64>>,
    r0: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    quad_rel_tol: Option<f64>,
    quad_split_margin: Option<f64>,
    root_tol: Option<f64>,
    ode_rel_tol: Option<f64>,
    ode_abs_tol: Option<f64>,
    max_steps: Option<usize>,
    s_start: Option<f64>,
    grid_points: Option<usize>,
}

/// The effective configuration, echoed into every JSON artifact. Feeding the
/// echo back through `--config` reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(flatten)]
    pub model: ModelSelection,
    pub rho: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub points_per_decade: usize,
    pub mass: f64,
    pub s_end: f64,
    pub etas: Vec<f64>,
    pub r0: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub numerics: NumericsConfig,
}

impl RunConfig {
    pub fn model_spec(&self) -> Result<ModelSpec, CliError> {
        ModelSpec::try_from(self.model).map_err(config_error)
    }
}

fn config_error(e: fermicloud::Error) -> CliError {
    match e {
        fermicloud::Error::Config(msg) => CliError::Config(msg),
        other => CliError::Config(other.to_string()),
    }
}

fn parse_scalar(raw: &str) -> Value {
    if let Ok(i) = raw.parse::<i64>() {
        return Value::from(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return Value::from(f);
    }
    Value::from(raw)
}

fn parse_key_value(text: &str) -> Result<Map<String, Value>, CliError> {
    let mut map = Map::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let (key, value) = (key.trim().replace('-', "_"), value.trim());
        let parsed = if key == "etas" {
            Value::Array(value.split(',').map(|t| parse_scalar(t.trim())).collect())
        } else {
            parse_scalar(value)
        };
        map.insert(key, parsed);
    }
    Ok(map)
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = if text.trim_start().starts_with('{') {
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(m)) => m,
            Ok(_) => return Err(CliError::Config("config JSON must be an object".into())),
            Err(e) => return Err(CliError::Config(format!("config JSON: {e}"))),
        }
    } else {
        parse_key_value(&text)?
    };
    // Accept the nested numerics block of a config echo.
    if let Some(nested) = map.remove("numerics") {
        let Value::Object(nested) = nested else {
            return Err(CliError::Config("numerics must be an object".into()));
        };
        for (k, v) in nested {
            map.entry(k).or_insert(v);
        }
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(format!("config: {e}")))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Merges flags, the optional config file and defaults, then validates.
pub fn resolve(command: CommandName, flags: &Flags) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    let defaults = NumericsConfig::default();
    let numerics = NumericsConfig {
        quad_rel_tol: file.quad_rel_tol.unwrap_or(defaults.quad_rel_tol),
        quad_split_margin: file.quad_split_margin.unwrap_or(defaults.quad_split_margin),
        root_tol: file.root_tol.unwrap_or(defaults.root_tol),
        ode_rel_tol: file.ode_rel_tol.unwrap_or(defaults.ode_rel_tol),
        ode_abs_tol: file.ode_abs_tol.unwrap_or(defaults.ode_abs_tol),
        max_steps: file.max_steps.unwrap_or(defaults.max_steps),
        s_start: flags.s_start.or(file.s_start).unwrap_or(defaults.s_start),
        grid_points: file.grid_points.unwrap_or(defaults.grid_points),
    };
    numerics.validate().map_err(config_error)?;

    let etas = flags
        .etas
        .clone()
        .or(file.etas)
        .unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4]);
    if etas.is_empty() || etas.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(CliError::Config(format!(
            "every eta must lie in (0, 1], got {etas:?}"
        )));
    }
    if etas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config(format!(
            "etas must be strictly decreasing, got {etas:?}"
        )));
    }
    let kind = flags
        .kind
        .or(file.kind)
        .unwrap_or(StatisticsKind::MaxwellBoltzmann);
    let d = flags.d.or(file.d).unwrap_or(3);
    // A convergence study sweeps the ladder; its head stands in for eta.
    let eta_default = match (command, kind) {
        (CommandName::Converge, k) if k != StatisticsKind::MaxwellBoltzmann => etas[0],
        _ => 0.0,
    };
    let eta = flags.eta.or(file.eta).unwrap_or(eta_default);
    let model = ModelSelection { kind, d, eta };
    ModelSpec::try_from(model).map_err(config_error)?;

    let format = flags
        .format
        .or(file.format)
        .unwrap_or(command.default_format());
    if !command.supports(format) {
        return Err(CliError::Config(format!(
            "format {format:?} is not available for this command"
        )));
    }

    let rho = positive("rho", flags.rho.or(file.rho).unwrap_or(1.0))?;
    let rho_min = positive("rho_min", flags.rho_min.or(file.rho_min).unwrap_or(1e-2))?;
    let rho_max = positive("rho_max", flags.rho_max.or(file.rho_max).unwrap_or(1e8))?;
    if rho_min >= rho_max {
        return Err(CliError::Config(format!(
            "need rho_min < rho_max, got [{rho_min}, {rho_max}]"
        )));
    }
    let points_per_decade = flags
        .points_per_decade
        .or(file.points_per_decade)
        .unwrap_or(16);
    if points_per_decade < 4 {
        return Err(CliError::Config(format!(
            "points_per_decade must be at least 4, got {points_per_decade}"
        )));
    }
    let mass = positive(
        "mass",
        flags.mass.or(file.mass).unwrap_or(2.0 * sphere_measure(d)),
    )?;
    let s_end = flags
        .s_end
        .or(file.s_end)
        .unwrap_or(numerics.s_start + 50.0);
    if !(s_end > numerics.s_start && s_end.is_finite()) {
        return Err(CliError::Config(format!(
            "need s_end > s_start, got s_end {s_end}, s_start {}",
            numerics.s_start
        )));
    }
    let r0 = flags.r0.or(file.r0).unwrap_or(1e-4);
    if !(r0 > 0.0 && r0 <= 1e-4) {
        return Err(CliError::Config(format!("need 0 < r0 <= 1e-4, got {r0}")));
    }

    Ok(RunConfig {
        command,
        model,
        rho,
        rho_min,
        rho_max,
        points_per_decade,
        mass,
        s_end,
        etas,
        r0,
        format,
        out: flags.out.clone().or(file.out),
        numerics,
    })
}
