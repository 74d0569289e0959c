//! Run configuration: a flat JSON file layered under command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};
use ident_core::{catalog_get, CATALOG_NAMES};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

pub const DEFAULT_H: f64 = 0.01;
pub const DEFAULT_T: f64 = 10.0;
pub const DEFAULT_TUBE: f64 = 1e-2;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_DELTA: f64 = 1e-2;
pub const DEFAULT_STEPS: usize = 30;
pub const MAX_H: f64 = 0.1;
pub const MAX_T: f64 = 100.0;
pub const MAX_STEPS: usize = 100_000;

/// Environment variable that redirects every output file into one directory.
pub const OUT_DIR_VAR: &str = "IDENT_LAB_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Flow,
    RiemFlow,
    Prox,
    Slope,
    Modulus,
    Growth,
    Kl,
    Pln,
    Figure1,
    Catalog,
    Summary,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Flow => "flow",
            Command::RiemFlow => "riem-flow",
            Command::Prox => "prox",
            Command::Slope => "slope",
            Command::Modulus => "modulus",
            Command::Growth => "growth",
            Command::Kl => "kl",
            Command::Pln => "pln",
            Command::Figure1 => "figure1",
            Command::Catalog => "catalog",
            Command::Summary => "summary",
        }
    }

    fn needs_function(self) -> bool {
        !matches!(self, Command::Figure1 | Command::Catalog | Command::Summary)
    }

    fn needs_x0(self) -> bool {
        matches!(self, Command::Flow | Command::RiemFlow | Command::Prox | Command::Slope)
    }
}

/// Every settable key. Used both as the JSON file shape and as the flag set,
/// so the two stay in one-to-one correspondence.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Must match the positional command when given in a file.
    #[arg(skip)]
    pub command: Option<Command>,
    /// Catalog function name.
    #[arg(long)]
    pub function: Option<String>,
    /// Starting point (or probe center), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Time step, 0 < h ≤ 0.1.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Time horizon, 0 < T ≤ 100.
    #[arg(long = "T", allow_negative_numbers = true)]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    /// Proximal parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Growth constant for linear growth and sharpness checks.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Value window of the KL probes.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Radius of the sampled ball (pln, growth).
    #[arg(long, allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Identification tube radius.
    #[arg(long, allow_negative_numbers = true)]
    pub tube: Option<f64>,
    /// Seed for random starts and sample points.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of proximal iterations.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output path prefix.
    #[arg(long)]
    pub out: Option<String>,
    /// Also emit a gnuplot script.
    #[arg(long, num_args = 0, default_missing_value = "true")]
    pub gnuplot: Option<bool>,
}

impl Settings {
    /// Field-wise merge where `over` wins.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            command: over.command.or(self.command),
            function: over.function.or(self.function),
            x0: over.x0.or(self.x0),
            h: over.h.or(self.h),
            t: over.t.or(self.t),
            alpha: over.alpha.or(self.alpha),
            eps: over.eps.or(self.eps),
            delta: over.delta.or(self.delta),
            radius: over.radius.or(self.radius),
            tube: over.tube.or(self.tube),
            seed: over.seed.or(self.seed),
            steps: over.steps.or(self.steps),
            out: over.out.or(self.out),
            gnuplot: over.gnuplot.or(self.gnuplot),
        }
    }

    pub fn from_json(text: &str, path: &str) -> Result<Settings, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Malformed {
            path: path.to_string(),
            message: e.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Settings, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        Settings::from_json(&text, &shown)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ident-lab",
    version,
    about = "Identifiability experiments on catalog functions"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON file with flat keys; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

/// Validated configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub function: Option<String>,
    pub x0: Option<Vec<f64>>,
    pub h: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub delta: f64,
    pub radius: Option<f64>,
    pub tube: f64,
    pub seed: u64,
    pub steps: usize,
    pub out: String,
    pub gnuplot: bool,
}

/// Reads the optional file, overlays the flags and validates.
pub fn parse_config(command: Command, file: Option<&Path>, flags: Settings) -> Result<RunConfig, ConfigError> {
    let base = match file {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    validate(command, base.overlay(flags))
}

fn positive(field: &'static str, v: f64, max: Option<f64>) -> Result<f64, ConfigError> {
    let ok = v.is_finite() && v > 0.0 && max.is_none_or(|m| v <= m);
    if ok {
        return Ok(v);
    }
    let message = match max {
        Some(m) => format!("must satisfy 0 < {field} ≤ {m} (got {v})"),
        None => format!("must be positive and finite (got {v})"),
    };
    Err(ConfigError::Invalid { field, message })
}

pub fn validate(command: Command, s: Settings) -> Result<RunConfig, ConfigError> {
    if let Some(c) = s.command {
        if c != command {
            return Err(ConfigError::Invalid {
                field: "command",
                message: format!("file is for `{}` but `{}` was requested", c.name(), command.name()),
            });
        }
    }
    let missing = |field| ConfigError::Missing {
        field,
        command: command.name().to_string(),
    };

    let function = match (&s.function, command) {
        (None, Command::Figure1) => Some("paper-main".to_string()),
        (None, c) if c.needs_function() => return Err(missing("function")),
        (f, _) => f.clone(),
    };
    let dim = match &function {
        Some(name) => Some(
            catalog_get(name)
                .map_err(|_| ConfigError::Invalid {
                    field: "function",
                    message: format!("unknown function `{name}`; valid names: {}", CATALOG_NAMES.join(", ")),
                })?
                .dim(),
        ),
        None => None,
    };
    if command == Command::Figure1 && dim != Some(2) {
        return Err(ConfigError::Invalid {
            field: "function",
            message: "figure1 needs a function on the plane".into(),
        });
    }

    if command.needs_x0() && s.x0.is_none() {
        return Err(missing("x0"));
    }
    if let (Some(x0), Some(n)) = (&s.x0, dim) {
        if x0.len() != n {
            return Err(ConfigError::Invalid {
                field: "x0",
                message: format!("expected {n} coordinates, got {}", x0.len()),
            });
        }
        if x0.iter().any(|c| !c.is_finite()) {
            return Err(ConfigError::Invalid {
                field: "x0",
                message: "coordinates must be finite".into(),
            });
        }
    }
    if command == Command::Prox && s.alpha.is_none() {
        return Err(missing("alpha"));
    }

    let steps = s.steps.unwrap_or(DEFAULT_STEPS);
    if steps == 0 || steps > MAX_STEPS {
        return Err(ConfigError::Invalid {
            field: "steps",
            message: format!("must satisfy 1 ≤ steps ≤ {MAX_STEPS} (got {steps})"),
        });
    }

    let h = positive("h", s.h.unwrap_or(DEFAULT_H), Some(MAX_H))?;
    let t = positive("T", s.t.unwrap_or(DEFAULT_T), Some(MAX_T))?;
    // figure1 also runs at h/2, which divides T whenever h does
    let ratio = t / h;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio {
        return Err(ConfigError::Invalid {
            field: "T",
            message: format!("must be a whole multiple of h = {h} (got {t})"),
        });
    }

    Ok(RunConfig {
        command,
        function,
        x0: s.x0,
        h,
        t,
        alpha: s.alpha.map(|a| positive("alpha", a, None)).transpose()?,
        eps: s.eps.map(|e| positive("eps", e, None)).transpose()?,
        delta: positive("delta", s.delta.unwrap_or(DEFAULT_DELTA), None)?,
        radius: s.radius.map(|r| positive("radius", r, None)).transpose()?,
        tube: positive("tube", s.tube.unwrap_or(DEFAULT_TUBE), Some(1.0))?,
        seed: s.seed.unwrap_or(DEFAULT_SEED),
        steps,
        out: s.out.unwrap_or_else(|| format!("ident-lab-out/{}", command.name())),
        gnuplot: s.gnuplot.unwrap_or(false),
    })
}

impl RunConfig {
    /// Output prefix after applying the directory override from the environment.
    pub fn out_prefix(&self) -> PathBuf {
        resolve_prefix(&self.out, std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
    }
}

pub fn resolve_prefix(out: &str, dir_override: Option<PathBuf>) -> PathBuf {
    let prefix = PathBuf::from(out);
    match dir_override {
        Some(dir) => {
            let stem = prefix
                .file_name()
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("run"));
            dir.join(stem)
        }
        None => prefix,
    }
}
