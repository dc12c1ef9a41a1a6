use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hdlss_tda::persistence::{predicted_simplex_count, Filtration};
use hdlss_tda::pointcloud::Shape;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Curse,
    Mitigation,
    SimplexCheck,
    Eigengap,
    WeingartenCheck,
    Validation,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Curse => "curse",
            Experiment::Mitigation => "mitigation",
            Experiment::SimplexCheck => "simplex_check",
            Experiment::Eigengap => "eigengap",
            Experiment::WeingartenCheck => "weingarten_check",
            Experiment::Validation => "validation",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "curse" => Experiment::Curse,
            "mitigation" => Experiment::Mitigation,
            "simplex_check" => Experiment::SimplexCheck,
            "eigengap" => Experiment::Eigengap,
            "weingarten_check" => Experiment::WeingartenCheck,
            "validation" => Experiment::Validation,
            other => return config_err(format!("unknown experiment {other:?}")),
        })
    }
}

/// Original-cloud shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Circle,
    UniformSquare,
    /// All points at the origin.
    Zeros,
}

impl ShapeKind {
    pub fn to_shape(self, n: usize, s: usize) -> Shape {
        match self {
            ShapeKind::Circle => Shape::Circle,
            ShapeKind::UniformSquare => Shape::UniformSquare,
            ShapeKind::Zeros => Shape::CustomPoints(vec![vec![0.0; s]; n]),
        }
    }
}

impl FromStr for ShapeKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "circle" => ShapeKind::Circle,
            "uniform_square" | "square" => ShapeKind::UniformSquare,
            "zeros" => ShapeKind::Zeros,
            other => return config_err(format!("unknown shape {other:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => config_err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub s: usize,
    pub nu: f64,
    pub shape: ShapeKind,
    pub d_grid: Vec<usize>,
    pub degrees: Vec<usize>,
    /// Number of seeds per grid point (replications for eigengap and
    /// Monte-Carlo checks).
    pub reps: usize,
    pub seed: u64,
    pub filtration: Filtration,
    pub out: PathBuf,
    /// Both files are written when unset.
    pub format: Option<Format>,
    pub max_simplices: u128,
    /// Fill the runtime_ms column. Off by default so that reruns are
    /// byte-identical.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Curse,
            n: 40,
            s: 2,
            nu: 0.01,
            shape: ShapeKind::Circle,
            d_grid: vec![100, 1000, 10_000],
            degrees: vec![0, 1],
            reps: 20,
            seed: 0,
            filtration: Filtration::Rips,
            out: PathBuf::from("out"),
            format: None,
            max_simplices: 5_000_000,
            timing: false,
        }
    }
}

fn parse_list(value: &str) -> Result<Vec<usize>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_count)
        .collect()
}

/// Accepts plain integers and exponent forms such as `1e4`.
fn parse_count(t: &str) -> Result<usize> {
    if let Ok(v) = t.parse::<usize>() {
        return Ok(v);
    }
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
        _ => config_err(format!("expected a non-negative integer, got {t:?}")),
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. Keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| CliError::Config(format!("invalid {what} {value:?}"));
        match key.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "experiment" => self.experiment = value.parse()?,
            "n" => self.n = parse_count(value)?,
            "s" => self.s = parse_count(value)?,
            "nu" => self.nu = value.parse().map_err(|_| bad("nu"))?,
            "shape" => self.shape = value.parse()?,
            "d_grid" => self.d_grid = parse_list(value)?,
            "degrees" => self.degrees = parse_list(value)?,
            "reps" => self.reps = parse_count(value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "filtration" => self.filtration = value.parse().map_err(|_| bad("filtration"))?,
            "out" => self.out = PathBuf::from(value),
            "format" => self.format = Some(value.parse()?),
            "max_simplices" => self.max_simplices = parse_count(value)? as u128,
            "timing" => self.timing = value.parse().map_err(|_| bad("timing"))?,
            other => return config_err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// INI-style text: `key = value` lines, `#`/`;` comments, section
    /// headers ignored.
    pub fn parse_ini(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_ini(text)?;
        Ok(cfg)
    }

    pub fn apply_ini(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let Some((k, v)) = line.split_once(['=', ':']) else {
                return config_err(format!("line {}: expected key = value", lineno + 1));
            };
            self.set(k, v).map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse_ini(&text)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Checks every constraint that downstream code would otherwise reject
    /// halfway through a run.
    pub fn validate(&self) -> Result<()> {
        if self.d_grid.is_empty() {
            return config_err("d_grid must be nonempty");
        }
        if self.reps == 0 {
            return config_err("reps must be positive");
        }
        match self.experiment {
            Experiment::Curse | Experiment::Mitigation => self.validate_cloud(),
            Experiment::Eigengap => {
                if self.n < 2 {
                    return config_err("eigengap needs n >= 2");
                }
                if let Some(&d) = self.d_grid.iter().find(|&&d| d < self.n) {
                    return config_err(format!("eigengap needs d >= n, got d={d}"));
                }
                if self.d_grid.windows(2).any(|w| w[0] >= w[1]) {
                    return config_err("d_grid must be strictly increasing");
                }
                Ok(())
            }
            Experiment::WeingartenCheck => {
                if self.n < 4 {
                    return config_err("the Weingarten battery needs N = n >= 4");
                }
                if self.reps < 100 {
                    return config_err("Monte-Carlo checks need reps >= 100");
                }
                Ok(())
            }
            Experiment::SimplexCheck => {
                if !(self.nu > 0.0 && self.nu.is_finite()) {
                    return config_err("nu must be positive");
                }
                if self.n < 3 || self.n > 12 {
                    return config_err("simplex check runs n = 3..=n with 3 <= n <= 12");
                }
                Ok(())
            }
            Experiment::Validation => Ok(()),
        }
    }

    fn validate_cloud(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return config_err(format!("nu must be positive, got {}", self.nu));
        }
        if self.degrees.is_empty() {
            return config_err("degrees must be nonempty");
        }
        if self.s == 0 {
            return config_err("s must be positive");
        }
        if self.shape == ShapeKind::Circle && self.s < 2 {
            return config_err("circle needs s >= 2");
        }
        if let Some(&d) = self.d_grid.iter().find(|&&d| d < self.s) {
            return config_err(format!("every d must be >= s, got d={d}"));
        }
        if self.n < self.max_degree() + 2 {
            return config_err(format!("degree {} needs n >= {}", self.max_degree(), self.max_degree() + 2));
        }
        match (self.experiment, self.filtration) {
            (Experiment::Mitigation, Filtration::Cech) => {
                return Err(CliError::Unsupported("mitigation runs use the Rips filtration only".into()))
            }
            (Experiment::Mitigation, _) if self.s >= self.n => {
                return config_err(format!("mitigation needs s < n, got s={}, n={}", self.s, self.n))
            }
            (_, Filtration::Cech) if self.n > 12 => {
                return config_err(format!("cech runs are limited to n <= 12, got n={}", self.n))
            }
            _ => {}
        }
        Ok(())
    }

    /// Rejects runs whose complexes would exceed `max_simplices`.
    pub fn check_resources(&self) -> Result<()> {
        if !matches!(self.experiment, Experiment::Curse | Experiment::Mitigation) {
            return Ok(());
        }
        let predicted = predicted_simplex_count(self.n, self.max_degree());
        if predicted > self.max_simplices {
            return Err(CliError::Resource(format!(
                "n={} up to degree {} needs {predicted} simplices per complex, above the cap of {}",
                self.n,
                self.max_degree(),
                self.max_simplices
            )));
        }
        Ok(())
    }
}
