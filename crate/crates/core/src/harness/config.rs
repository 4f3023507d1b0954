//! Experiment configuration: built-in defaults, a TOML file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::oracle::ORACLE_CAP;
use crate::well::DEFAULT_WALL_HEIGHT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SbpCheck,
    Spectrum,
    Leakage,
    Well,
    Moments,
    Commutator,
    Dispersion,
    All,
}

impl Experiment {
    pub const SINGLE: [Experiment; 7] = [
        Experiment::SbpCheck,
        Experiment::Spectrum,
        Experiment::Leakage,
        Experiment::Well,
        Experiment::Moments,
        Experiment::Commutator,
        Experiment::Dispersion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SbpCheck => "sbp-check",
            Self::Spectrum => "spectrum",
            Self::Leakage => "leakage",
            Self::Well => "well",
            Self::Moments => "moments",
            Self::Commutator => "commutator",
            Self::Dispersion => "dispersion",
            Self::All => "all",
        }
    }

    /// Experiments that accept odd sizes small enough for the oracle.
    pub fn permits_oracle_scale(self) -> bool {
        matches!(self, Self::SbpCheck | Self::Spectrum)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::SINGLE
            .into_iter()
            .chain([Self::All])
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format '{other}', expected csv or json"))),
        }
    }
}

pub const DEFAULT_GRIDS: [usize; 5] = [32, 64, 128, 256, 512];
pub const DEFAULT_LEVELS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid_sizes: Vec<usize>,
    pub domain: (f64, f64),
    pub hbar: f64,
    pub mass: f64,
    pub wall_height: f64,
    pub levels: usize,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            grid_sizes: DEFAULT_GRIDS.to_vec(),
            domain: (0.0, 1.0),
            hbar: 1.0,
            mass: 1.0,
            wall_height: DEFAULT_WALL_HEIGHT,
            levels: DEFAULT_LEVELS,
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_sizes.is_empty() {
            return Err(Error::Config("grid_sizes must not be empty".into()));
        }
        for &n in &self.grid_sizes {
            let oracle_ok = self.experiment.permits_oracle_scale() && (3..=ORACLE_CAP).contains(&n);
            if !oracle_ok && (n < 8 || n % 2 != 0) {
                return Err(Error::GridLevels {
                    nx: n,
                    reason: format!("experiment {} needs even sizes >= 8", self.experiment),
                });
            }
        }
        if self.grid_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("grid sizes must be strictly increasing".into()));
        }
        let (a, b) = self.domain;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("invalid domain ({a}, {b})")));
        }
        for (name, v) in [("hbar", self.hbar), ("mass", self.mass), ("wall", self.wall_height)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.levels < 1 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grids(&self) -> Result<Vec<Grid>> {
        self.grid_sizes
            .iter()
            .map(|&n| Grid::new(self.domain.0, self.domain.1, n))
            .collect()
    }

    /// Hex SHA-256 over the canonical JSON of every field that affects the
    /// artifacts; the output directory is excluded.
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            experiment: Experiment,
            grid_sizes: &'a [usize],
            domain: (f64, f64),
            hbar: f64,
            mass: f64,
            wall_height: f64,
            levels: usize,
            format: OutputFormat,
        }
        let canonical = Canonical {
            experiment: self.experiment,
            grid_sizes: &self.grid_sizes,
            domain: self.domain,
            hbar: self.hbar,
            mass: self.mass,
            wall_height: self.wall_height,
            levels: self.levels,
            format: self.format,
        };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Optional settings shared by the config file and the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub grids: Option<Vec<usize>>,
    pub domain: Option<(f64, f64)>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub wall: Option<f64>,
    pub levels: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(e) = self.experiment {
            cfg.experiment = e;
        }
        if let Some(g) = &self.grids {
            cfg.grid_sizes = g.clone();
        }
        if let Some(d) = self.domain {
            cfg.domain = d;
        }
        if let Some(v) = self.hbar {
            cfg.hbar = v;
        }
        if let Some(v) = self.mass {
            cfg.mass = v;
        }
        if let Some(v) = self.wall {
            cfg.wall_height = v;
        }
        if let Some(v) = self.levels {
            cfg.levels = v;
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
    }
}

/// Flags override the file, which overrides the defaults.
pub fn resolve(experiment: Experiment, file: Option<&Overrides>, flags: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    if let Some(f) = file {
        f.apply(&mut cfg);
    }
    flags.apply(&mut cfg);
    cfg.experiment = flags.experiment.unwrap_or(experiment);
    cfg.validate()?;
    Ok(cfg)
}

/// `"32,64,128"` into sizes.
pub fn parse_grid_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid grid size '{t}'")))
        })
        .collect()
}

/// `"a,b"` into a domain.
pub fn parse_domain(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("domain must read a,b, got '{s}'")));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("invalid domain bound '{t}'")))
    };
    Ok((num(parts[0])?, num(parts[1])?))
}
