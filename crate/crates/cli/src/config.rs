use std::path::{Path, PathBuf};

use serde::Deserialize;

use gasflex::formulation::{BigMOverrides, FormulationConfig};
use gasflex::solver::SolveOptions;

/// Solver command that selects the in-process HiGHS backend.
pub const BUILTIN_SOLVER: &str = "builtin";

/// Settings read from the `--config` file. Every field is optional; command
/// line flags take precedence.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub formulation: FormulationSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FormulationSection {
    pub points: Option<usize>,
    pub pressure_resolution: Option<f64>,
    pub tightening: Option<bool>,
    #[serde(default)]
    pub big_m: BigMSection,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BigMSection {
    pub flow: Option<f64>,
    pub pressure: Option<f64>,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// External solver command line, or `builtin`.
    pub command: Option<String>,
    pub mip_gap: Option<f64>,
    pub time_limit: Option<f64>,
    pub threads: Option<u32>,
    pub seed: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        Self::parse(&text).map_err(|e| ConfigError::Parse(path.to_path_buf(), e))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Formulation settings with command-line overrides applied.
    pub fn formulation(&self, points: Option<usize>, no_tightening: bool) -> FormulationConfig {
        let f = &self.formulation;
        let mut cfg = FormulationConfig::default();
        if let Some(p) = points.or(f.points) {
            cfg.points = p;
        }
        if let Some(r) = f.pressure_resolution {
            cfg.pressure_resolution = r;
        }
        cfg.tightening = !no_tightening && f.tightening.unwrap_or(true);
        cfg.big_m = BigMOverrides {
            flow: f.big_m.flow,
            pressure: f.big_m.pressure,
            slope: f.big_m.slope,
        };
        cfg
    }

    pub fn solve_options(&self) -> SolveOptions {
        let s = &self.solver;
        let mut opts = SolveOptions::default();
        if let Some(g) = s.mip_gap {
            opts.mip_gap = g;
        }
        if let Some(t) = s.time_limit {
            opts.time_limit_secs = t;
        }
        if s.threads.is_some() {
            opts.threads = s.threads;
        }
        if s.seed.is_some() {
            opts.seed = s.seed;
        }
        opts
    }
}
