//! Run configuration assembled from the global command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use juliagreen_core::poincare::PoincareConfig;
use juliagreen_core::quadrature::QuadSettings;
use juliagreen_core::radvar::RadVarSettings;
use juliagreen_core::ray::RayConfig;

use crate::error::{CliError, Result};

/// Output encoding selected with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Svg,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
        })
    }
}

/// Named tolerances accepted by `--tol KEY=VAL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TolKey {
    /// Relative accuracy of each scale integral.
    Quad,
    /// Last kept term of the Böttcher series along rays.
    Series,
    /// Allowed mismatch between a ray sample's Green's height and its target.
    Height,
    /// Relative size of the extrapolated tail accepted as converged.
    Tail,
    /// Depth-refinement threshold of the Poincaré function.
    Poincare,
}

impl TolKey {
    pub const ALL: [TolKey; 5] = [
        TolKey::Quad,
        TolKey::Series,
        TolKey::Height,
        TolKey::Tail,
        TolKey::Poincare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TolKey::Quad => "quad",
            TolKey::Series => "series",
            TolKey::Height => "height",
            TolKey::Tail => "tail",
            TolKey::Poincare => "poincare",
        }
    }
}

impl FromStr for TolKey {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        TolKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = TolKey::ALL.iter().map(|k| k.name()).collect();
                CliError::Usage(format!(
                    "unknown tolerance key `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// One `KEY=VAL` pair as typed on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolSetting {
    pub key: TolKey,
    pub value: f64,
}

impl FromStr for TolSetting {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("tolerance `{s}` must be written KEY=VAL")))?;
        let key: TolKey = key.trim().parse()?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance value `{value}` is not a number")))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::Usage(format!(
                "tolerance {} must be positive and finite",
                key.name()
            )));
        }
        Ok(TolSetting { key, value })
    }
}

/// Everything a subcommand needs besides its own arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda: f64,
    pub tolerances: BTreeMap<TolKey, f64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(lambda: f64) -> Self {
        RunConfig {
            lambda,
            tolerances: BTreeMap::new(),
            out_dir: None,
            format: None,
            jobs: None,
        }
    }

    /// Applies parsed `--tol` settings; a repeated key keeps the last value.
    pub fn with_tolerances(mut self, settings: &[TolSetting]) -> Self {
        for s in settings {
            self.tolerances.insert(s.key, s.value);
        }
        self
    }

    pub fn tolerance(&self, key: TolKey) -> Option<f64> {
        self.tolerances.get(&key).copied()
    }

    pub fn ray_config(&self) -> RayConfig {
        let mut config = RayConfig::default();
        if let Some(v) = self.tolerance(TolKey::Series) {
            config.series_tol = v;
        }
        if let Some(v) = self.tolerance(TolKey::Height) {
            config.height_tol = v;
        }
        config
    }

    pub fn quad_settings(&self) -> QuadSettings {
        let mut quad = QuadSettings::default();
        if let Some(v) = self.tolerance(TolKey::Quad) {
            quad.rel_tol = v;
        }
        quad
    }

    pub fn radvar_settings(&self) -> RadVarSettings {
        let mut settings = RadVarSettings {
            quad: self.quad_settings(),
            ray: self.ray_config(),
            ..RadVarSettings::default()
        };
        if let Some(v) = self.tolerance(TolKey::Tail) {
            settings.tail_tol = v;
        }
        settings
    }

    pub fn poincare_config(&self) -> PoincareConfig {
        let mut config = PoincareConfig::default();
        if let Some(v) = self.tolerance(TolKey::Poincare) {
            config.tol = v;
        }
        config
    }

    /// Resolves an output file name against `--out`.
    pub fn output_path(&self, name: &str) -> PathBuf {
        match &self.out_dir {
            Some(dir) => dir.join(name),
            None => PathBuf::from(name),
        }
    }
}
