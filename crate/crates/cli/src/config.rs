use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use funklib::inversion::RANGE_TOLERANCE;
use funklib::transform::K_AVERAGE_NODES;
use funklib::SphereGrid;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Resolution, tolerances and output settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_lat: usize,
    /// Defaults to `2 n_lat`.
    pub n_lon: Option<usize>,
    /// Defaults to the grid's largest exact degree.
    pub bandlimit: Option<usize>,
    pub m_circle: usize,
    pub m_average: usize,
    pub n_t: usize,
    pub identity_tol: f64,
    pub constant_tol: f64,
    pub range_tol: f64,
    pub out: Option<PathBuf>,
    /// Defaults to JSON for grid outputs and CSV for tables.
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_lat: SphereGrid::DEFAULT_N_LAT,
            n_lon: None,
            bandlimit: None,
            m_circle: 128,
            m_average: K_AVERAGE_NODES,
            n_t: 512,
            identity_tol: 1e-3,
            constant_tol: 1e-6,
            range_tol: RANGE_TOLERANCE,
            out: None,
            format: None,
        }
    }
}

/// Flags that override the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON file with any subset of the run configuration fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n_lat: Option<usize>,
    #[arg(long, global = true)]
    pub n_lon: Option<usize>,
    #[arg(long, global = true)]
    pub bandlimit: Option<usize>,
    /// Nodes per great or latitude circle.
    #[arg(long, global = true)]
    pub m_circle: Option<usize>,
    /// Rotations per K-average.
    #[arg(long, global = true)]
    pub m_average: Option<usize>,
    /// Nodes of the fractional-calculus grid.
    #[arg(long, global = true)]
    pub n_t: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(args: &ConfigArgs) -> CliResult<Self> {
        let mut cfg = match &args.config {
            Some(path) => Self::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($field:ident),*) => { $( if let Some(v) = args.$field.clone() { cfg.$field = v; } )* };
        }
        over!(n_lat, m_circle, m_average, n_t);
        if args.format.is_some() {
            cfg.format = args.format;
        }
        if args.n_lon.is_some() {
            cfg.n_lon = args.n_lon;
        }
        if args.bandlimit.is_some() {
            cfg.bandlimit = args.bandlimit;
        }
        if args.out.is_some() {
            cfg.out = args.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
    }

    fn validate(&self) -> CliResult<()> {
        if self.n_lat < 2 {
            return Err(CliError::Precondition(format!("n_lat = {} must be at least 2", self.n_lat)));
        }
        if self.m_circle < 3 || self.m_average < 3 {
            return Err(CliError::Precondition("circle node counts must be at least 3".into()));
        }
        if self.n_t < 8 {
            return Err(CliError::Precondition(format!("n_t = {} must be at least 8", self.n_t)));
        }
        let max = self.grid()?.max_bandlimit();
        if let Some(l) = self.bandlimit {
            if l > max {
                return Err(CliError::Precondition(format!(
                    "bandlimit {l} exceeds the grid's largest exact degree {max}"
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> CliResult<Arc<SphereGrid>> {
        let n_lon = self.n_lon.unwrap_or(2 * self.n_lat);
        Ok(Arc::new(SphereGrid::with_lon(self.n_lat, n_lon)?))
    }

    pub fn bandlimit(&self, grid: &SphereGrid) -> usize {
        self.bandlimit.unwrap_or_else(|| grid.max_bandlimit())
    }
}
