//! Run configuration: a single JSON file describing grid, kernel, pulse,
//! noise, refinement, solver controls, and the output directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use deautoconv::{denormalized_alpha, Kernel, LMConfig, NoiseSpec, PulseSpec, SampledGrid};

/// Top-level configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub kernel: Kernel,
    #[serde(default)]
    pub pulse: Option<PulseSpec>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub refine: Option<RefineSection>,
    #[serde(default)]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// Grid block; validated through the library constructor.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
    #[serde(default)]
    pub q_cw: f64,
}

/// Grid refinement ratio used when synthesizing data.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineSection {
    pub numerator: u32,
    pub denominator: u32,
}

impl Default for RefineSection {
    fn default() -> Self {
        Self { numerator: 7, denominator: 3 }
    }
}

/// Solver block.  The candidate weights are given either raw
/// (`alpha_grid`) or in dimensionless form (`alpha_hat_grid`), which is
/// rescaled against the measurement at reconstruction time.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha_hat_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub min_iterations: Option<usize>,
    #[serde(default)]
    pub patience: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&raw)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.kernel
            .validate()
            .with_context(|| "invalid kernel section")?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<SampledGrid> {
        SampledGrid::new(
            self.grid.q_min,
            self.grid.q_max,
            self.grid.n_points,
            self.grid.q_cw,
        )
        .context("invalid grid section")
    }
}

impl SolverSection {
    /// Resolve into solver controls, rescaling a dimensionless weight grid
    /// against the measurement's amplitude peak, grid step, and kernel
    /// scale.  Returns the controls together with the dimensionless
    /// counterparts of the final weights.
    pub fn resolve(
        &self,
        a_hat_max: f64,
        dq: f64,
        kernel_scale: f64,
    ) -> Result<(LMConfig, Vec<f64>)> {
        let defaults = LMConfig::default();
        let alpha_grid = match (&self.alpha_grid, &self.alpha_hat_grid) {
            (Some(_), Some(_)) => {
                bail!("solver section must give alpha_grid or alpha_hat_grid, not both")
            }
            (None, None) => bail!("solver section must give alpha_grid or alpha_hat_grid"),
            (Some(raw), None) => raw.clone(),
            (None, Some(hat)) => hat
                .iter()
                .map(|&a| denormalized_alpha(a, a_hat_max, dq, kernel_scale))
                .collect::<deautoconv::Result<Vec<f64>>>()
                .context("rescaling alpha_hat_grid")?,
        };
        let config = LMConfig {
            alpha_grid,
            gamma: self.gamma.unwrap_or(defaults.gamma),
            max_iterations: self.max_iterations.unwrap_or(defaults.max_iterations),
            min_iterations: self.min_iterations.unwrap_or(defaults.min_iterations),
            patience: self.patience.unwrap_or(defaults.patience),
        };
        config.validate().context("invalid solver section")?;
        let alpha_hats = config
            .alpha_grid
            .iter()
            .map(|&a| deautoconv::normalized_alpha(a, a_hat_max, dq, kernel_scale))
            .collect::<deautoconv::Result<Vec<f64>>>()
            .context("normalizing resolved weights")?;
        Ok((config, alpha_hats))
    }
}
