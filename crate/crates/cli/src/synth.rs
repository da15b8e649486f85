//! `synth`: generate a measurement directory from the configured pulse.

use std::path::Path;

use anyhow::{bail, Context, Result};

use deautoconv::{io, simulate_measurement, NoiseSpec};

use crate::config::RunConfig;

pub fn run(config: Option<&Path>, out: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let config_path = config.context("synth requires --config")?;
    let cfg = RunConfig::load(config_path)?;
    let grid = cfg.grid()?;
    let Some(pulse) = cfg.pulse.clone() else {
        bail!("synth requires a pulse section in the config");
    };
    let mut noise = cfg
        .noise
        .clone()
        .unwrap_or(NoiseSpec { delta_percent: 0.0, seed: 0 });
    if let Some(s) = seed {
        noise.seed = s;
    }
    let refine = cfg.refine.clone().unwrap_or_default();

    let set = simulate_measurement(
        &pulse,
        &cfg.kernel,
        (refine.numerator, refine.denominator),
        &grid,
        &noise,
    )
    .context("simulating the measurement")?;

    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| "measurement".into());
    io::save_measurement_set(&dir, &set)
        .with_context(|| format!("writing measurement to {}", dir.display()))?;

    println!(
        "wrote measurement to {} (n_points={}, fine_points={}, delta={}%, seed={})",
        dir.display(),
        grid.n_points,
        set.meta.fine_points,
        noise.delta_percent,
        noise.seed
    );
    Ok(())
}
