//! `reconstruct`: sweep the candidate weights over a measurement
//! directory and write the selected reconstruction, per-candidate
//! traces, and a JSON summary — or replay a recorded trace through the
//! stopping rule.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use deautoconv::{
    io, normalized_alpha, reconstruction_error, select_alpha, turning_point, LMConfig,
    MeasurementMeta, SecondDiffOperator,
};

use crate::config::RunConfig;

/// Fraction of the grid interior used when scoring against ground truth.
const SCORE_CENTRAL_FRACTION: f64 = 0.6;

#[derive(Serialize)]
struct RunSummary {
    alpha: f64,
    alpha_hat: f64,
    l_star: usize,
    stopped_at: Option<usize>,
    turning_point_observed: bool,
    deviation_at_stop: f64,
    trace_file: String,
}

#[derive(Serialize)]
struct Scores {
    amplitude_rmse: f64,
    group_delay_rmse: f64,
    central_fraction: f64,
}

#[derive(Serialize)]
struct EffectiveConfig {
    solver: LMConfig,
    alpha_hat_grid: Vec<f64>,
    measurement: MeasurementMeta,
}

#[derive(Serialize)]
struct Summary {
    alpha_star: f64,
    alpha_hat_star: f64,
    l_star: usize,
    selected_index: usize,
    turning_point_observed: bool,
    deviation_at_stop: f64,
    runs: Vec<RunSummary>,
    scores: Option<Scores>,
    warnings: Vec<String>,
    config: EffectiveConfig,
}

#[derive(Serialize)]
struct ReplaySummary {
    source: String,
    records: usize,
    l_star: usize,
}

pub fn run(
    measurement: Option<&Path>,
    replay_trace: Option<&Path>,
    config: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    if let Some(trace_path) = replay_trace {
        return replay(trace_path, out);
    }
    let mdir = measurement.context("reconstruct requires a measurement directory")?;
    let config_path = config.context("reconstruct requires --config")?;
    let cfg = RunConfig::load(config_path)?;
    let Some(solver_section) = cfg.solver.clone() else {
        bail!("reconstruct requires a solver section in the config");
    };

    let set = io::load_measurement_set(mdir)
        .with_context(|| format!("loading measurement {}", mdir.display()))?;
    let grid = set.meta.grid.clone();
    let kernel = set.meta.kernel.clone();
    kernel.validate().context("kernel stored in meta.json")?;

    let a_hat_max = set.a_hat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(a_hat_max > 0.0) {
        bail!("amplitude measurement has no positive samples");
    }
    let (solver, alpha_hats) = solver_section.resolve(a_hat_max, grid.dq(), kernel.scale())?;

    let l_op = SecondDiffOperator::new(grid.n_input(), grid.dq())
        .context("building the smoothing operator")?;
    let result = select_alpha(&set.y_delta, &set.a_hat, &kernel, &l_op, &solver, &grid)
        .context("weight sweep failed")?;

    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| "reconstruction".into());
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;

    io::write_reconstruction_csv(
        &dir.join("reconstruction.csv"),
        &grid.input_nodes(),
        &result.x_reconstructed,
        &result.group_delay,
    )?;

    let mut runs = Vec::with_capacity(result.runs.len());
    for run in &result.runs {
        let trace_file = format!("trace_{:e}.csv", run.alpha);
        io::write_trace_csv(&dir.join(&trace_file), &run.trace)?;
        runs.push(RunSummary {
            alpha: run.alpha,
            alpha_hat: normalized_alpha(run.alpha, a_hat_max, grid.dq(), kernel.scale())?,
            l_star: run.l_star,
            stopped_at: run.stopped_at,
            turning_point_observed: run.turning_point_observed,
            deviation_at_stop: run.deviation_at_stop,
            trace_file,
        });
    }

    let scores = match &set.ground_truth {
        Some(truth) => {
            let (amplitude_rmse, group_delay_rmse) = reconstruction_error(
                &result.x_reconstructed,
                truth,
                SCORE_CENTRAL_FRACTION,
                grid.dq(),
            )?;
            Some(Scores {
                amplitude_rmse,
                group_delay_rmse,
                central_fraction: SCORE_CENTRAL_FRACTION,
            })
        }
        None => None,
    };

    let selected = &result.runs[result.selected_index];
    let summary = Summary {
        alpha_star: result.alpha_star,
        alpha_hat_star: runs[result.selected_index].alpha_hat,
        l_star: result.l_star,
        selected_index: result.selected_index,
        turning_point_observed: selected.turning_point_observed,
        deviation_at_stop: selected.deviation_at_stop,
        runs,
        scores,
        warnings: result.warnings.clone(),
        config: EffectiveConfig {
            solver,
            alpha_hat_grid: alpha_hats,
            measurement: set.meta.clone(),
        },
    };
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(dir.join("summary.json"), json + "\n")?;

    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "selected alpha {:e} (alpha_hat {:e}) stopping at iteration {}; wrote {}",
        summary.alpha_star,
        summary.alpha_hat_star,
        summary.l_star,
        dir.display()
    );
    Ok(())
}

/// Feed the amplitude-deviation column of a recorded trace through the
/// stopping rule and report the selected iteration.
fn replay(trace_path: &Path, out: Option<&Path>) -> Result<()> {
    let trace = io::read_trace_csv(trace_path)
        .with_context(|| format!("reading trace {}", trace_path.display()))?;
    let pairs = trace.deviation_pairs();
    let l_star = turning_point(&pairs).context("trace holds no records")?;

    let summary = ReplaySummary {
        source: trace_path.display().to_string(),
        records: pairs.len(),
        l_star,
    };
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| ".".into());
    std::fs::create_dir_all(&dir)?;
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(dir.join("replay.json"), json + "\n")?;
    println!("replayed {} records: l_star = {}", pairs.len(), l_star);
    Ok(())
}
