//! Iteratively regularized Levenberg–Marquardt solver with an
//! amplitude-driven stopping rule and regularization-weight selection.
//!
//! One step linearizes the forward map at the current iterate and solves
//! the regularized normal equations
//!
//! ```text
//! x_{l+1} = x_l + γ · (JᴴJ + α·LᵀL)⁻¹ Jᴴ (y^δ − F(x_l)),     J := F'(x_l),
//! ```
//!
//! with a fixed weight `α` (deliberately *not* decreased across
//! iterations) and the second-difference penalty `L`.  Iterations start
//! from the measured amplitudes with zero phase, `x₀ = Â·exp(i·0)`; the
//! phase information is recovered by the iteration itself.
//!
//! Stopping is driven by the measured amplitudes rather than the residual:
//! the deviation `‖|x_l| − Â‖` typically falls during a productive phase
//! and rises again once the iterates start fitting noise, so the iterate
//! at the running minimum of that deviation is returned.  A run terminates
//! once `patience` consecutive iterations fail to improve the minimum, or
//! at `max_iterations`.
//!
//! The weight `α` is chosen from a finite grid by running the iteration
//! independently per candidate and keeping the run whose stopped iterate
//! has the smallest squared amplitude deviation `Σ(|x(q_n)| − Â_n)²·Δq`
//! (ties go to the largest candidate — the more strongly smoothed
//! solution).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{apply_forward_cached, frechet_matrix_cached};
use crate::grid::SampledGrid;
use crate::kernel::Kernel;
use crate::signal::{l2_norm, l2_norm_real, ComplexSignal};
use crate::smoothing::SecondDiffOperator;

/// Controls for the Levenberg–Marquardt runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LMConfig {
    /// Candidate regularization weights, strictly increasing, all > 0.
    pub alpha_grid: Vec<f64>,
    /// Relaxation factor in (0, 1]; 1 applies the full step.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Hard iteration cap per run.
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Earliest iteration at which the patience rule may fire.
    #[serde(default = "default_min_iterations")]
    pub min_iterations: usize,
    /// Consecutive non-improving iterations that end a run.
    #[serde(default = "default_patience")]
    pub patience: usize,
}

fn default_gamma() -> f64 {
    1.0
}
fn default_max_iterations() -> usize {
    250
}
fn default_min_iterations() -> usize {
    5
}
fn default_patience() -> usize {
    25
}

impl Default for LMConfig {
    fn default() -> Self {
        Self {
            alpha_grid: vec![1.0],
            gamma: default_gamma(),
            max_iterations: default_max_iterations(),
            min_iterations: default_min_iterations(),
            patience: default_patience(),
        }
    }
}

impl LMConfig {
    /// Check every stated invariant, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::InvalidParameter("alpha_grid must not be empty".into()));
        }
        for &a in &self.alpha_grid {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "alpha_grid entries must be positive and finite, got {a}"
                )));
            }
        }
        if !self.alpha_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "alpha_grid must be strictly increasing".into(),
            ));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if self.min_iterations < 1 || self.max_iterations < self.min_iterations {
            return Err(Error::InvalidParameter(format!(
                "need max_iterations >= min_iterations >= 1, got {} and {}",
                self.max_iterations, self.min_iterations
            )));
        }
        if self.patience < 1 {
            return Err(Error::InvalidParameter("patience must be >= 1".into()));
        }
        Ok(())
    }
}

/// One recorded iteration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// Iteration counter, starting at 1 for the first computed iterate.
    pub iteration: usize,
    /// Data misfit `‖F(x_l) − y^δ‖`.
    pub residual: f64,
    /// Smoothness measure `‖L·x_l‖`.
    pub smoothness: f64,
    /// Amplitude deviation `‖|x_l| − Â‖`.
    pub amplitude_deviation: f64,
}

/// The per-iteration records of one run, in iteration order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    /// Records for iterations `1..=stop`.
    pub records: Vec<TraceRecord>,
}

impl IterationTrace {
    /// `(iteration, amplitude_deviation)` pairs in recorded order.
    pub fn deviation_pairs(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .map(|r| (r.iteration, r.amplitude_deviation))
            .collect()
    }
}

/// Result of a single fixed-α run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// The iterate recorded at `l_star` (not the final iterate).
    pub x: ComplexSignal,
    /// Every recorded iteration.
    pub trace: IterationTrace,
    /// Iteration index of the minimal amplitude deviation (ties resolved
    /// toward the later iteration).
    pub l_star: usize,
    /// The iteration at which the patience rule fired, if it did.
    pub stopped_at: Option<usize>,
    /// True when the deviation rose again after its minimum; false means
    /// the deviation was still falling when the run hit its iteration cap
    /// (no turning point observed).
    pub turning_point_observed: bool,
}

/// Summary of one candidate weight inside a sweep.
#[derive(Debug, Clone)]
pub struct AlphaRun {
    /// The regularization weight of this run.
    pub alpha: f64,
    /// Stop index of this run (argmin of the amplitude deviation).
    pub l_star: usize,
    /// Iteration at which patience fired, if it did.
    pub stopped_at: Option<usize>,
    /// Whether the deviation rose again after its minimum.
    pub turning_point_observed: bool,
    /// Squared deviation `Σ(|x| − Â)²·Δq` of the stopped iterate.
    pub deviation_at_stop: f64,
    /// Full per-iteration records.
    pub trace: IterationTrace,
}

/// Outcome of a full sweep: the selected weight, its reconstruction, and
/// every per-candidate record.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Selected regularization weight.
    pub alpha_star: f64,
    /// Stop index of the selected run.
    pub l_star: usize,
    /// Reconstruction at the selected weight's stop index.
    pub x_reconstructed: ComplexSignal,
    /// Group delay (phase derivative) of the reconstruction.
    pub group_delay: Vec<f64>,
    /// Per-candidate outcomes, ordered like the weight grid.
    pub runs: Vec<AlphaRun>,
    /// Index of the selected run inside `runs`.
    pub selected_index: usize,
    /// Candidates that failed and were skipped, with their errors.
    pub warnings: Vec<String>,
}

impl ReconstructionResult {
    /// `(alpha, squared deviation at stop)` pairs in grid order.
    pub fn deviations_at_stop(&self) -> Vec<(f64, f64)> {
        self.runs.iter().map(|r| (r.alpha, r.deviation_at_stop)).collect()
    }
}

/// Perform one Levenberg–Marquardt step from `x_l` using a precomputed
/// kernel matrix and the real normal matrix `LᵀL` of the penalty.
pub fn lm_step_cached(
    x_l: &ComplexSignal,
    y_delta: &ComplexSignal,
    kmat: &DMatrix<Complex64>,
    ltl: &DMatrix<f64>,
    alpha: f64,
    gamma: f64,
    grid: &SampledGrid,
) -> Result<ComplexSignal> {
    check_step_args(x_l, y_delta, alpha, gamma, grid)?;
    let fx = apply_forward_cached(kmat, x_l, grid)?;
    lm_step_inner(x_l, y_delta, &fx, kmat, ltl, alpha, gamma, grid)
}

/// Perform one Levenberg–Marquardt step from `x_l`.
pub fn lm_step(
    x_l: &ComplexSignal,
    y_delta: &ComplexSignal,
    kernel: &Kernel,
    l_op: &SecondDiffOperator,
    alpha: f64,
    gamma: f64,
    grid: &SampledGrid,
) -> Result<ComplexSignal> {
    lm_step_cached(
        x_l,
        y_delta,
        &kernel.matrix(grid),
        &l_op.normal_matrix(),
        alpha,
        gamma,
        grid,
    )
}

fn check_step_args(
    x_l: &ComplexSignal,
    y_delta: &ComplexSignal,
    alpha: f64,
    gamma: f64,
    grid: &SampledGrid,
) -> Result<()> {
    if x_l.len() != grid.n_input() {
        return Err(Error::DimensionMismatch(format!(
            "iterate has {} samples, grid has {} input nodes",
            x_l.len(),
            grid.n_input()
        )));
    }
    if y_delta.len() != grid.n_output() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} samples, grid has {} output nodes",
            y_delta.len(),
            grid.n_output()
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    Ok(())
}

/// Step implementation sharing the already-computed forward value `F(x_l)`.
fn lm_step_inner(
    x_l: &ComplexSignal,
    y_delta: &ComplexSignal,
    fx: &ComplexSignal,
    kmat: &DMatrix<Complex64>,
    ltl: &DMatrix<f64>,
    alpha: f64,
    gamma: f64,
    grid: &SampledGrid,
) -> Result<ComplexSignal> {
    let n = grid.n_input();
    let j = frechet_matrix_cached(kmat, x_l, grid)?;

    // Normal matrix JᴴJ + α·LᵀL (Hermitian positive definite for α > 0).
    let mut a = j.ad_mul(&j);
    for col in 0..n {
        for row in 0..n {
            let w = ltl[(row, col)];
            if w != 0.0 {
                a[(row, col)].re += alpha * w;
            }
        }
    }

    // Right-hand side Jᴴ (y − F(x)).
    let r = DVector::from_iterator(
        grid.n_output(),
        y_delta.values.iter().zip(&fx.values).map(|(y, f)| y - f),
    );
    let b = j.ad_mul(&r);

    let chol = nalgebra::linalg::Cholesky::new(a).ok_or(Error::IllConditioned {
        alpha,
        detail: "Hermitian factorization failed; the weight is too small for this linearization"
            .into(),
    })?;
    let delta = chol.solve(&DVector::from_column_slice(b.as_slice()));

    let values = x_l
        .values
        .iter()
        .zip(delta.iter())
        .map(|(x, d)| x + gamma * d)
        .collect();
    Ok(ComplexSignal::new(values))
}

/// Run the fixed-α iteration from `x₀ = Â·exp(i·0)` until the patience
/// rule fires or the iteration cap is reached, returning the iterate at
/// the deviation minimum together with the full trace.
pub fn run_lm(
    alpha: f64,
    y_delta: &ComplexSignal,
    a_hat: &[f64],
    kernel: &Kernel,
    l_op: &SecondDiffOperator,
    config: &LMConfig,
    grid: &SampledGrid,
) -> Result<RunOutcome> {
    config.validate()?;
    kernel.validate()?;
    if a_hat.len() != grid.n_input() {
        return Err(Error::DimensionMismatch(format!(
            "amplitude measurement has {} samples, grid has {} input nodes",
            a_hat.len(),
            grid.n_input()
        )));
    }
    if a_hat.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter(
            "amplitude measurement must be non-negative to serve as the initial modulus".into(),
        ));
    }
    if y_delta.len() != grid.n_output() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} samples, grid has {} output nodes",
            y_delta.len(),
            grid.n_output()
        )));
    }

    let dq = grid.dq();
    let kmat = kernel.matrix(grid);
    let ltl = l_op.normal_matrix();

    let mut x = ComplexSignal::from_real(a_hat);
    let mut fx = apply_forward_cached(&kmat, &x, grid)?;

    let mut trace = IterationTrace::default();
    let mut best_dev = f64::INFINITY;
    let mut best_l = 0;
    let mut best_x = x.clone();
    let mut since_improvement = 0_usize;
    let mut stopped_at = None;

    for l in 1..=config.max_iterations {
        x = lm_step_inner(&x, y_delta, &fx, &kmat, &ltl, alpha, config.gamma, grid).map_err(
            |e| match e {
                Error::IllConditioned { alpha, detail } => Error::IllConditioned {
                    alpha,
                    detail: format!("iteration {l}: {detail}"),
                },
                other => Error::Solver(format!("iteration {l}: {other}")),
            },
        )?;
        fx = apply_forward_cached(&kmat, &x, grid)?;

        let residual = l2_norm(
            &fx.values
                .iter()
                .zip(&y_delta.values)
                .map(|(f, y)| f - y)
                .collect::<Vec<_>>(),
            dq,
        );
        let smoothness = l2_norm(&l_op.apply(&x.values)?, dq);
        let deviation = l2_norm_real(
            &x.values
                .iter()
                .zip(a_hat)
                .map(|(z, &a)| z.norm() - a)
                .collect::<Vec<_>>(),
            dq,
        );
        trace.records.push(TraceRecord {
            iteration: l,
            residual,
            smoothness,
            amplitude_deviation: deviation,
        });

        if deviation <= best_dev {
            best_dev = deviation;
            best_l = l;
            best_x = x.clone();
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if l >= config.min_iterations && since_improvement >= config.patience {
            stopped_at = Some(l);
            break;
        }
    }

    let last_l = trace
        .records
        .last()
        .map(|r| r.iteration)
        .ok_or_else(|| Error::Solver("no iterations were recorded".into()))?;
    Ok(RunOutcome {
        x: best_x,
        trace,
        l_star: best_l,
        stopped_at,
        turning_point_observed: best_l < last_l,
    })
}

/// Stop-index extraction from a recorded deviation sequence: the iteration
/// holding the minimal deviation, with ties resolved toward the later
/// iteration.  This is the same rule [`run_lm`] applies online, usable to
/// replay externally recorded traces.
pub fn turning_point(deviations: &[(usize, f64)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(l, d) in deviations {
        match best {
            Some((_, bd)) if d > bd => {}
            _ => best = Some((l, d)),
        }
    }
    best.map(|(l, _)| l)
}

/// Run the iteration independently for every candidate weight and select
/// the one whose stopped iterate minimizes the squared amplitude deviation
/// `Σ(|x(q_n)| − Â_n)²·Δq` (ties to the largest weight).  Candidate runs
/// execute in parallel; failed candidates are skipped and reported in
/// `warnings`.
pub fn select_alpha(
    y_delta: &ComplexSignal,
    a_hat: &[f64],
    kernel: &Kernel,
    l_op: &SecondDiffOperator,
    config: &LMConfig,
    grid: &SampledGrid,
) -> Result<ReconstructionResult> {
    config.validate()?;
    let outcomes: Vec<(f64, Result<RunOutcome>)> = config
        .alpha_grid
        .par_iter()
        .map(|&alpha| (alpha, run_lm(alpha, y_delta, a_hat, kernel, l_op, config, grid)))
        .collect();

    let dq = grid.dq();
    let mut warnings = Vec::new();
    let mut candidates: Vec<(f64, RunOutcome, f64)> = Vec::new();
    let mut first_error = None;
    for (alpha, outcome) in outcomes {
        match outcome {
            Ok(run) => {
                let dev2: f64 = run
                    .x
                    .values
                    .iter()
                    .zip(a_hat)
                    .map(|(z, &a)| {
                        let d = z.norm() - a;
                        d * d
                    })
                    .sum::<f64>()
                    * dq;
                candidates.push((alpha, run, dev2));
            }
            Err(e) => {
                warnings.push(format!("alpha {alpha:e} skipped: {e}"));
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(first_error
            .unwrap_or_else(|| Error::Solver("no candidate weights were provided".into())));
    }

    // Argmin with ties to the largest weight: scanning in ascending order
    // with a non-strict comparison keeps the last minimizer.
    let mut selected = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.2 <= candidates[selected].2 {
            selected = i;
        }
    }

    let x_reconstructed = candidates[selected].1.x.clone();
    let group_delay_values = group_delay(&x_reconstructed, dq);
    let runs: Vec<AlphaRun> = candidates
        .into_iter()
        .map(|(alpha, run, dev2)| AlphaRun {
            alpha,
            l_star: run.l_star,
            stopped_at: run.stopped_at,
            turning_point_observed: run.turning_point_observed,
            deviation_at_stop: dev2,
            trace: run.trace,
        })
        .collect();

    Ok(ReconstructionResult {
        alpha_star: runs[selected].alpha,
        l_star: runs[selected].l_star,
        x_reconstructed,
        group_delay: group_delay_values,
        runs,
        selected_index: selected,
        warnings,
    })
}

/// Dimensionless representation of a regularization weight:
/// `α̂ = α · Â_max² · Δq⁻⁴ · kernel_scale⁻²`.
///
/// The normalization makes weights comparable across grid resolutions,
/// amplitude scales, and kernel magnitudes:  scaling the kernel by `c`,
/// the data by `c`, and `α` by `|c|²` leaves the iterates and `α̂`
/// unchanged.
pub fn normalized_alpha(alpha: f64, a_hat_max: f64, dq: f64, kernel_scale: f64) -> Result<f64> {
    check_alpha_factors(alpha, a_hat_max, dq, kernel_scale)?;
    Ok(alpha * a_hat_max * a_hat_max / (dq.powi(4) * kernel_scale * kernel_scale))
}

/// Inverse of [`normalized_alpha`].
pub fn denormalized_alpha(alpha_hat: f64, a_hat_max: f64, dq: f64, kernel_scale: f64) -> Result<f64> {
    check_alpha_factors(alpha_hat, a_hat_max, dq, kernel_scale)?;
    Ok(alpha_hat / (a_hat_max * a_hat_max) * dq.powi(4) * kernel_scale * kernel_scale)
}

fn check_alpha_factors(alpha: f64, a_hat_max: f64, dq: f64, kernel_scale: f64) -> Result<()> {
    for (name, v) in [
        ("alpha", alpha),
        ("a_hat_max", a_hat_max),
        ("dq", dq),
        ("kernel_scale", kernel_scale),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

/// Group delay: the derivative of the unwrapped phase along the grid.
///
/// The phase differences are taken per sample pair as
/// `arg(z_{i+1}·conj(z_i))`, which is exactly invariant under a global
/// sign flip or any constant phase factor; central differences are used in
/// the interior and one-sided differences at the two boundary nodes, so
/// the result has the same length as the input.  Samples with zero
/// modulus contribute zero phase increments.
pub fn group_delay(x: &ComplexSignal, dq: f64) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut phase = vec![0.0_f64; n];
    for i in 1..n {
        let prod = x.values[i] * x.values[i - 1].conj();
        let inc = if prod.norm() == 0.0 { 0.0 } else { prod.arg() };
        phase[i] = phase[i - 1] + inc;
    }
    let mut gd = vec![0.0_f64; n];
    gd[0] = (phase[1] - phase[0]) / dq;
    for i in 1..n - 1 {
        gd[i] = (phase[i + 1] - phase[i - 1]) / (2.0 * dq);
    }
    gd[n - 1] = (phase[n - 1] - phase[n - 2]) / dq;
    gd
}
