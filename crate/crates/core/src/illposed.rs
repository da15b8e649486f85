//! Executable forms of the problem's analytic pathologies: the weak-pole
//! perturbation family that exhibits local ill-posedness, its closed-form
//! autoconvolution, the global sign ambiguity, and reconstruction metrics
//! that respect that ambiguity.
//!
//! The family `Ψ_β(q) = r·√(1−2β)·q^{−β}` on (0, 1] has L² norm exactly
//! `r` for every β ∈ (0, ½), while the norm of its autoconvolution tends
//! to zero as β → ½.  Adding `Ψ_β` to any base signal therefore produces
//! perturbations of fixed size whose effect on the data vanishes — no
//! error bound on the reconstruction can follow from a bound on the data
//! misfit, which is precisely local ill-posedness.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::forward::apply_forward;
use crate::grid::SampledGrid;
use crate::kernel::Kernel;
use crate::signal::{l2_norm, ComplexSignal};
use crate::solver::group_delay;

/// Parameters of the perturbation family: radius `r` (the exact L² norm)
/// and pole exponent `β ∈ (0, ½)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiBetaSpec {
    /// Perturbation radius; equals the continuum L² norm of the family.
    pub r: f64,
    /// Pole exponent in (0, ½).
    pub beta: f64,
}

impl PsiBetaSpec {
    /// Enforce `r > 0` and `β ∈ (0, ½)`.
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "perturbation radius must be positive and finite, got {}",
                self.r
            )));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "pole exponent must lie strictly inside (0, 1/2), got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Sample `Ψ_β` on the input nodes of a unit-interval grid.
///
/// The pole node at `q = 0` is assigned the value whose squared cell mass
/// equals the exact integral of `Ψ_β²` over the first cell `[0, Δq]`,
/// i.e. `r·Δq^{−β}`; every other node carries the pointwise value
/// `r·√(1−2β)·q^{−β}`.  This keeps the discrete norm within a few percent
/// of the exact norm `r` across the whole exponent range, which the naive
/// midpoint substitution does not (its discrete norm collapses as
/// β → ½ because the first cell then carries almost all of the mass).
pub fn psi_beta_samples(spec: &PsiBetaSpec, grid: &SampledGrid) -> Result<ComplexSignal> {
    spec.validate()?;
    if grid.q_min != 0.0 || grid.q_max != 1.0 {
        return Err(Error::InvalidGrid(format!(
            "the perturbation family lives on the unit interval, got [{}, {}]",
            grid.q_min, grid.q_max
        )));
    }
    let scale = spec.r * (1.0 - 2.0 * spec.beta).sqrt();
    let dq = grid.dq();
    let mut values = Vec::with_capacity(grid.n_input());
    values.push(num_complex::Complex64::new(spec.r * dq.powf(-spec.beta), 0.0));
    for i in 1..grid.n_input() {
        let q = grid.input_node(i);
        values.push(num_complex::Complex64::new(scale * q.powf(-spec.beta), 0.0));
    }
    Ok(ComplexSignal::new(values))
}

/// Natural-log Beta function `ln B(a, b)` via log-Gamma.
fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Closed-form autoconvolution of `Ψ_β` at a point `s ∈ [0, 2]`:
///
/// ```text
/// (Ψ_β ∗ Ψ_β)(s) = r²(1−2β)·s^{1−2β}·B(1−β, 1−β)                 s ∈ [0, 1]
///                = the same expression times the incomplete-Beta
///                  factor I_{1/s}(1−β,1−β) − I_{(s−1)/s}(1−β,1−β)   s ∈ (1, 2]
/// ```
///
/// For `s > 1` the convolution integral runs only over `q ∈ [s−1, 1]`
/// (both factors must stay inside the unit interval), which truncates the
/// Beta integral symmetrically; the regularized incomplete Beta function
/// expresses that truncation and reduces continuously to the complete
/// form at `s = 1`.
pub fn psi_beta_autoconv_closed_form(spec: &PsiBetaSpec, s: f64) -> Result<f64> {
    spec.validate()?;
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "autoconvolution support is [0, 2], got s = {s}"
        )));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let a = 1.0 - spec.beta;
    let b_complete = ln_beta(a, a).exp();
    let base =
        spec.r * spec.r * (1.0 - 2.0 * spec.beta) * s.powf(1.0 - 2.0 * spec.beta) * b_complete;
    if s <= 1.0 {
        Ok(base)
    } else {
        let hi = beta_reg(a, a, 1.0 / s);
        let lo = beta_reg(a, a, (s - 1.0) / s);
        Ok(base * (hi - lo))
    }
}

/// One row of the ill-posedness table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IllposedRow {
    /// Pole exponent of this row.
    pub beta: f64,
    /// Discrete norm of the perturbation (≈ r for every β).
    pub perturbation_norm: f64,
    /// Discrete norm of the image difference `‖F(x₀+Ψ_β) − F(x₀)‖`.
    pub image_diff_norm: f64,
    /// Analytic bound `√2·r²·(1−2β)·π·2^{1−2β}` on the pure
    /// autoconvolution image (exact for `x₀ ≡ 0`, `k ≡ 1`).
    pub bound: f64,
}

/// Tabulate the ill-posedness mechanism: for each exponent, perturb `x0`
/// by `Ψ_β` and record the perturbation norm next to the image-difference
/// norm.  The perturbation column stays ≈ `r` while the image column
/// collapses as β → ½.
pub fn illposedness_demo(
    x0: &ComplexSignal,
    r: f64,
    betas: &[f64],
    kernel: &Kernel,
    grid: &SampledGrid,
) -> Result<Vec<IllposedRow>> {
    if betas.is_empty() {
        return Err(Error::InvalidParameter("need at least one exponent".into()));
    }
    if !betas.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "exponents must increase strictly toward 1/2".into(),
        ));
    }
    if x0.len() != grid.n_input() {
        return Err(Error::DimensionMismatch(format!(
            "base signal has {} samples, grid has {} input nodes",
            x0.len(),
            grid.n_input()
        )));
    }
    kernel.validate()?;
    let dq = grid.dq();
    let f0 = apply_forward(kernel, x0, grid)?;
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        let spec = PsiBetaSpec { r, beta };
        let psi = psi_beta_samples(&spec, grid)?;
        let perturbed = ComplexSignal::new(
            x0.values.iter().zip(&psi.values).map(|(a, b)| a + b).collect(),
        );
        let f1 = apply_forward(kernel, &perturbed, grid)?;
        let diff: Vec<_> = f1.values.iter().zip(&f0.values).map(|(a, b)| a - b).collect();
        rows.push(IllposedRow {
            beta,
            perturbation_norm: l2_norm(&psi.values, dq),
            image_diff_norm: l2_norm(&diff, dq),
            bound: std::f64::consts::SQRT_2
                * r
                * r
                * (1.0 - 2.0 * beta)
                * std::f64::consts::PI
                * 2.0_f64.powf(1.0 - 2.0 * beta),
        });
    }
    Ok(rows)
}

/// Residuals of a candidate and its global sign flip against the same
/// data: `(‖F(x)−y‖, ‖F(−x)−y‖)`.  The forward map is quadratic, so the
/// two values agree to round-off for every kernel — the sign of a
/// solution is fundamentally undetermined by the data.
pub fn sign_ambiguity_residual(
    x: &ComplexSignal,
    y: &ComplexSignal,
    kernel: &Kernel,
    grid: &SampledGrid,
) -> Result<(f64, f64)> {
    if y.len() != grid.n_output() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} samples, grid has {} output nodes",
            y.len(),
            grid.n_output()
        )));
    }
    let dq = grid.dq();
    let fx = apply_forward(kernel, x, grid)?;
    let neg = ComplexSignal::new(x.values.iter().map(|z| -z).collect());
    let fneg = apply_forward(kernel, &neg, grid)?;
    let r1: Vec<_> = fx.values.iter().zip(&y.values).map(|(a, b)| a - b).collect();
    let r2: Vec<_> = fneg.values.iter().zip(&y.values).map(|(a, b)| a - b).collect();
    Ok((l2_norm(&r1, dq), l2_norm(&r2, dq)))
}

/// Score a reconstruction against the truth over the central fraction of
/// the grid: RMSE of the amplitudes and RMSE of the group delay.  The
/// group-delay metric is invariant under a global sign flip and under any
/// constant phase offset, exactly matching the ambiguities the data
/// cannot resolve; boundaries are excluded because the measured data
/// carries far less information there.
pub fn reconstruction_error(
    x_rec: &ComplexSignal,
    x_true: &ComplexSignal,
    central_fraction: f64,
    dq: f64,
) -> Result<(f64, f64)> {
    if x_rec.len() != x_true.len() {
        return Err(Error::DimensionMismatch(format!(
            "signals have {} and {} samples",
            x_rec.len(),
            x_true.len()
        )));
    }
    if !(central_fraction > 0.0 && central_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "central fraction must lie in (0, 1], got {central_fraction}"
        )));
    }
    if !(dq > 0.0) || !dq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "node spacing must be positive, got {dq}"
        )));
    }
    let n = x_rec.len();
    let w = ((n as f64) * (1.0 - central_fraction) / 2.0).floor() as usize;
    let window = w..n - w;
    if window.is_empty() {
        return Err(Error::InvalidParameter(
            "central window is empty; signal too short".into(),
        ));
    }
    let count = (n - 2 * w) as f64;

    let amp_sq: f64 = window
        .clone()
        .map(|i| {
            let d = x_rec.values[i].norm() - x_true.values[i].norm();
            d * d
        })
        .sum();
    let gd_rec = group_delay(x_rec, dq);
    let gd_true = group_delay(x_true, dq);
    let gd_sq: f64 = window
        .map(|i| {
            let d = gd_rec[i] - gd_true[i];
            d * d
        })
        .sum();
    Ok(((amp_sq / count).sqrt(), (gd_sq / count).sqrt()))
}
