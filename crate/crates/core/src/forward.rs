//! The discretized kernel-weighted autoconvolution operator, its matrix
//! form, and its Fréchet derivative.
//!
//! With `N` input nodes and spacing `Δq`, the forward map sends
//! `x = (x_0, …, x_{N−1})` to the `2N − 1` values
//!
//! ```text
//! y_m = Σ_j k(S_m, q_j) · x_j · x_{m−j} · Δq,      S_m := 2·q_min + m·Δq,
//! ```
//!
//! where the sum runs over every `j` with both `0 ≤ j ≤ N−1` and
//! `0 ≤ m−j ≤ N−1` (the signal is zero outside its interval, and the
//! reflected argument `S_m − q_j` always lands exactly on input node
//! `m − j`, so indices are computed with integer arithmetic—never by
//! floating-point node lookup).  The rectangular quadrature rule is used
//! throughout, which keeps the operator exactly quadratic in `x` and lets
//! oracle tests demand round-off-level agreement.
//!
//! Row computations are independent; long grids are processed in parallel
//! with a fixed per-row summation order, so results are bitwise identical
//! regardless of thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::SampledGrid;
use crate::kernel::Kernel;
use crate::signal::ComplexSignal;

/// Rows below this output length are computed serially; the crossover where
/// rayon's overhead pays for itself (results are identical either way).
const PAR_THRESHOLD: usize = 1024;

fn check_input_len(x: &ComplexSignal, grid: &SampledGrid, what: &str) -> Result<()> {
    if x.len() != grid.n_input() {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} samples but the grid has {} input nodes",
            x.len(),
            grid.n_input()
        )));
    }
    Ok(())
}

/// Inclusive index band of the convolution sum for output row `m`:
/// all `j` with `0 ≤ j ≤ N−1` and `0 ≤ m−j ≤ N−1`.
#[inline]
fn band(m: usize, n: usize) -> std::ops::RangeInclusive<usize> {
    let lo = m.saturating_sub(n - 1);
    let hi = m.min(n - 1);
    lo..=hi
}

/// Apply the forward operator using a precomputed kernel matrix
/// (`kmat[(m, j)] = k(S_m, q_j)`).
pub fn apply_forward_cached(
    kmat: &DMatrix<Complex64>,
    x: &ComplexSignal,
    grid: &SampledGrid,
) -> Result<ComplexSignal> {
    check_input_len(x, grid, "input signal")?;
    let n = grid.n_input();
    let dq = grid.dq();
    let row = |m: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in band(m, n) {
            acc += kmat[(m, j)] * x.values[j] * x.values[m - j];
        }
        acc * dq
    };
    let values = if grid.n_output() >= PAR_THRESHOLD {
        (0..grid.n_output()).into_par_iter().map(row).collect()
    } else {
        (0..grid.n_output()).map(row).collect()
    };
    Ok(ComplexSignal::new(values))
}

/// Apply the forward operator `y_m = Σ_j k(S_m, q_j)·x_j·x_{m−j}·Δq`.
pub fn apply_forward(kernel: &Kernel, x: &ComplexSignal, grid: &SampledGrid) -> Result<ComplexSignal> {
    apply_forward_cached(&kernel.matrix(grid), x, grid)
}

/// The `(2N−1) × N` matrix `F(x)` with entry `(m, n)` equal to
/// `k(S_m, q_n)·x_{m−n}·Δq` inside the band and 0 outside; its product with
/// `x` reproduces [`apply_forward`] entry by entry.
pub fn forward_matrix(kernel: &Kernel, x: &ComplexSignal, grid: &SampledGrid) -> Result<DMatrix<Complex64>> {
    check_input_len(x, grid, "input signal")?;
    let kmat = kernel.matrix(grid);
    let n = grid.n_input();
    let dq = grid.dq();
    let mut out = DMatrix::zeros(grid.n_output(), n);
    for m in 0..grid.n_output() {
        for j in band(m, n) {
            out[(m, j)] = kmat[(m, j)] * x.values[m - j] * dq;
        }
    }
    Ok(out)
}

/// Apply the Fréchet derivative of the forward map at `x0` to `h`:
///
/// ```text
/// [F'(x0) h]_m = Σ_j (k(S_m, q_j) + k(S_m, S_m − q_j)) · x0_{m−j} · h_j · Δq,
/// ```
///
/// with the same band convention as the forward map (the second kernel
/// argument `S_m − q_j` is input node `m − j`, inside the interval exactly
/// when the band admits `j`).
pub fn frechet_apply(
    kernel: &Kernel,
    x0: &ComplexSignal,
    h: &ComplexSignal,
    grid: &SampledGrid,
) -> Result<ComplexSignal> {
    check_input_len(x0, grid, "linearization point")?;
    check_input_len(h, grid, "direction")?;
    let kmat = kernel.matrix(grid);
    let n = grid.n_input();
    let dq = grid.dq();
    let values = (0..grid.n_output())
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in band(m, n) {
                acc += (kmat[(m, j)] + kmat[(m, m - j)]) * x0.values[m - j] * h.values[j];
            }
            acc * dq
        })
        .collect();
    Ok(ComplexSignal::new(values))
}

/// Derivative matrix built from a precomputed kernel matrix; entry `(m, j)`
/// is `(k(S_m, q_j) + k(S_m, S_m − q_j))·x0_{m−j}·Δq`.
pub fn frechet_matrix_cached(
    kmat: &DMatrix<Complex64>,
    x0: &ComplexSignal,
    grid: &SampledGrid,
) -> Result<DMatrix<Complex64>> {
    check_input_len(x0, grid, "linearization point")?;
    let n = grid.n_input();
    let dq = grid.dq();
    let mut out = DMatrix::zeros(grid.n_output(), n);
    for m in 0..grid.n_output() {
        for j in band(m, n) {
            out[(m, j)] = (kmat[(m, j)] + kmat[(m, m - j)]) * x0.values[m - j] * dq;
        }
    }
    Ok(out)
}

/// The `(2N−1) × N` Fréchet derivative matrix at `x0`; its product with a
/// direction `h` equals [`frechet_apply`], and its conjugate transpose
/// realizes the adjoint action needed by the normal equations.
pub fn frechet_matrix(kernel: &Kernel, x0: &ComplexSignal, grid: &SampledGrid) -> Result<DMatrix<Complex64>> {
    frechet_matrix_cached(&kernel.matrix(grid), x0, grid)
}
