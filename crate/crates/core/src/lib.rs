//! Regularized inversion of a kernel-weighted complex autoconvolution
//! equation, as it arises in self-diffraction phase reconstruction of
//! ultrashort laser pulses.
//!
//! The library provides:
//!
//! * the discrete forward map `F(x)_m = Σ_j k(s_m, q_j) x_j x_{m−j} Δq`
//!   with its exact Fréchet derivative ([`forward`]),
//! * an iteratively regularized Levenberg–Marquardt solver with an
//!   amplitude-driven stopping rule and regularization-weight selection
//!   ([`solver`]),
//! * synthetic measurement generation on a refined grid with seeded
//!   multiplicative noise ([`synth`]),
//! * a family of power-type perturbations with a closed-form
//!   autoconvolution, demonstrating local ill-posedness and the global
//!   sign ambiguity ([`illposed`]),
//! * deterministic CSV/JSON persistence for every artifact ([`io`]).
//!
//! # Example
//!
//! ```
//! use deautoconv::{
//!     apply_forward, make_pulse, ComplexSignal, Kernel, PulseShape, PulseSpec, SampledGrid,
//! };
//!
//! let grid = SampledGrid::new(0.8, 1.0, 64, 0.75).unwrap();
//! let pulse = PulseSpec {
//!     shape: PulseShape::SmoothSinglePeak { width_frac: 0.15, phase_half_width_frac: 0.32 },
//!     amplitude_max: 1e-7,
//! };
//! let x = make_pulse(&pulse, &grid).unwrap();
//! let y = apply_forward(&Kernel::one(), &x, &grid).unwrap();
//! assert_eq!(y.len(), grid.n_output());
//! ```

pub mod error;
pub mod forward;
pub mod grid;
pub mod illposed;
pub mod io;
pub mod kernel;
pub mod signal;
pub mod smoothing;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use forward::{
    apply_forward, apply_forward_cached, forward_matrix, frechet_apply, frechet_matrix,
    frechet_matrix_cached,
};
pub use grid::SampledGrid;
pub use illposed::{
    illposedness_demo, psi_beta_autoconv_closed_form, psi_beta_samples, reconstruction_error,
    sign_ambiguity_residual, IllposedRow, PsiBetaSpec,
};
pub use kernel::{sinc, Kernel, PhysicalKernelParams};
pub use signal::{
    l2_norm, l2_norm_real, resample_linear, resample_linear_real, to_polar, unwrap_phase,
    ComplexSignal, PolarSignal,
};
pub use smoothing::SecondDiffOperator;
pub use solver::{
    denormalized_alpha, group_delay, lm_step, lm_step_cached, normalized_alpha, run_lm,
    select_alpha, turning_point, AlphaRun, IterationTrace, LMConfig, ReconstructionResult,
    RunOutcome, TraceRecord,
};
pub use synth::{
    fine_grid_for, make_pulse, simulate_measurement, MeasurementMeta, MeasurementSet, NoiseSpec,
    PulseShape, PulseSpec, NOISE_GENERATOR,
};
