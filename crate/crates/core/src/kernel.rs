//! Complex kernel models `k(s, q)` weighting the autoconvolution integrand.
//!
//! Two variants are provided: a constant kernel (the abstract setting, with
//! `k ≡ 1` as the most common choice) and a parameterized physical-style
//! kernel whose modulus carries a sinc-shaped phase-mismatch envelope and
//! whose argument is a constant transverse phase.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SampledGrid;

/// Parameters of the physical-style kernel.
///
/// The model is
/// `k(s, q) = magnitude_scale · chi3 · (1 + carrier_weight·s) ·
///  exp(i·transverse_phase) · sinc(mismatch_quadratic·(q − s/2)²·L/2)`,
/// a quadratic phase mismatch centered at perfect matching `q = s/2`.
/// All unmodeled physical prefactors are absorbed into `magnitude_scale`
/// and `carrier_weight`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalKernelParams {
    /// Overall magnitude target for the kernel peak (must be > 0).
    pub magnitude_scale: f64,
    /// Real part of the complex susceptibility factor.
    pub chi3_re: f64,
    /// Imaginary part of the complex susceptibility factor.
    pub chi3_im: f64,
    /// Quadratic coefficient of the phase-mismatch model.
    pub mismatch_quadratic: f64,
    /// Interaction length `L` (must be > 0).
    pub interaction_length: f64,
    /// Linear-in-`s` amplitude weight.
    pub carrier_weight: f64,
    /// Constant phase offset contributed by the transverse geometry.
    pub transverse_phase: f64,
}

impl PhysicalKernelParams {
    /// The complex susceptibility factor.
    pub fn chi3(&self) -> Complex64 {
        Complex64::new(self.chi3_re, self.chi3_im)
    }

    /// Validate positivity constraints.
    pub fn validate(&self) -> Result<()> {
        if !(self.magnitude_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "magnitude_scale must be > 0, got {}",
                self.magnitude_scale
            )));
        }
        if !(self.interaction_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "interaction_length must be > 0, got {}",
                self.interaction_length
            )));
        }
        Ok(())
    }
}

/// An evaluable complex kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Kernel {
    /// `k(s, q) = c` for every `(s, q)`.
    Constant {
        /// Real part of the constant.
        re: f64,
        /// Imaginary part of the constant.
        im: f64,
    },
    /// The parameterized physical-style model.
    Physical(PhysicalKernelParams),
}

impl Kernel {
    /// The constant kernel `k ≡ c`.
    pub fn constant(c: Complex64) -> Self {
        Kernel::Constant { re: c.re, im: c.im }
    }

    /// The constant kernel `k ≡ 1`.
    pub fn one() -> Self {
        Kernel::constant(Complex64::new(1.0, 0.0))
    }

    /// Validate parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::Constant { .. } => Ok(()),
            Kernel::Physical(p) => p.validate(),
        }
    }

    /// The scale used by the normalized regularization weight: the
    /// magnitude scale of the physical variant, or `|c|` for a constant
    /// kernel.
    pub fn scale(&self) -> f64 {
        match self {
            Kernel::Constant { re, im } => Complex64::new(*re, *im).norm(),
            Kernel::Physical(p) => p.magnitude_scale,
        }
    }

    /// Evaluate `k(s, q)`.
    pub fn eval(&self, s: f64, q: f64) -> Complex64 {
        match self {
            Kernel::Constant { re, im } => Complex64::new(*re, *im),
            Kernel::Physical(p) => {
                let d = q - 0.5 * s;
                let mismatch = p.mismatch_quadratic * d * d;
                let envelope = sinc(mismatch * p.interaction_length * 0.5);
                let magnitude = p.magnitude_scale * (1.0 + p.carrier_weight * s) * envelope;
                p.chi3() * Complex64::from_polar(1.0, p.transverse_phase) * magnitude
            }
        }
    }

    /// The kernel sampled on a grid: entry `(m, n)` is
    /// `eval(s_m + q_cw, q_n)`, i.e. the kernel sees the physical output
    /// frequency `2·q_min + m·Δq` regardless of the carrier offset used for
    /// reporting output coordinates.
    pub fn matrix(&self, grid: &SampledGrid) -> DMatrix<Complex64> {
        let rows = grid.n_output();
        let cols = grid.n_input();
        DMatrix::from_fn(rows, cols, |m, n| {
            self.eval(grid.output_node(m) + grid.q_cw, grid.input_node(n))
        })
    }
}

/// `sin(t)/t` with the removable singularity filled in: `sinc(0) = 1`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        // Two-term Taylor expansion; exact to f64 precision in this range.
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_params() -> PhysicalKernelParams {
        PhysicalKernelParams {
            magnitude_scale: 1e28,
            chi3_re: 3e14,
            chi3_im: 4e14,
            mismatch_quadratic: 40.0,
            interaction_length: 1.0,
            carrier_weight: 0.1,
            transverse_phase: 0.4,
        }
    }

    #[test]
    fn constant_kernel_everywhere() {
        let k = Kernel::one();
        for &(s, q) in &[(0.0, 0.0), (1.3, 0.2), (2.0, 1.0)] {
            assert_eq!(k.eval(s, q), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn disabled_modulations_leave_pure_scale() {
        let k = Kernel::Physical(PhysicalKernelParams {
            magnitude_scale: 1e28,
            chi3_re: 1.0,
            chi3_im: 0.0,
            mismatch_quadratic: 0.0,
            interaction_length: 1.0,
            carrier_weight: 0.0,
            transverse_phase: 0.0,
        });
        for &(s, q) in &[(0.0, 0.0), (0.7, 0.9), (2.0, 0.1)] {
            let v = k.eval(s, q);
            assert!((v - Complex64::new(1e28, 0.0)).norm() <= 1e-12 * 1e28);
        }
    }

    #[test]
    fn phase_matched_point_attains_maximum() {
        let k = Kernel::Physical(sample_params());
        let p = sample_params();
        for &s in &[0.0, 0.4, 1.1, 2.0] {
            let matched = k.eval(s, 0.5 * s).norm();
            let expected = p.magnitude_scale * p.chi3().norm() * (1.0 + p.carrier_weight * s);
            assert!((matched - expected).abs() <= 1e-12 * expected);
            // Nearby points cannot exceed the matched modulus.
            for &dq in &[1e-3, 0.05, 0.2] {
                assert!(k.eval(s, 0.5 * s + dq).norm() <= matched + 1e-9 * matched);
            }
        }
    }

    #[test]
    fn matrix_of_constant_kernel_is_constant() {
        let g = SampledGrid::new(0.0, 1.0, 3, 0.0).unwrap();
        let m = Kernel::constant(Complex64::new(0.0, 2.0)).matrix(&g);
        assert_eq!(m.nrows(), 5);
        assert_eq!(m.ncols(), 3);
        for v in m.iter() {
            assert_eq!(*v, Complex64::new(0.0, 2.0));
        }
    }

    #[test]
    fn matrix_max_matches_grid_search() {
        let g = SampledGrid::new(0.0, 1.0, 64, 0.0).unwrap();
        let k = Kernel::Physical(sample_params());
        let m = k.matrix(&g);
        let max_entry = m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        let mut brute = 0.0_f64;
        for mm in 0..g.n_output() {
            for nn in 0..g.n_input() {
                brute = brute.max(k.eval(g.output_node(mm) + g.q_cw, g.input_node(nn)).norm());
            }
        }
        assert!((max_entry - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn eval_is_continuous_in_q() {
        let k = Kernel::Physical(sample_params());
        let mut h = 1e-3;
        let (s, q) = (0.9, 0.37);
        let mut last = (k.eval(s, q + h) - k.eval(s, q)).norm();
        for _ in 0..6 {
            h *= 0.5;
            let cur = (k.eval(s, q + h) - k.eval(s, q)).norm();
            assert!(cur <= last + 1e-20);
            last = cur;
        }
    }

    #[test]
    fn sinc_near_zero_is_smooth() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(1e-9) - 1.0).abs() < 1e-17);
        assert!((sinc(0.5) - 0.5_f64.sin() / 0.5).abs() < 1e-16);
    }

    #[test]
    fn serde_round_trip_uses_exact_keys() {
        let k = Kernel::Physical(sample_params());
        let json = serde_json::to_string(&k).unwrap();
        for key in [
            "magnitude_scale",
            "chi3_re",
            "chi3_im",
            "mismatch_quadratic",
            "interaction_length",
            "carrier_weight",
            "transverse_phase",
        ] {
            assert!(json.contains(key), "missing key {key} in {json}");
        }
        let back: Kernel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
    }
}
