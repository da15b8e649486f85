//! Complex signals, polar decomposition, resampling, and discrete norms.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A sequence of complex samples living on the nodes of some grid
/// (input side: `N` samples; output side: `2N − 1` samples).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    /// The samples, ordered along the grid.
    pub values: Vec<Complex64>,
}

impl ComplexSignal {
    /// Wrap a sample vector.
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    /// Build a signal with zero phase from non-negative (or arbitrary real)
    /// amplitudes.
    pub fn from_real(values: &[f64]) -> Self {
        Self {
            values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the signal carries no samples.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Per-sample moduli.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// Amplitude–phase representation of a [`ComplexSignal`].
///
/// The phase is stored unwrapped: consecutive entries never jump by more
/// than π, so it can be perturbed, interpolated, or differenced without
/// branch-cut artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSignal {
    /// Per-sample modulus (non-negative).
    pub amplitude: Vec<f64>,
    /// Per-sample unwrapped phase in radians.
    pub phase: Vec<f64>,
}

impl PolarSignal {
    /// Rebuild the complex signal `amplitude · exp(i·phase)`.
    pub fn recompose(&self) -> ComplexSignal {
        ComplexSignal {
            values: self
                .amplitude
                .iter()
                .zip(&self.phase)
                .map(|(&a, &p)| Complex64::from_polar(a, p))
                .collect(),
        }
    }
}

/// Decompose into modulus and unwrapped phase.
///
/// Zero samples get phase 0 (their phase is analytically undefined); all
/// phases are then unwrapped left to right by adding the 2π multiple that
/// keeps consecutive differences within (−π, π].
pub fn to_polar(x: &ComplexSignal) -> PolarSignal {
    let amplitude: Vec<f64> = x.values.iter().map(|z| z.norm()).collect();
    let mut phase: Vec<f64> = x
        .values
        .iter()
        .map(|z| if z.norm() == 0.0 { 0.0 } else { z.arg() })
        .collect();
    unwrap_phase(&mut phase);
    PolarSignal { amplitude, phase }
}

/// In-place phase unwrapping: shift each entry by a multiple of 2π so that
/// no consecutive difference exceeds π in magnitude.
pub fn unwrap_phase(phase: &mut [f64]) {
    use std::f64::consts::{PI, TAU};
    let mut offset = 0.0;
    for i in 1..phase.len() {
        let raw = phase[i] + offset;
        let mut diff = raw - phase[i - 1];
        while diff > PI {
            offset -= TAU;
            diff -= TAU;
        }
        while diff <= -PI {
            offset += TAU;
            diff += TAU;
        }
        phase[i] += offset;
    }
}

/// Discrete L² norm `(Σ |z_n|² Δq)^{1/2}` of complex samples.
///
/// The `√Δq` weight makes the value converge to the continuous L² norm
/// under grid refinement.
pub fn l2_norm(values: &[Complex64], dq: f64) -> f64 {
    (values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dq).sqrt()
}

/// Discrete L² norm of real samples.
pub fn l2_norm_real(values: &[f64], dq: f64) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() * dq).sqrt()
}

/// Piecewise-linear resampling of complex samples from one node set onto
/// another; real and imaginary parts interpolate independently.
///
/// `source_nodes` must be strictly increasing and must cover every target
/// node (no extrapolation); a slack of `1e−9·(node range)` absorbs
/// endpoint round-off between grids built from the same interval.
pub fn resample_linear(
    source_nodes: &[f64],
    values: &[Complex64],
    target_nodes: &[f64],
) -> Result<Vec<Complex64>> {
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let re_t = resample_linear_real(source_nodes, &re, target_nodes)?;
    let im_t = resample_linear_real(source_nodes, &im, target_nodes)?;
    Ok(re_t
        .into_iter()
        .zip(im_t)
        .map(|(r, i)| Complex64::new(r, i))
        .collect())
}

/// Piecewise-linear resampling of real samples (see [`resample_linear`]).
pub fn resample_linear_real(
    source_nodes: &[f64],
    values: &[f64],
    target_nodes: &[f64],
) -> Result<Vec<f64>> {
    if source_nodes.len() != values.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} source nodes vs {} values",
            source_nodes.len(),
            values.len()
        )));
    }
    if source_nodes.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 source nodes to interpolate".into(),
        ));
    }
    let lo = source_nodes[0];
    let hi = source_nodes[source_nodes.len() - 1];
    let slack = 1e-9 * (hi - lo).abs();
    let mut out = Vec::with_capacity(target_nodes.len());
    for &t in target_nodes {
        if t < lo - slack || t > hi + slack {
            return Err(Error::Extrapolation(format!(
                "target node {t} outside source range [{lo}, {hi}]"
            )));
        }
        let t = t.clamp(lo, hi);
        // partition_point gives the first node strictly greater than t.
        let k = source_nodes.partition_point(|&s| s <= t);
        let (i0, i1) = if k == 0 {
            (0, 1)
        } else if k == source_nodes.len() {
            (k - 2, k - 1)
        } else {
            (k - 1, k)
        };
        let (s0, s1) = (source_nodes[i0], source_nodes[i1]);
        let w = if s1 == s0 { 0.0 } else { (t - s0) / (s1 - s0) };
        out.push(values[i0] + w * (values[i1] - values[i0]));
    }
    Ok(out)
}
