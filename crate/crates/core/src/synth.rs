//! Synthetic ground-truth pulses, fine-grid measurement simulation with
//! anti-inverse-crime resampling, and the relative Gaussian noise model.
//!
//! The simulation pipeline samples a pulse on a *finer* grid whose nodes
//! deliberately do not contain the working nodes (except the endpoints),
//! applies the forward map there, splits the result into modulus and
//! unwrapped phase, and resamples both linearly onto the working grid.
//! Reconstructing from such data therefore never sees the discrete
//! operator that generated it — the classic inverse-crime guard.
//!
//! Noise is multiplicative-relative: every sample `v` of the amplitude
//! measurement, the data modulus, and the data phase becomes
//! `v·(1 + (δ/100)·ξ)` with `ξ` standard normal.  Draws always happen in
//! a fixed order (all amplitudes, then all moduli, then all phases), even
//! at `δ = 0`, so a seed pins the whole measurement bitwise.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::apply_forward;
use crate::grid::SampledGrid;
use crate::kernel::Kernel;
use crate::signal::{resample_linear, resample_linear_real, to_polar, ComplexSignal};

/// Algorithm identity of the noise generator, recorded in metadata so the
/// draws can be reproduced outside this crate.
pub const NOISE_GENERATOR: &str = "chacha12-ziggurat-standard-normal";

/// Ground-truth pulse families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PulseShape {
    /// Gaussian amplitude with an odd cubic phase
    /// `φ(q) = π·((q−q_mid)/(phase_half_width_frac·span))³` clipped to
    /// `[−π, π]`: the phase rises from −π to π and both `φ` and `φ'`
    /// vanish at the grid midpoint.
    SmoothSinglePeak {
        /// Gaussian standard deviation as a fraction of the grid span.
        width_frac: f64,
        /// Phase half-width as a fraction of the grid span.
        phase_half_width_frac: f64,
    },
    /// Sum of two Gaussian peaks with a sinusoidal phase
    /// `φ(q) = a·sin(2π·f·(q−q_min)/span)`.
    TwoPeakSinusoidalPhase {
        /// Peak centers sit at `q_mid ∓ center_offset_frac·span`.
        center_offset_frac: f64,
        /// Standard deviation of the first (left) peak, fraction of span.
        width1_frac: f64,
        /// Standard deviation of the second (right) peak, fraction of span.
        width2_frac: f64,
        /// Height of the second peak relative to the first.
        height_ratio: f64,
        /// Phase sinusoid amplitude `a`.
        phase_amplitude: f64,
        /// Phase sinusoid frequency `f` in cycles per span.
        phase_frequency: f64,
    },
}

/// A pulse family together with its peak amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Shape family and its parameters.
    #[serde(flatten)]
    pub shape: PulseShape,
    /// Maximum of the sampled amplitude; the profile is rescaled so the
    /// largest grid sample equals this exactly.
    #[serde(default = "default_amplitude_max")]
    pub amplitude_max: f64,
}

fn default_amplitude_max() -> f64 {
    1e-7
}

impl PulseSpec {
    /// Check positivity/finiteness of every shape parameter.
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude_max > 0.0) || !self.amplitude_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "amplitude_max must be positive and finite, got {}",
                self.amplitude_max
            )));
        }
        match &self.shape {
            PulseShape::SmoothSinglePeak {
                width_frac,
                phase_half_width_frac,
            } => {
                for (name, v) in [
                    ("width_frac", *width_frac),
                    ("phase_half_width_frac", *phase_half_width_frac),
                ] {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "{name} must be positive and finite, got {v}"
                        )));
                    }
                }
            }
            PulseShape::TwoPeakSinusoidalPhase {
                center_offset_frac,
                width1_frac,
                width2_frac,
                height_ratio,
                phase_amplitude,
                phase_frequency,
            } => {
                for (name, v) in [("width1_frac", *width1_frac), ("width2_frac", *width2_frac)] {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "{name} must be positive and finite (zero-width peaks rejected), got {v}"
                        )));
                    }
                }
                if !(*height_ratio > 0.0) || !height_ratio.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "height_ratio must be positive and finite, got {height_ratio}"
                    )));
                }
                for (name, v) in [
                    ("center_offset_frac", *center_offset_frac),
                    ("phase_amplitude", *phase_amplitude),
                    ("phase_frequency", *phase_frequency),
                ] {
                    if !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "{name} must be finite, got {v}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Relative noise level and the seed that pins the draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation of the relative perturbation, in percent.
    pub delta_percent: f64,
    /// Seed for the deterministic generator.
    pub seed: u64,
}

impl NoiseSpec {
    /// Noise level must be non-negative and finite.
    pub fn validate(&self) -> Result<()> {
        if self.delta_percent < 0.0 || !self.delta_percent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta_percent must be non-negative and finite, got {}",
                self.delta_percent
            )));
        }
        Ok(())
    }
}

/// Provenance stored next to a simulated measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementMeta {
    /// Relative noise level in percent.
    pub delta_percent: f64,
    /// Generator seed.
    pub seed: u64,
    /// The working (coarse) grid.
    pub grid: SampledGrid,
    /// Node count of the generating fine grid.
    pub fine_points: usize,
    /// Refinement ratio numerator.
    pub refine_numerator: u32,
    /// Refinement ratio denominator.
    pub refine_denominator: u32,
    /// Kernel the data was generated with.
    pub kernel: Kernel,
    /// Pulse the data was generated from, when synthetic.
    pub pulse: Option<PulseSpec>,
    /// Noise generator algorithm name (see [`NOISE_GENERATOR`]).
    pub generator: String,
}

/// A complete measurement: noisy amplitudes on the input grid, noisy
/// complex data on the output grid, optional ground truth for scoring,
/// and full provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    /// Noisy amplitude measurement `Â`, length N.
    pub a_hat: Vec<f64>,
    /// Noisy complex data `y^δ = B̂·exp(i·ψ̂)`, length 2N−1.
    pub y_delta: ComplexSignal,
    /// Noise-free truth resampled to the input grid (scoring only).
    pub ground_truth: Option<ComplexSignal>,
    /// Provenance.
    pub meta: MeasurementMeta,
}

/// Sample a pulse on the input nodes of `grid`, rescaled so the largest
/// amplitude sample equals `spec.amplitude_max` exactly.
pub fn make_pulse(spec: &PulseSpec, grid: &SampledGrid) -> Result<ComplexSignal> {
    spec.validate()?;
    let span = grid.span();
    let mid = grid.q_mid();
    let q_min = grid.q_min;
    let nodes = grid.input_nodes();

    let gauss = |q: f64, center: f64, width: f64| -> f64 {
        let t = (q - center) / width;
        (-0.5 * t * t).exp()
    };

    let (raw, phase): (Vec<f64>, Vec<f64>) = match &spec.shape {
        PulseShape::SmoothSinglePeak {
            width_frac,
            phase_half_width_frac,
        } => {
            let width = width_frac * span;
            let half = phase_half_width_frac * span;
            let raw = nodes.iter().map(|&q| gauss(q, mid, width)).collect();
            let phase = nodes
                .iter()
                .map(|&q| {
                    let t = (q - mid) / half;
                    (std::f64::consts::PI * t * t * t).clamp(-std::f64::consts::PI, std::f64::consts::PI)
                })
                .collect();
            (raw, phase)
        }
        PulseShape::TwoPeakSinusoidalPhase {
            center_offset_frac,
            width1_frac,
            width2_frac,
            height_ratio,
            phase_amplitude,
            phase_frequency,
        } => {
            let c1 = mid - center_offset_frac * span;
            let c2 = mid + center_offset_frac * span;
            let (w1, w2) = (width1_frac * span, width2_frac * span);
            let raw = nodes
                .iter()
                .map(|&q| gauss(q, c1, w1) + height_ratio * gauss(q, c2, w2))
                .collect();
            let phase = nodes
                .iter()
                .map(|&q| {
                    phase_amplitude
                        * (2.0 * std::f64::consts::PI * phase_frequency * (q - q_min) / span).sin()
                })
                .collect();
            (raw, phase)
        }
    };

    let peak = raw.iter().cloned().fold(f64::MIN, f64::max);
    if !(peak > 0.0) {
        return Err(Error::InvalidParameter(
            "pulse profile vanishes on the whole grid".into(),
        ));
    }
    let values = raw
        .iter()
        .zip(&phase)
        .map(|(&a, &p)| Complex64::from_polar(a / peak * spec.amplitude_max, p))
        .collect();
    Ok(ComplexSignal::new(values))
}

/// Build the generating fine grid for a working grid: the node count is
/// `round((N−1)·num/den) + 1` over the same interval and relabeling.
/// Ratios that would make the fine spacing an integer divisor of the
/// working spacing are rejected — the working nodes would then be a
/// subset of the fine nodes and reconstruction would commit an inverse
/// crime.
pub fn fine_grid_for(coarse: &SampledGrid, num: u32, den: u32) -> Result<SampledGrid> {
    if num == 0 || den == 0 {
        return Err(Error::InvalidParameter(
            "refinement ratio terms must be positive".into(),
        ));
    }
    if num <= den {
        return Err(Error::InvalidParameter(format!(
            "refinement ratio must exceed 1, got {num}/{den}"
        )));
    }
    let intervals = coarse.n_points - 1;
    let fine_intervals =
        ((intervals as f64) * (num as f64) / (den as f64)).round() as usize;
    if fine_intervals % intervals == 0 {
        return Err(Error::InvalidParameter(format!(
            "refinement {num}/{den} makes one grid an integer multiple of the other \
             (stride {}); pick a ratio whose rounded interval count is not divisible by {}",
            fine_intervals / intervals,
            intervals
        )));
    }
    SampledGrid::new(coarse.q_min, coarse.q_max, fine_intervals + 1, coarse.q_cw)
}

/// Simulate a measurement of `pulse` through `kernel`: forward data on
/// the fine grid, modulus/phase resampling onto `grid`, then relative
/// Gaussian noise per `noise`.
pub fn simulate_measurement(
    pulse: &PulseSpec,
    kernel: &Kernel,
    refine: (u32, u32),
    grid: &SampledGrid,
    noise: &NoiseSpec,
) -> Result<MeasurementSet> {
    pulse.validate()?;
    kernel.validate()?;
    noise.validate()?;
    let fine = fine_grid_for(grid, refine.0, refine.1)?;

    let x_fine = make_pulse(pulse, &fine)?;
    let y_fine = apply_forward(kernel, &x_fine, &fine)?;
    let polar = to_polar(&y_fine);

    let fine_s = fine.output_nodes();
    let coarse_s = grid.output_nodes();
    let mut b = resample_linear_real(&fine_s, &polar.amplitude, &coarse_s)?;
    let mut psi = resample_linear_real(&fine_s, &polar.phase, &coarse_s)?;

    let fine_q = fine.input_nodes();
    let coarse_q = grid.input_nodes();
    let mut a_hat = resample_linear_real(&fine_q, &x_fine.amplitudes(), &coarse_q)?;
    let ground_truth = resample_linear(&fine_q, &x_fine.values, &coarse_q)?;

    // Fixed draw order: all amplitudes, then all moduli, then all phases.
    // Draws happen even at δ=0 so the consumed stream never depends on δ.
    let mut rng = ChaCha12Rng::seed_from_u64(noise.seed);
    let rel = noise.delta_percent / 100.0;
    let perturb = |vs: &mut [f64], rng: &mut ChaCha12Rng| {
        for v in vs {
            let xi: f64 = rng.sample(StandardNormal);
            *v *= 1.0 + rel * xi;
        }
    };
    perturb(&mut a_hat, &mut rng);
    perturb(&mut b, &mut rng);
    perturb(&mut psi, &mut rng);

    let y_delta = ComplexSignal::new(
        b.iter()
            .zip(&psi)
            .map(|(&bb, &pp)| Complex64::from_polar(bb, pp))
            .collect(),
    );

    Ok(MeasurementSet {
        a_hat,
        y_delta,
        ground_truth: Some(ComplexSignal::new(ground_truth)),
        meta: MeasurementMeta {
            delta_percent: noise.delta_percent,
            seed: noise.seed,
            grid: grid.clone(),
            fine_points: fine.n_points,
            refine_numerator: refine.0,
            refine_denominator: refine.1,
            kernel: kernel.clone(),
            pulse: Some(pulse.clone()),
            generator: NOISE_GENERATOR.to_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth_spec() -> PulseSpec {
        PulseSpec {
            shape: PulseShape::SmoothSinglePeak {
                width_frac: 0.15,
                phase_half_width_frac: 0.32,
            },
            amplitude_max: 1e-7,
        }
    }

    fn two_peak_spec() -> PulseSpec {
        PulseSpec {
            shape: PulseShape::TwoPeakSinusoidalPhase {
                center_offset_frac: 0.16,
                width1_frac: 0.10,
                width2_frac: 0.08,
                height_ratio: 0.85,
                phase_amplitude: 1.0,
                phase_frequency: 1.0,
            },
            amplitude_max: 1e-7,
        }
    }

    #[test]
    fn fine_grid_matches_rounded_ratio_and_guards_inverse_crime() {
        let coarse = SampledGrid::new(0.0, 1.0, 128, 0.0).unwrap();
        let fine = fine_grid_for(&coarse, 7, 3).unwrap();
        assert_eq!(fine.n_points, 297);
        assert_eq!(fine.q_min, 0.0);
        assert_eq!(fine.q_max, 1.0);
        // Integer multiples are exactly the inverse crime.
        assert!(fine_grid_for(&coarse, 2, 1).is_err());
        assert!(fine_grid_for(&coarse, 3, 1).is_err());
        // Not a refinement at all.
        assert!(fine_grid_for(&coarse, 1, 1).is_err());
        assert!(fine_grid_for(&coarse, 3, 7).is_err());
        assert!(fine_grid_for(&coarse, 0, 3).is_err());
    }

    #[test]
    fn default_refinement_shares_only_the_endpoints() {
        let coarse = SampledGrid::new(0.0, 1.0, 128, 0.0).unwrap();
        let fine = fine_grid_for(&coarse, 7, 3).unwrap();
        let cq = coarse.input_nodes();
        let fq = fine.input_nodes();
        let shared = cq
            .iter()
            .filter(|&&c| fq.iter().any(|&f| (c - f).abs() < 1e-12))
            .count();
        assert_eq!(shared, 2);
    }

    #[test]
    fn smooth_peak_amplitude_hits_max_exactly() {
        let grid = SampledGrid::new(0.0, 1.0, 129, 0.0).unwrap();
        let x = make_pulse(&smooth_spec(), &grid).unwrap();
        let max = x.amplitudes().into_iter().fold(f64::MIN, f64::max);
        assert_eq!(max, 1e-7);
    }

    #[test]
    fn smooth_peak_phase_rises_minus_pi_to_pi_vanishing_at_midpoint() {
        // 129 nodes put a node exactly at the midpoint.
        let grid = SampledGrid::new(0.0, 1.0, 129, 0.0).unwrap();
        let x = make_pulse(&smooth_spec(), &grid).unwrap();
        let polar = to_polar(&x);
        let mid = 64;
        assert_eq!(polar.phase[mid], 0.0);
        // Centered difference of the odd cubic vanishes to O(dq^2).
        let fd = (polar.phase[mid + 1] - polar.phase[mid - 1]) / (2.0 * grid.dq());
        assert!(fd.abs() < 1e-2, "midpoint phase slope {fd}");
        assert!((polar.phase[0] + std::f64::consts::PI).abs() < 1e-12);
        assert!((polar.phase[128] - std::f64::consts::PI).abs() < 1e-12);
        for w in polar.phase.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "phase must be non-decreasing");
        }
    }

    #[test]
    fn two_peak_profile_has_two_interior_maxima() {
        let grid = SampledGrid::new(0.0, 1.0, 128, 0.0).unwrap();
        let x = make_pulse(&two_peak_spec(), &grid).unwrap();
        let a = x.amplitudes();
        let peaks = (1..a.len() - 1)
            .filter(|&i| a[i] > a[i - 1] && a[i] > a[i + 1])
            .count();
        assert_eq!(peaks, 2);
        let max = a.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, 1e-7);
    }

    #[test]
    fn zero_phase_amplitude_gives_real_pulse() {
        let grid = SampledGrid::new(0.0, 1.0, 64, 0.0).unwrap();
        let mut spec = two_peak_spec();
        if let PulseShape::TwoPeakSinusoidalPhase {
            ref mut phase_amplitude,
            ..
        } = spec.shape
        {
            *phase_amplitude = 0.0;
        }
        let x = make_pulse(&spec, &grid).unwrap();
        for z in &x.values {
            assert_eq!(z.im, 0.0);
            assert!(z.re >= 0.0);
        }
    }

    #[test]
    fn rejects_zero_width_peaks() {
        let mut spec = smooth_spec();
        if let PulseShape::SmoothSinglePeak { ref mut width_frac, .. } = spec.shape {
            *width_frac = 0.0;
        }
        assert!(spec.validate().is_err());
        let mut spec = two_peak_spec();
        if let PulseShape::TwoPeakSinusoidalPhase { ref mut width2_frac, .. } = spec.shape {
            *width2_frac = 0.0;
        }
        assert!(spec.validate().is_err());
        let mut spec = smooth_spec();
        spec.amplitude_max = 0.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn same_seed_reproduces_bitwise_different_seed_does_not() {
        let grid = SampledGrid::new(0.0, 1.0, 48, 0.0).unwrap();
        let noise = NoiseSpec { delta_percent: 5.0, seed: 42 };
        let m1 = simulate_measurement(&smooth_spec(), &Kernel::one(), (7, 3), &grid, &noise).unwrap();
        let m2 = simulate_measurement(&smooth_spec(), &Kernel::one(), (7, 3), &grid, &noise).unwrap();
        assert_eq!(m1, m2);
        let m3 = simulate_measurement(
            &smooth_spec(),
            &Kernel::one(),
            (7, 3),
            &grid,
            &NoiseSpec { delta_percent: 5.0, seed: 43 },
        )
        .unwrap();
        assert_ne!(m1.a_hat, m3.a_hat);
        assert_ne!(m1.y_delta, m3.y_delta);
    }

    #[test]
    fn zero_noise_is_seed_independent_and_matches_resampled_truth() {
        let grid = SampledGrid::new(0.0, 1.0, 48, 0.0).unwrap();
        let m1 = simulate_measurement(
            &smooth_spec(),
            &Kernel::one(),
            (7, 3),
            &grid,
            &NoiseSpec { delta_percent: 0.0, seed: 1 },
        )
        .unwrap();
        let m2 = simulate_measurement(
            &smooth_spec(),
            &Kernel::one(),
            (7, 3),
            &grid,
            &NoiseSpec { delta_percent: 0.0, seed: 999 },
        )
        .unwrap();
        assert_eq!(m1.a_hat, m2.a_hat);
        assert_eq!(m1.y_delta, m2.y_delta);

        // At δ=0 the amplitude measurement is exactly the resampled
        // modulus of the fine-grid pulse.
        let fine = fine_grid_for(&grid, 7, 3).unwrap();
        let x_fine = make_pulse(&smooth_spec(), &fine).unwrap();
        let expected = resample_linear_real(
            &fine.input_nodes(),
            &x_fine.amplitudes(),
            &grid.input_nodes(),
        )
        .unwrap();
        assert_eq!(m1.a_hat, expected);
    }

    #[test]
    fn noise_ratios_have_the_requested_spread() {
        let grid = SampledGrid::new(0.0, 1.0, 128, 0.0).unwrap();
        let clean = simulate_measurement(
            &smooth_spec(),
            &Kernel::one(),
            (7, 3),
            &grid,
            &NoiseSpec { delta_percent: 0.0, seed: 7 },
        )
        .unwrap();
        let noisy = simulate_measurement(
            &smooth_spec(),
            &Kernel::one(),
            (7, 3),
            &grid,
            &NoiseSpec { delta_percent: 5.0, seed: 7 },
        )
        .unwrap();
        let mut ratios = Vec::new();
        let mut push_ratios = |noisy_vals: &[f64], clean_vals: &[f64]| {
            let scale = clean_vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for (n, c) in noisy_vals.iter().zip(clean_vals) {
                if c.abs() > 1e-9 * scale {
                    ratios.push(n / c - 1.0);
                }
            }
        };
        let clean_polar = to_polar(&clean.y_delta);
        let noisy_polar = to_polar(&noisy.y_delta);
        push_ratios(&noisy.a_hat, &clean.a_hat);
        push_ratios(&noisy_polar.amplitude, &clean_polar.amplitude);
        push_ratios(&noisy_polar.phase, &clean_polar.phase);
        assert!(ratios.len() > 400, "expected a large pooled sample");
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var =
            ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / ratios.len() as f64;
        let std = var.sqrt();
        assert!(
            (0.04..=0.06).contains(&std),
            "pooled relative std {std} outside [0.04, 0.06]"
        );
        assert!(mean.abs() < 0.01, "pooled relative mean {mean} should be near zero");
    }

    #[test]
    fn measurement_dimensions_and_meta() {
        let grid = SampledGrid::new(0.8, 1.0, 40, 0.75).unwrap();
        let m = simulate_measurement(
            &two_peak_spec(),
            &Kernel::one(),
            (7, 3),
            &grid,
            &NoiseSpec { delta_percent: 2.0, seed: 5 },
        )
        .unwrap();
        assert_eq!(m.a_hat.len(), 40);
        assert_eq!(m.y_delta.len(), 79);
        assert_eq!(m.ground_truth.as_ref().unwrap().len(), 40);
        assert_eq!(m.meta.fine_points, 92);
        assert_eq!(m.meta.generator, NOISE_GENERATOR);
        assert_eq!(m.meta.grid, grid);
        assert_eq!(m.meta.delta_percent, 2.0);
        assert_eq!(m.meta.seed, 5);
    }

    #[test]
    fn pulse_spec_serde_round_trip_uses_shape_tag() {
        let spec = smooth_spec();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"shape\":\"smooth_single_peak\""), "{json}");
        assert!(json.contains("\"phase_half_width_frac\":0.32"), "{json}");
        let back: PulseSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let spec2 = two_peak_spec();
        let json2 = serde_json::to_string(&spec2).unwrap();
        assert!(json2.contains("\"shape\":\"two_peak_sinusoidal_phase\""), "{json2}");
        let back2: PulseSpec = serde_json::from_str(&json2).unwrap();
        assert_eq!(back2, spec2);
    }
}
