//! Equidistant sampling grids.
//!
//! A [`SampledGrid`] carries the input interval `[q_min, q_max]` sampled at
//! `N` equidistant nodes together with the derived output axis of length
//! `2N − 1`.  The output axis hosts autoconvolution results: convolving two
//! signals supported on `[q_min, q_max]` produces data on
//! `[2·q_min, 2·q_max]`, and the optional carrier offset `q_cw` shifts the
//! reported output coordinates to `s = 2·q_min − q_cw + m·Δq`.
//!
//! The two node families share the same spacing `Δq`, which is what makes
//! exact index arithmetic possible downstream: `s_m + q_cw − q_j` always
//! coincides with the input node of index `m − j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An equidistant input grid plus its derived autoconvolution output axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGrid {
    /// Lower end of the input interval.
    pub q_min: f64,
    /// Upper end of the input interval.
    pub q_max: f64,
    /// Number of input nodes `N` (the output axis has `2N − 1`).
    pub n_points: usize,
    /// Carrier offset subtracted from the output coordinates.
    pub q_cw: f64,
}

impl SampledGrid {
    /// Build a grid after validating `q_max > q_min` and `N ≥ 2`.
    pub fn new(q_min: f64, q_max: f64, n_points: usize, q_cw: f64) -> Result<Self> {
        if !(q_min.is_finite() && q_max.is_finite() && q_cw.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if q_max <= q_min {
            return Err(Error::InvalidGrid(format!(
                "q_max ({q_max}) must exceed q_min ({q_min})"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes, got {n_points}"
            )));
        }
        Ok(Self {
            q_min,
            q_max,
            n_points,
            q_cw,
        })
    }

    /// Node spacing `Δq = (q_max − q_min) / (N − 1)`.
    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    /// Number of input nodes `N`.
    pub fn n_input(&self) -> usize {
        self.n_points
    }

    /// Number of output nodes `2N − 1`.
    pub fn n_output(&self) -> usize {
        2 * self.n_points - 1
    }

    /// Width of the input interval.
    pub fn span(&self) -> f64 {
        self.q_max - self.q_min
    }

    /// Midpoint of the input interval.
    pub fn q_mid(&self) -> f64 {
        0.5 * (self.q_min + self.q_max)
    }

    /// Input node `q_i = q_min + i·Δq` (0-based); the last node is forced to
    /// `q_max` exactly so accumulated round-off cannot shrink the interval.
    pub fn input_node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n_input());
        if i == self.n_points - 1 {
            self.q_max
        } else {
            self.q_min + i as f64 * self.dq()
        }
    }

    /// Output node `s_m = 2·q_min − q_cw + m·Δq` (0-based); the last node is
    /// forced to `2·q_max − q_cw` exactly.
    pub fn output_node(&self, m: usize) -> f64 {
        debug_assert!(m < self.n_output());
        if m == self.n_output() - 1 {
            2.0 * self.q_max - self.q_cw
        } else {
            2.0 * self.q_min - self.q_cw + m as f64 * self.dq()
        }
    }

    /// All input nodes in order.
    pub fn input_nodes(&self) -> Vec<f64> {
        (0..self.n_input()).map(|i| self.input_node(i)).collect()
    }

    /// All output nodes in order.
    pub fn output_nodes(&self) -> Vec<f64> {
        (0..self.n_output()).map(|m| self.output_node(m)).collect()
    }
}
