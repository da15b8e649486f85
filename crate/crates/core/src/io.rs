//! CSV and JSON persistence: signals, iteration traces, ill-posedness
//! tables, measurement directories, and a debug matrix dump.
//!
//! All numeric cells are written with Rust's shortest round-trip float
//! formatting, so a written file parses back to bitwise-identical values
//! and repeated runs with the same inputs produce byte-identical files.
//! CSV files carry a header row, use `.` as the decimal point, UTF-8,
//! and LF line endings.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::ComplexSignal;
use crate::solver::{IterationTrace, TraceRecord};
use crate::synth::{MeasurementMeta, MeasurementSet};

/// File name of the amplitude measurement inside a measurement directory.
pub const A_HAT_FILE: &str = "a_hat.csv";
/// File name of the complex data inside a measurement directory.
pub const Y_DELTA_FILE: &str = "y_delta.csv";
/// File name of the optional ground truth inside a measurement directory.
pub const TRUTH_FILE: &str = "truth.csv";
/// File name of the provenance record inside a measurement directory.
pub const META_FILE: &str = "meta.json";

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

fn parse_field(record: &csv::StringRecord, idx: usize, line: u64, name: &str) -> Result<f64> {
    let raw = record.get(idx).ok_or_else(|| {
        Error::Csv(format!("line {line}: missing column {name} (index {idx})"))
    })?;
    raw.trim()
        .parse::<f64>()
        .map_err(|e| Error::Csv(format!("line {line}: column {name}: {e}")))
}

/// Write a complex signal as `node,re,im,amplitude,phase` rows; the phase
/// column is unwrapped.
pub fn write_signal_csv(path: &Path, nodes: &[f64], x: &ComplexSignal) -> Result<()> {
    if nodes.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} nodes vs {} samples",
            nodes.len(),
            x.len()
        )));
    }
    let polar = crate::signal::to_polar(x);
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["node", "re", "im", "amplitude", "phase"]).map_err(csv_err)?;
    for i in 0..nodes.len() {
        w.write_record([
            nodes[i].to_string(),
            x.values[i].re.to_string(),
            x.values[i].im.to_string(),
            polar.amplitude[i].to_string(),
            polar.phase[i].to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a signal written by [`write_signal_csv`]; values are rebuilt from
/// the `re`/`im` columns.
pub fn read_signal_csv(path: &Path) -> Result<(Vec<f64>, ComplexSignal)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i as u64 + 2;
        nodes.push(parse_field(&rec, 0, line, "node")?);
        let re = parse_field(&rec, 1, line, "re")?;
        let im = parse_field(&rec, 2, line, "im")?;
        values.push(Complex64::new(re, im));
    }
    if values.is_empty() {
        return Err(Error::Csv(format!("{}: no data rows", path.display())));
    }
    Ok((nodes, ComplexSignal::new(values)))
}

/// Write a real amplitude sequence as `node,amplitude` rows.
pub fn write_amplitude_csv(path: &Path, nodes: &[f64], amplitudes: &[f64]) -> Result<()> {
    if nodes.len() != amplitudes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} nodes vs {} amplitudes",
            nodes.len(),
            amplitudes.len()
        )));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["node", "amplitude"]).map_err(csv_err)?;
    for (n, a) in nodes.iter().zip(amplitudes) {
        w.write_record([n.to_string(), a.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Read an amplitude sequence written by [`write_amplitude_csv`].
pub fn read_amplitude_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut nodes = Vec::new();
    let mut amplitudes = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i as u64 + 2;
        nodes.push(parse_field(&rec, 0, line, "node")?);
        amplitudes.push(parse_field(&rec, 1, line, "amplitude")?);
    }
    if amplitudes.is_empty() {
        return Err(Error::Csv(format!("{}: no data rows", path.display())));
    }
    Ok((nodes, amplitudes))
}

/// Write a reconstruction as
/// `node,re,im,amplitude,phase,group_delay` rows.
pub fn write_reconstruction_csv(
    path: &Path,
    nodes: &[f64],
    x: &ComplexSignal,
    group_delay: &[f64],
) -> Result<()> {
    if nodes.len() != x.len() || group_delay.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} nodes, {} samples, {} group-delay entries",
            nodes.len(),
            x.len(),
            group_delay.len()
        )));
    }
    let polar = crate::signal::to_polar(x);
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["node", "re", "im", "amplitude", "phase", "group_delay"])
        .map_err(csv_err)?;
    for i in 0..nodes.len() {
        w.write_record([
            nodes[i].to_string(),
            x.values[i].re.to_string(),
            x.values[i].im.to_string(),
            polar.amplitude[i].to_string(),
            polar.phase[i].to_string(),
            group_delay[i].to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Write an iteration trace with the canonical
/// `iteration,residual,smoothness,amplitude_deviation` header.
pub fn write_trace_csv(path: &Path, trace: &IterationTrace) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["iteration", "residual", "smoothness", "amplitude_deviation"])
        .map_err(csv_err)?;
    for rec in &trace.records {
        w.write_record([
            rec.iteration.to_string(),
            rec.residual.to_string(),
            rec.smoothness.to_string(),
            rec.amplitude_deviation.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a trace written by [`write_trace_csv`] (or any table with those
/// four columns in order).
pub fn read_trace_csv(path: &Path) -> Result<IterationTrace> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut records = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i as u64 + 2;
        let iteration = parse_field(&rec, 0, line, "iteration")? as usize;
        records.push(TraceRecord {
            iteration,
            residual: parse_field(&rec, 1, line, "residual")?,
            smoothness: parse_field(&rec, 2, line, "smoothness")?,
            amplitude_deviation: parse_field(&rec, 3, line, "amplitude_deviation")?,
        });
    }
    if records.is_empty() {
        return Err(Error::Csv(format!("{}: no data rows", path.display())));
    }
    Ok(IterationTrace { records })
}

/// Write an ill-posedness table with the
/// `beta,perturbation_norm,image_diff_norm,bound` header.
pub fn write_illposed_csv(path: &Path, rows: &[crate::illposed::IllposedRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["beta", "perturbation_norm", "image_diff_norm", "bound"])
        .map_err(csv_err)?;
    for row in rows {
        w.write_record([
            row.beta.to_string(),
            row.perturbation_norm.to_string(),
            row.image_diff_norm.to_string(),
            row.bound.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Render a complex matrix row-major with `re+imi` formatted cells, for
/// debugging dumps (e.g. `1.5+0.25i`, `2-3i`).
pub fn matrix_to_csv_string(m: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    for row in 0..m.nrows() {
        for col in 0..m.ncols() {
            if col > 0 {
                out.push(',');
            }
            let z = m[(row, col)];
            if z.im >= 0.0 {
                out.push_str(&format!("{}+{}i", z.re, z.im));
            } else {
                out.push_str(&format!("{}-{}i", z.re, -z.im));
            }
        }
        out.push('\n');
    }
    out
}

/// Persist a measurement as a directory: `a_hat.csv`, `y_delta.csv`,
/// optional `truth.csv`, and `meta.json`.
pub fn save_measurement_set(dir: &Path, set: &MeasurementSet) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let grid = &set.meta.grid;
    write_amplitude_csv(&dir.join(A_HAT_FILE), &grid.input_nodes(), &set.a_hat)?;
    write_signal_csv(&dir.join(Y_DELTA_FILE), &grid.output_nodes(), &set.y_delta)?;
    if let Some(truth) = &set.ground_truth {
        write_signal_csv(&dir.join(TRUTH_FILE), &grid.input_nodes(), truth)?;
    }
    let meta = serde_json::to_string_pretty(&set.meta)?;
    std::fs::write(dir.join(META_FILE), meta + "\n")?;
    Ok(())
}

/// Load a measurement directory written by [`save_measurement_set`].
/// `truth.csv` is optional; everything else must be present and
/// dimensionally consistent with the grid in `meta.json`.
pub fn load_measurement_set(dir: &Path) -> Result<MeasurementSet> {
    let meta_raw = std::fs::read_to_string(dir.join(META_FILE)).map_err(|e| {
        Error::Csv(format!("{}: {e}", dir.join(META_FILE).display()))
    })?;
    let meta: MeasurementMeta = serde_json::from_str(&meta_raw)?;
    let (_, a_hat) = read_amplitude_csv(&dir.join(A_HAT_FILE))?;
    let (_, y_delta) = read_signal_csv(&dir.join(Y_DELTA_FILE))?;
    if a_hat.len() != meta.grid.n_input() {
        return Err(Error::DimensionMismatch(format!(
            "a_hat has {} rows, grid expects {}",
            a_hat.len(),
            meta.grid.n_input()
        )));
    }
    if y_delta.len() != meta.grid.n_output() {
        return Err(Error::DimensionMismatch(format!(
            "y_delta has {} rows, grid expects {}",
            y_delta.len(),
            meta.grid.n_output()
        )));
    }
    let truth_path = dir.join(TRUTH_FILE);
    let ground_truth = if truth_path.exists() {
        let (_, t) = read_signal_csv(&truth_path)?;
        if t.len() != meta.grid.n_input() {
            return Err(Error::DimensionMismatch(format!(
                "truth has {} rows, grid expects {}",
                t.len(),
                meta.grid.n_input()
            )));
        }
        Some(t)
    } else {
        None
    };
    Ok(MeasurementSet {
        a_hat,
        y_delta,
        ground_truth,
        meta,
    })
}
