//! `demo-illposed`: tabulate perturbations whose images collapse while
//! their own norms stay put, and exhibit the global sign ambiguity.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::Serialize;

use deautoconv::{
    apply_forward, illposedness_demo, io, make_pulse, sign_ambiguity_residual, ComplexSignal,
    Kernel, PulseShape, PulseSpec, SampledGrid,
};

#[derive(Serialize)]
struct SignAmbiguity {
    residual_original: f64,
    residual_negated: f64,
    data_norm: f64,
}

pub fn run(r: f64, betas_arg: &str, n_points: usize, out: Option<&Path>) -> Result<()> {
    let betas: Vec<f64> = betas_arg
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid exponent {t:?}"))
        })
        .collect::<Result<_>>()?;
    if betas.is_empty() {
        bail!("need at least one exponent");
    }

    // The perturbation family lives on the unit interval with no carrier
    // offset, over the plain (unit-kernel) autoconvolution.
    let grid = SampledGrid::new(0.0, 1.0, n_points, 0.0)?;
    let kernel = Kernel::one();
    let x0 = ComplexSignal::new(vec![Complex64::new(0.0, 0.0); grid.n_input()]);
    let rows = illposedness_demo(&x0, r, &betas, &kernel, &grid)?;

    println!("{:>6} {:>20} {:>20} {:>20}", "beta", "perturbation_norm", "image_diff_norm", "bound");
    for row in &rows {
        println!(
            "{:>6} {:>20.12e} {:>20.12e} {:>20.12e}",
            row.beta, row.perturbation_norm, row.image_diff_norm, row.bound
        );
    }

    // Global sign ambiguity on data from a smooth reference pulse: the
    // negated signal explains the data exactly as well.
    let pulse = PulseSpec {
        shape: PulseShape::SmoothSinglePeak { width_frac: 0.15, phase_half_width_frac: 0.32 },
        amplitude_max: 1.0,
    };
    let x = make_pulse(&pulse, &grid)?;
    let y = apply_forward(&kernel, &x, &grid)?;
    let (res_orig, res_neg) = sign_ambiguity_residual(&x, &y, &kernel, &grid)?;
    let data_norm = deautoconv::l2_norm(&y.values, grid.dq());
    println!(
        "sign ambiguity: residual(x) = {res_orig:.3e}, residual(-x) = {res_neg:.3e} \
         against data of norm {data_norm:.3e}"
    );

    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| "illposed".into());
    std::fs::create_dir_all(&dir)?;
    io::write_illposed_csv(&dir.join("illposed.csv"), &rows)?;
    let ambiguity = SignAmbiguity {
        residual_original: res_orig,
        residual_negated: res_neg,
        data_norm,
    };
    std::fs::write(
        dir.join("sign_ambiguity.json"),
        serde_json::to_string_pretty(&ambiguity)? + "\n",
    )?;
    println!("wrote {}", dir.display());
    Ok(())
}
