//! Benchmarks for the three hot paths of a reconstruction sweep: the
//! forward map, assembling the derivative matrix, and one damped
//! regularized step.  All run at the production grid size (N = 128)
//! under the physical kernel.

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::hint::black_box;

use deautoconv::{
    apply_forward_cached, frechet_matrix_cached, lm_step_cached, ComplexSignal, Kernel,
    PhysicalKernelParams, SampledGrid, SecondDiffOperator,
};

fn setup() -> (SampledGrid, Kernel, ComplexSignal, ComplexSignal) {
    let grid = SampledGrid::new(0.0, 1.0, 128, 0.75).unwrap();
    let kernel = Kernel::Physical(PhysicalKernelParams {
        magnitude_scale: 1e28,
        chi3_re: 3e14,
        chi3_im: 4e14,
        mismatch_quadratic: 4.0,
        interaction_length: 1.0,
        carrier_weight: 0.1,
        transverse_phase: 0.4,
    });
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let x = ComplexSignal::new(
        (0..grid.n_input())
            .map(|_| {
                Complex64::new(rng.random::<f64>(), rng.random::<f64>()) * 1e-7
            })
            .collect(),
    );
    let y = apply_forward_cached(&kernel.matrix(&grid), &x, &grid).unwrap();
    (grid, kernel, x, y)
}

fn bench_forward(c: &mut Criterion) {
    let (grid, kernel, x, _) = setup();
    let kmat = kernel.matrix(&grid);
    c.bench_function("forward_apply_n128", |b| {
        b.iter(|| apply_forward_cached(black_box(&kmat), black_box(&x), &grid).unwrap())
    });
}

fn bench_frechet(c: &mut Criterion) {
    let (grid, kernel, x, _) = setup();
    let kmat = kernel.matrix(&grid);
    c.bench_function("frechet_matrix_n128", |b| {
        b.iter(|| frechet_matrix_cached(black_box(&kmat), black_box(&x), &grid).unwrap())
    });
}

fn bench_lm_step(c: &mut Criterion) {
    let (grid, kernel, x, y) = setup();
    let kmat = kernel.matrix(&grid);
    let l_op = SecondDiffOperator::new(grid.n_input(), grid.dq()).unwrap();
    let ltl = l_op.normal_matrix();
    let alpha = 1e-3;
    c.bench_function("lm_step_n128", |b| {
        b.iter(|| {
            lm_step_cached(
                black_box(&x),
                black_box(&y),
                &kmat,
                &ltl,
                alpha,
                1.0,
                &grid,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_forward, bench_frechet, bench_lm_step);
criterion_main!(benches);
