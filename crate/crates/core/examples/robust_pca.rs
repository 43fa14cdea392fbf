//! Robust PCA by inexact augmented Lagrangian: recover a planted rank-2
//! matrix from gross sparse corruption, then evaluate the RPCA-norm.
//!
//!     cargo run --release --example robust_pca [seed]

use mlmkit::lowrank::{nuclear_norm, rpca_decompose_with, rpca_norm, RpcaOptions};
use mlmkit::tensor::{DenseTensor, Shape};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 30;
    let u = DenseTensor::from_fn(Shape::matrix(n, 2)?, |_| rng.random_range(-1.0..1.0));
    let v = DenseTensor::from_fn(Shape::matrix(2, n)?, |_| rng.random_range(-1.0..1.0));
    let low = u.matmul(&v)?;
    let mut spikes = DenseTensor::zeros(Shape::matrix(n, n)?);
    let count = n * n / 20;
    for k in sample(&mut rng, n * n, count) {
        spikes.data_mut()[k] = if rng.random_bool(0.5) { 10.0 } else { -10.0 };
    }
    let m = low.add(&spikes)?;

    let opts = RpcaOptions::default();
    let lambda = RpcaOptions::default_lambda(n, n);
    let mut last_report = 0;
    let res = rpca_decompose_with(&m, &RpcaOptions { lambda: Some(lambda), ..opts }, |it| {
        if it.iteration == 1 || it.iteration >= last_report + 5 {
            last_report = it.iteration;
            println!("  iter {:3} objective {:10.4} residual {:.2e} mu {:.3e}", it.iteration, it.objective, it.residual, it.mu);
        }
    })?;
    let rel = res.low_rank.sub(&low)?.frobenius_norm() / low.frobenius_norm();
    let support_hits = res
        .sparse
        .data()
        .iter()
        .zip(spikes.data())
        .filter(|(s, t)| (s.abs() > 1e-3) == (**t != 0.0))
        .count();
    println!("{count} spikes of ±10 on a rank-2 {n}x{n} matrix, lambda = {lambda:.4}");
    println!("iterations {} converged {} residual {:.2e}", res.iterations, res.converged, res.residual);
    println!("relative error of recovered low-rank part: {rel:.3e}");
    println!("sparse support agreement: {support_hits}/{}", n * n);

    let norm = rpca_norm(&m, lambda)?;
    let doubled = rpca_norm(&m.scale(2.0), lambda)?;
    println!("rpca_norm(M) = {:.6}, nuclear norm = {:.6}", norm.value, nuclear_norm(&m)?);
    println!("rpca_norm(2M) / rpca_norm(M) = {:.6}", doubled.value / norm.value);
    Ok(())
}
