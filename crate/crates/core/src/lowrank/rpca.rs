//! Robust PCA: `min ‖L‖_* + λ‖S‖_1  s.t.  L + S = M`, solved with the
//! inexact augmented Lagrange multiplier method.
//!
//! Each iteration soft-thresholds the sparse part entrywise, then thresholds
//! the singular values of the low-rank part, then takes a dual ascent step on
//! the multiplier `Y` and grows the penalty `μ` geometrically.

use crate::tensor::DenseTensor;

use super::{svd, LowRankError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RpcaOptions {
    /// Weight of the ℓ1 term. `None` uses `1/√max(m, n)`.
    pub lambda: Option<f64>,
    /// Stop once `‖M − L − S‖_F / ‖M‖_F ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial penalty. `None` uses `1.25 / σ_max(M)`.
    pub mu0: Option<f64>,
    pub rho: f64,
    /// Upper bound on the penalty as a multiple of `mu0`.
    pub mu_max_factor: f64,
}

impl Default for RpcaOptions {
    fn default() -> Self {
        RpcaOptions { lambda: None, tol: 1e-7, max_iter: 500, mu0: None, rho: 1.5, mu_max_factor: 1e7 }
    }
}

impl RpcaOptions {
    pub fn default_lambda(rows: usize, cols: usize) -> f64 {
        1.0 / (rows.max(cols) as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpcaIterate {
    pub iteration: usize,
    pub objective: f64,
    pub residual: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpcaResult {
    pub low_rank: DenseTensor,
    pub sparse: DenseTensor,
    pub lambda: f64,
    /// `‖L‖_* + λ‖S‖_1` at the returned iterate.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative primal residual at the returned iterate.
    pub residual: f64,
    pub trace: Vec<RpcaIterate>,
}

/// The RPCA-norm value together with the solver's convergence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpcaNorm {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn soft_threshold(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

pub fn rpca_decompose(m: &DenseTensor, lambda: f64, tol: f64, max_iter: usize) -> Result<RpcaResult> {
    let opts = RpcaOptions { lambda: Some(lambda), tol, max_iter, ..RpcaOptions::default() };
    rpca_decompose_with(m, &opts, |_| {})
}

/// Full-control entry point; `progress` sees every iterate.
pub fn rpca_decompose_with(
    m: &DenseTensor,
    opts: &RpcaOptions,
    mut progress: impl FnMut(&RpcaIterate),
) -> Result<RpcaResult> {
    let (rows, cols) = m.ensure_matrix()?;
    let lambda = opts.lambda.unwrap_or_else(|| RpcaOptions::default_lambda(rows, cols));
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(LowRankError::InvalidLambda(lambda));
    }
    let norm_m = m.frobenius_norm();
    let zero = DenseTensor::zeros(m.shape().clone());
    if norm_m == 0.0 {
        return Ok(RpcaResult {
            low_rank: zero.clone(),
            sparse: zero,
            lambda,
            objective: 0.0,
            iterations: 0,
            converged: true,
            residual: 0.0,
            trace: Vec::new(),
        });
    }

    let spectral = svd(m)?.s[0];
    let inf_norm = m.max_abs();
    let dual_scale = spectral.max(inf_norm / lambda);
    let mut y = m.scale(1.0 / dual_scale);
    let mut mu = opts.mu0.unwrap_or(1.25 / spectral);
    let mu_max = mu * opts.mu_max_factor;

    let mut low = zero.clone();
    let mut sparse = zero;
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut objective = 0.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let inv_mu = 1.0 / mu;

        // S ← shrink(M − L + Y/μ, λ/μ)
        let tau = lambda * inv_mu;
        for (((s, &mv), &lv), &yv) in sparse
            .data_mut()
            .iter_mut()
            .zip(m.data())
            .zip(low.data())
            .zip(y.data())
        {
            *s = soft_threshold(mv - lv + yv * inv_mu, tau);
        }

        // L ← SVT(M − S + Y/μ, 1/μ)
        let mut target = m.sub(&sparse)?;
        target.add_assign_scaled(inv_mu, &y)?;
        let mut dec = svd(&target)?;
        let mut nuclear = 0.0;
        for s in dec.s.iter_mut() {
            *s = (*s - inv_mu).max(0.0);
            nuclear += *s;
        }
        low = dec.reconstruct(dec.s.len());

        let mut z = m.sub(&low)?;
        z.add_assign_scaled(-1.0, &sparse)?;
        y.add_assign_scaled(mu, &z)?;
        residual = z.frobenius_norm() / norm_m;
        objective = nuclear + lambda * sparse.l1_norm();
        let it = RpcaIterate { iteration: iterations, objective, residual, mu };
        progress(&it);
        trace.push(it);
        mu = (mu * opts.rho).min(mu_max);
        if residual <= opts.tol {
            converged = true;
            break;
        }
    }

    Ok(RpcaResult { low_rank: low, sparse, lambda, objective, iterations, converged, residual, trace })
}

/// `inf_S ‖M − S‖_* + λ‖S‖_1`, evaluated as the RPCA objective at the solver's
/// returned iterate.
pub fn rpca_norm(m: &DenseTensor, lambda: f64) -> Result<RpcaNorm> {
    let opts = RpcaOptions { lambda: Some(lambda), ..RpcaOptions::default() };
    let r = rpca_decompose_with(m, &opts, |_| {})?;
    Ok(RpcaNorm { value: r.objective, converged: r.converged, iterations: r.iterations })
}
