//! Thin SVD by one-sided (Hestenes) Jacobi rotations.

use crate::tensor::{DenseTensor, Shape, TensorError};

use super::{LowRankError, Result};

/// Maximum number of full sweeps over all column pairs.
pub const MAX_SWEEPS: usize = 100;
/// A column pair counts as orthogonal once `|⟨a_p, a_q⟩| ≤ tol · ‖a_p‖ ‖a_q‖`.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Singular values below this fraction of `σ_max` count as zero for rank.
pub const RANK_TOL: f64 = 1e-10;

/// Thin SVD `M = U diag(s) Vᵀ` with `r = min(m, n)` columns in `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub u: DenseTensor,
    pub s: Vec<f64>,
    pub v: DenseTensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvdProgress {
    pub sweep: usize,
    pub rotations: usize,
}

impl SvdResult {
    pub fn rank_capacity(&self) -> usize {
        self.s.len()
    }

    /// Number of singular values above `RANK_TOL · σ_max`.
    pub fn numerical_rank(&self) -> usize {
        let smax = self.s.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.s.iter().filter(|&&s| s > RANK_TOL * smax).count()
    }

    /// `Σ_{i<k} s_i u_i v_iᵀ`.
    pub fn reconstruct(&self, k: usize) -> DenseTensor {
        let m = self.u.rows();
        let n = self.v.rows();
        let r = self.s.len();
        let k = k.min(r);
        let mut out = vec![0.0; m * n];
        let u = self.u.data();
        let v = self.v.data();
        for c in 0..k {
            let s = self.s[c];
            if s == 0.0 {
                continue;
            }
            for i in 0..m {
                let a = s * u[i * r + c];
                if a == 0.0 {
                    continue;
                }
                let row = &mut out[i * n..(i + 1) * n];
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot += a * v[j * r + c];
                }
            }
        }
        DenseTensor::from_vec_unchecked_finite(Shape::matrix(m, n).unwrap(), out).unwrap()
    }

    /// `sqrt(Σ_{i≥k} s_i²)`, the Frobenius error of the rank-`k` truncation.
    pub fn tail_norm(&self, k: usize) -> f64 {
        self.s.iter().skip(k).map(|s| s * s).sum::<f64>().sqrt()
    }

    pub fn left_vector(&self, c: usize) -> Vec<f64> {
        self.u.column(c)
    }

    pub fn right_vector(&self, c: usize) -> Vec<f64> {
        self.v.column(c)
    }
}

pub fn svd(m: &DenseTensor) -> Result<SvdResult> {
    svd_with_progress(m, |_| {})
}

/// SVD reporting progress after each sweep.
pub fn svd_with_progress(m: &DenseTensor, mut progress: impl FnMut(SvdProgress)) -> Result<SvdResult> {
    let (rows, cols) = m.ensure_matrix()?;
    if let Some(index) = m.data().iter().position(|v| !v.is_finite()) {
        return Err(TensorError::NonFinite { index }.into());
    }
    let (mut u, s, mut v) = if rows >= cols {
        let colmajor = to_col_major(m.data(), rows, cols);
        jacobi(colmajor, rows, cols, &mut progress)?
    } else {
        let t = m.transpose()?;
        let colmajor = to_col_major(t.data(), cols, rows);
        let (u, s, v) = jacobi(colmajor, cols, rows, &mut progress)?;
        (v, s, u)
    };
    let r = s.len();
    let (mrows, vrows) = (rows, cols);
    fix_signs(&mut u, &mut v, mrows, vrows, r);
    Ok(SvdResult {
        u: DenseTensor::from_vec(Shape::matrix(mrows, r)?, col_major_to_row(&u, mrows, r))?,
        s,
        v: DenseTensor::from_vec(Shape::matrix(vrows, r)?, col_major_to_row(&v, vrows, r))?,
    })
}

fn to_col_major(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = data[i * cols + j];
        }
    }
    out
}

fn col_major_to_row(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            out[i * cols + j] = data[j * rows + i];
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(data: &mut [f64], len: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * len);
    let colp = &mut head[p * len..(p + 1) * len];
    let colq = &mut tail[..len];
    for (x, y) in colp.iter_mut().zip(colq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// One-sided Jacobi on a column-major `m × n` matrix with `m ≥ n`. Returns
/// column-major `U` (m × n), descending singular values and `V` (n × n).
fn jacobi(
    mut a: Vec<f64>,
    m: usize,
    n: usize,
    progress: &mut impl FnMut(SvdProgress),
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0; n * n];
    for j in 0..n {
        v[j * n + j] = 1.0;
    }
    let mut norms: Vec<f64> = (0..n).map(|j| dot(&a[j * m..(j + 1) * m], &a[j * m..(j + 1) * m])).collect();
    // Columns below this squared norm are rounding noise; rotating them
    // against full-size columns underflows without making progress.
    let total: f64 = norms.iter().sum();
    let negligible = total * (f64::EPSILON * 1e-3).powi(2);
    let mut converged = n < 2;
    for sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotations = 0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&a[p * m..(p + 1) * m], &a[q * m..(q + 1) * m]);
                if gamma.abs() <= ORTHOGONALITY_TOL * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotations += 1;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, m, p, q, c, s);
                rotate(&mut v, n, p, q, c, s);
                norms[p] = dot(&a[p * m..(p + 1) * m], &a[p * m..(p + 1) * m]);
                norms[q] = dot(&a[q * m..(q + 1) * m], &a[q * m..(q + 1) * m]);
            }
        }
        progress(SvdProgress { sweep, rotations });
        converged = rotations == 0;
    }
    if !converged {
        return Err(LowRankError::NoConvergence { iterations: MAX_SWEEPS });
    }

    let sigma: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    let smax = order.first().map_or(0.0, |&i| sigma[i]);

    let mut u = vec![0.0; m * n];
    let mut vs = vec![0.0; n * n];
    let mut s = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sv = sigma[src];
        s.push(sv);
        vs[dst * n..(dst + 1) * n].copy_from_slice(&v[src * n..(src + 1) * n]);
        if sv > 0.0 && sv > smax * 1e-14 {
            for i in 0..m {
                u[dst * m + i] = a[src * m + i] / sv;
            }
        } else {
            missing.push(dst);
        }
    }
    complete_basis(&mut u, m, n, &missing);
    Ok((u, s, vs))
}

/// Fills the listed columns of a column-major `m × n` matrix with unit
/// vectors orthogonal to every other column.
fn complete_basis(u: &mut [f64], m: usize, n: usize, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let mut filled: Vec<bool> = vec![true; n];
    for &c in missing {
        filled[c] = false;
    }
    let mut candidate = 0;
    for &c in missing {
        while candidate < m {
            let mut w = vec![0.0; m];
            w[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for (j, &ok) in filled.iter().enumerate() {
                    if !ok {
                        continue;
                    }
                    let col = &u[j * m..(j + 1) * m];
                    let proj = dot(&w, col);
                    for (x, y) in w.iter_mut().zip(col) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = dot(&w, &w).sqrt();
            if norm > 0.5 {
                for (slot, x) in u[c * m..(c + 1) * m].iter_mut().zip(&w) {
                    *slot = x / norm;
                }
                filled[c] = true;
                break;
            }
        }
    }
}

/// Flips each singular pair so the largest-magnitude entry of the left
/// vector is positive (first index wins ties).
fn fix_signs(u: &mut [f64], v: &mut [f64], m: usize, n: usize, r: usize) {
    for c in 0..r {
        let col = &u[c * m..(c + 1) * m];
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            u[c * m..(c + 1) * m].iter_mut().for_each(|x| *x = -*x);
            v[c * n..(c + 1) * n].iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Best rank-`r` approximation `U_r diag(s_r) V_rᵀ`.
pub fn truncate_rank(m: &DenseTensor, r: usize) -> Result<DenseTensor> {
    Ok(svd(m)?.reconstruct(r))
}
