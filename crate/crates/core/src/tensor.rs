//! Dense row-major tensors and the index algebra used throughout the crate:
//! mode unfolding, the Kronecker tensor product and the rearrangement
//! operator that turns `A ⊗ B` into the rank-one matrix `vec(A) vec(B)ᵀ`.
//!
//! All flattening is row-major (last index fastest). Mode-`n` unfoldings put
//! mode `n` on the rows and traverse the remaining modes in ascending order,
//! row-major, along the columns.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("shape must have at least one mode")]
    EmptyShape,
    #[error("extent of mode {mode} is zero")]
    ZeroExtent { mode: usize },
    #[error("element count of shape {dims:?} overflows usize")]
    Overflow { dims: Vec<usize> },
    #[error("data length {actual} does not match shape {shape} ({expected} elements)")]
    LengthMismatch { shape: Shape, expected: usize, actual: usize },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("expected an order-2 tensor, got order {order}")]
    NotMatrix { order: usize },
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: Shape, actual: Shape },
    #[error(
        "mode {mode}: left extent {left} times right extent {right} does not equal tensor extent {extent}"
    )]
    FactorMismatch { mode: usize, left: usize, right: usize, extent: usize },
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Extents of a tensor, one per mode. Every extent is at least one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(TensorError::EmptyShape);
        }
        if let Some(mode) = dims.iter().position(|&d| d == 0) {
            return Err(TensorError::ZeroExtent { mode });
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| TensorError::Overflow { dims: dims.clone() })?;
        Ok(Shape(dims))
    }

    pub fn matrix(rows: usize, cols: usize) -> Result<Self> {
        Shape::new(vec![rows, cols])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn numel(&self) -> usize {
        // Overflow was ruled out at construction.
        self.0.iter().product()
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for j in (0..self.0.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.0[j + 1];
        }
        strides
    }

    /// Row-major rank of a multi-index.
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.0.len());
        index
            .iter()
            .zip(&self.0)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Inverse of [`Shape::offset`], writing into `index`.
    pub fn unravel(&self, mut offset: usize, index: &mut [usize]) {
        for j in (0..self.0.len()).rev() {
            index[j] = offset % self.0[j];
            offset /= self.0[j];
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl TryFrom<&[usize]> for Shape {
    type Error = TensorError;

    fn try_from(dims: &[usize]) -> Result<Self> {
        Shape::new(dims.to_vec())
    }
}

/// Row-major dense tensor of 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Builds a tensor, rejecting length mismatches and non-finite entries.
    pub fn from_vec(shape: Shape, data: Vec<f64>) -> Result<Self> {
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite { index });
        }
        Self::from_vec_unchecked_finite(shape, data)
    }

    /// Like [`DenseTensor::from_vec`] but accepts non-finite entries.
    pub fn from_vec_unchecked_finite(shape: Shape, data: Vec<f64>) -> Result<Self> {
        let expected = shape.numel();
        if data.len() != expected {
            return Err(TensorError::LengthMismatch { shape, expected, actual: data.len() });
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.numel();
        DenseTensor { shape, data: vec![0.0; n] }
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let n = shape.numel();
        let mut idx = vec![0; shape.order()];
        let data = (0..n)
            .map(|k| {
                shape.unravel(k, &mut idx);
                f(&idx)
            })
            .collect();
        DenseTensor { shape, data }
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_vec(Shape::matrix(rows, cols)?, data)
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::matrix(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self::from_fn(Shape::matrix(n, n)?, |i| if i[0] == i[1] { 1.0 } else { 0.0 }))
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Ok(Self::from_fn(Shape::matrix(n, n)?, |i| if i[0] == i[1] { values[i[0]] } else { 0.0 }))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.shape.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let k = self.shape.offset(index);
        self.data[k] = value;
    }

    pub fn reshape(self, shape: Shape) -> Result<Self> {
        Self::from_vec_unchecked_finite(shape, self.data)
    }

    /// Row-major flattening into a column vector (`n × 1`).
    pub fn vec(&self) -> DenseTensor {
        DenseTensor {
            shape: Shape(vec![self.data.len(), 1]),
            data: self.data.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn rows(&self) -> usize {
        self.shape.0[0]
    }

    pub fn cols(&self) -> usize {
        self.shape.0[1]
    }

    pub fn ensure_matrix(&self) -> Result<(usize, usize)> {
        if self.order() != 2 {
            return Err(TensorError::NotMatrix { order: self.order() });
        }
        Ok((self.rows(), self.cols()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, alpha: f64) -> DenseTensor {
        self.map(|v| alpha * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(&self, other: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch {
                expected: self.shape.clone(),
                actual: other.shape.clone(),
            });
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add_assign_scaled(&mut self, alpha: f64, other: &DenseTensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch {
                expected: self.shape.clone(),
                actual: other.shape.clone(),
            });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn transpose(&self) -> Result<DenseTensor> {
        let (m, n) = self.ensure_matrix()?;
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                data[j * m + i] = self.data[i * n + j];
            }
        }
        Ok(DenseTensor { shape: Shape(vec![n, m]), data })
    }

    pub fn matmul(&self, other: &DenseTensor) -> Result<DenseTensor> {
        let (m, k) = self.ensure_matrix()?;
        let (k2, n) = other.ensure_matrix()?;
        if k != k2 {
            return Err(TensorError::ShapeMismatch {
                expected: Shape(vec![k, n]),
                actual: other.shape.clone(),
            });
        }
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            let row = &mut data[i * n..(i + 1) * n];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.data[p * n..(p + 1) * n];
                for (r, &b) in row.iter_mut().zip(brow) {
                    *r += a * b;
                }
            }
        }
        Ok(DenseTensor { shape: Shape(vec![m, n]), data })
    }

    /// Column `j` of a matrix.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let n = self.cols();
        (0..self.rows()).map(|i| self.data[i * n + j]).collect()
    }
}

/// Outer product `u vᵀ` as an `|u| × |v|` matrix.
pub fn outer(u: &[f64], v: &[f64]) -> Result<DenseTensor> {
    let shape = Shape::matrix(u.len(), v.len())?;
    let data = u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
    Ok(DenseTensor { shape, data })
}

/// Kronecker tensor product of two tensors of the same order.
///
/// The result has extents `m_j · n_j` and entry
/// `A[⌊i_j / n_j⌋] · B[i_j mod n_j]`, where `n_j` are the extents of `b`.
pub fn kron_tensor(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    if a.order() != b.order() {
        return Err(TensorError::OrderMismatch { left: a.order(), right: b.order() });
    }
    let dims: Vec<usize> = a.dims().iter().zip(b.dims()).map(|(&m, &n)| m * n).collect();
    let shape = Shape::new(dims)?;
    let order = a.order();
    let bdims = b.dims();
    let mut ai = vec![0; order];
    let mut bi = vec![0; order];
    Ok(DenseTensor::from_fn(shape, |idx| {
        for j in 0..order {
            ai[j] = idx[j] / bdims[j];
            bi[j] = idx[j] % bdims[j];
        }
        a.get(&ai) * b.get(&bi)
    }))
}

fn check_mode(t: &DenseTensor, mode: usize) -> Result<()> {
    if mode >= t.order() {
        return Err(TensorError::ModeOutOfRange { mode, order: t.order() });
    }
    Ok(())
}

/// Mode-`mode` unfolding: a `d_mode × ∏_{j≠mode} d_j` matrix whose columns
/// walk the remaining modes in ascending order, row-major.
pub fn mode_unfold(t: &DenseTensor, mode: usize) -> Result<DenseTensor> {
    check_mode(t, mode)?;
    let dims = t.dims();
    let rows = dims[mode];
    let cols = t.numel() / rows;
    let mut out = vec![0.0; t.numel()];
    let mut idx = vec![0; dims.len()];
    for (k, &v) in t.data.iter().enumerate() {
        t.shape.unravel(k, &mut idx);
        let mut col = 0;
        for (j, (&i, &d)) in idx.iter().zip(dims).enumerate() {
            if j != mode {
                col = col * d + i;
            }
        }
        out[idx[mode] * cols + col] = v;
    }
    Ok(DenseTensor { shape: Shape(vec![rows, cols]), data: out })
}

/// Inverse of [`mode_unfold`].
pub fn mode_fold(m: &DenseTensor, mode: usize, target: &Shape) -> Result<DenseTensor> {
    let (rows, cols) = m.ensure_matrix()?;
    if mode >= target.order() {
        return Err(TensorError::ModeOutOfRange { mode, order: target.order() });
    }
    if rows * cols != target.numel() || rows != target.dims()[mode] {
        let expected_cols = target.numel() / target.dims()[mode];
        return Err(TensorError::ShapeMismatch {
            expected: Shape(vec![target.dims()[mode], expected_cols]),
            actual: m.shape.clone(),
        });
    }
    let dims = target.dims();
    let mut out = vec![0.0; target.numel()];
    let mut idx = vec![0; dims.len()];
    for (k, slot) in out.iter_mut().enumerate() {
        target.unravel(k, &mut idx);
        let mut col = 0;
        for (j, (&i, &d)) in idx.iter().zip(dims).enumerate() {
            if j != mode {
                col = col * d + i;
            }
        }
        *slot = m.data[idx[mode] * cols + col];
    }
    Ok(DenseTensor { shape: target.clone(), data: out })
}

fn check_factorization(extents: &[usize], left: &Shape, right: &Shape) -> Result<()> {
    if left.order() != extents.len() {
        return Err(TensorError::OrderMismatch { left: extents.len(), right: left.order() });
    }
    if right.order() != extents.len() {
        return Err(TensorError::OrderMismatch { left: extents.len(), right: right.order() });
    }
    for (mode, ((&e, &l), &r)) in extents.iter().zip(left.dims()).zip(right.dims()).enumerate() {
        if l * r != e {
            return Err(TensorError::FactorMismatch { mode, left: l, right: r, extent: e });
        }
    }
    Ok(())
}

/// For every entry of a tensor with extents `left_j · right_j`, the
/// (row, column) position it takes in the rearranged matrix.
fn rearrange_positions<'a>(left: &'a Shape, right: &'a Shape) -> impl Iterator<Item = (usize, usize)> + 'a {
    let order = left.order();
    let full: Vec<usize> = left.dims().iter().zip(right.dims()).map(|(l, r)| l * r).collect();
    let total: usize = full.iter().product();
    let mut idx = vec![0; order];
    (0..total).map(move |k| {
        let mut rest = k;
        for j in (0..order).rev() {
            idx[j] = rest % full[j];
            rest /= full[j];
        }
        let mut row = 0;
        let mut col = 0;
        for ((&i, &m), &n) in idx.iter().zip(left.dims()).zip(right.dims()) {
            row = row * m + i / n;
            col = col * n + i % n;
        }
        (row, col)
    })
}

/// The rearrangement operator: maps `t` with extents `left_j · right_j` to the
/// `∏ left × ∏ right` matrix with `R(A ⊗ B) = vec(A) vec(B)ᵀ`.
pub fn rearrange(t: &DenseTensor, left: &Shape, right: &Shape) -> Result<DenseTensor> {
    check_factorization(t.dims(), left, right)?;
    let rows = left.numel();
    let cols = right.numel();
    let mut out = vec![0.0; rows * cols];
    for (&v, (r, c)) in t.data.iter().zip(rearrange_positions(left, right)) {
        out[r * cols + c] = v;
    }
    Ok(DenseTensor { shape: Shape(vec![rows, cols]), data: out })
}

/// Inverse of [`rearrange`].
pub fn rearrange_inverse(m: &DenseTensor, left: &Shape, right: &Shape) -> Result<DenseTensor> {
    let (rows, cols) = m.ensure_matrix()?;
    if left.order() != right.order() {
        return Err(TensorError::OrderMismatch { left: left.order(), right: right.order() });
    }
    if rows != left.numel() || cols != right.numel() {
        return Err(TensorError::ShapeMismatch {
            expected: Shape(vec![left.numel(), right.numel()]),
            actual: m.shape.clone(),
        });
    }
    let dims: Vec<usize> = left.dims().iter().zip(right.dims()).map(|(l, r)| l * r).collect();
    let shape = Shape::new(dims)?;
    let data = rearrange_positions(left, right).map(|(r, c)| m.data[r * cols + c]).collect();
    Ok(DenseTensor { shape, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(shape: &[usize]) -> DenseTensor {
        let shape = Shape::new(shape.to_vec()).unwrap();
        let n = shape.numel();
        DenseTensor::from_vec(shape, (0..n).map(|v| v as f64 * 0.5 - 3.0).collect()).unwrap()
    }

    #[test]
    fn shape_rejects_bad_extents() {
        assert_eq!(Shape::new(vec![]), Err(TensorError::EmptyShape));
        assert_eq!(Shape::new(vec![2, 0]), Err(TensorError::ZeroExtent { mode: 1 }));
        assert!(matches!(Shape::new(vec![usize::MAX, 2]), Err(TensorError::Overflow { .. })));
    }

    #[test]
    fn from_vec_rejects_nan_and_bad_length() {
        let s = Shape::matrix(1, 2).unwrap();
        assert!(matches!(
            DenseTensor::from_vec(s.clone(), vec![1.0, f64::NAN]),
            Err(TensorError::NonFinite { index: 1 })
        ));
        assert!(matches!(
            DenseTensor::from_vec(s, vec![1.0]),
            Err(TensorError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn kron_identity_with_scalar_block() {
        let a = DenseTensor::identity(2).unwrap();
        let b = DenseTensor::from_rows(&[&[5.0]]).unwrap();
        let k = kron_tensor(&a, &b).unwrap();
        assert_eq!(k.data(), &[5.0, 0.0, 0.0, 5.0]);
    }

    #[test]
    fn kron_matches_double_loop_oracle() {
        let a = DenseTensor::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = DenseTensor::from_rows(&[&[0.0, 5.0], &[6.0, 7.0]]).unwrap();
        let k = kron_tensor(&a, &b).unwrap();
        // Block (p, q) of the result is a[p][q] * b.
        let mut expected = vec![0.0; 16];
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        expected[(p * 2 + r) * 4 + q * 2 + s] = a.get(&[p, q]) * b.get(&[r, s]);
                    }
                }
            }
        }
        assert_eq!(k.data(), expected.as_slice());
        assert_eq!(k.get(&[0, 0]), 0.0);
        assert_eq!(k.get(&[0, 1]), 5.0);
        assert_eq!(k.get(&[3, 3]), 28.0);
    }

    #[test]
    fn kron_scalar_order3() {
        let a = DenseTensor::from_vec(Shape::new(vec![1, 1, 1]).unwrap(), vec![2.0]).unwrap();
        let b = seq(&[2, 3, 2]);
        let k = kron_tensor(&a, &b).unwrap();
        assert_eq!(k, b.scale(2.0));
    }

    #[test]
    fn kron_order_mismatch() {
        let err = kron_tensor(&seq(&[2, 2]), &seq(&[2, 2, 2])).unwrap_err();
        assert_eq!(err, TensorError::OrderMismatch { left: 2, right: 3 });
        assert!(err.to_string().contains('2') && err.to_string().contains('3'));
    }

    #[test]
    fn kron_of_column_and_row_is_outer_product() {
        let u = DenseTensor::matrix(3, 1, vec![1.0, -2.0, 0.5]).unwrap();
        let v = DenseTensor::matrix(1, 2, vec![4.0, 3.0]).unwrap();
        let k = kron_tensor(&u, &v).unwrap();
        assert_eq!(k, outer(u.data(), v.data()).unwrap());
    }

    #[test]
    fn unfold_of_matrix_is_identity_or_transpose() {
        let m = seq(&[2, 3]);
        assert_eq!(mode_unfold(&m, 0).unwrap(), m);
        assert_eq!(mode_unfold(&m, 1).unwrap(), m.transpose().unwrap());
        assert_eq!(
            mode_unfold(&m, 2).unwrap_err(),
            TensorError::ModeOutOfRange { mode: 2, order: 2 }
        );
    }

    #[test]
    fn unfold_column_order_is_ascending_row_major() {
        let t = seq(&[2, 3, 4]);
        let u = mode_unfold(&t, 1).unwrap();
        assert_eq!(u.dims(), &[3, 8]);
        // column index = i0 * 4 + i2 = 4 + 3
        assert_eq!(u.get(&[2, 7]), t.get(&[1, 2, 3]));
    }

    #[test]
    fn fold_round_trip_each_mode() {
        let t = seq(&[2, 3, 4]);
        for mode in 0..3 {
            let u = mode_unfold(&t, mode).unwrap();
            assert_eq!(mode_fold(&u, mode, t.shape()).unwrap(), t);
        }
        let row = seq(&[1, 6]);
        assert_eq!(mode_fold(&row, 0, &Shape::new(vec![1, 6]).unwrap()).unwrap(), row);
    }

    #[test]
    fn fold_rejects_bad_shapes() {
        let m = seq(&[2, 5]);
        assert!(matches!(
            mode_fold(&m, 0, &Shape::new(vec![2, 3, 2]).unwrap()),
            Err(TensorError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            mode_fold(&seq(&[2, 5, 1]), 0, &Shape::new(vec![2, 5]).unwrap()),
            Err(TensorError::NotMatrix { order: 3 })
        ));
    }

    #[test]
    fn rearrange_of_kron_is_rank_one_outer_product() {
        let a = seq(&[2, 3]);
        let b = seq(&[4, 5]).scale(0.25);
        let t = kron_tensor(&a, &b).unwrap();
        let r = rearrange(&t, a.shape(), b.shape()).unwrap();
        assert_eq!(r, outer(a.data(), b.data()).unwrap());
        let back = rearrange_inverse(&r, a.shape(), b.shape()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rearrange_with_unit_left_is_row_vector() {
        let t = seq(&[3, 4]);
        let ones = Shape::new(vec![1, 1]).unwrap();
        let r = rearrange(&t, &ones, t.shape()).unwrap();
        assert_eq!(r.dims(), &[1, 12]);
        assert_eq!(r.data(), t.data());
    }

    #[test]
    fn rearrange_order3_round_trip() {
        let t = seq(&[4, 6, 10]);
        let left = Shape::new(vec![2, 3, 5]).unwrap();
        let right = Shape::new(vec![2, 2, 2]).unwrap();
        let r = rearrange(&t, &left, &right).unwrap();
        assert_eq!(r.dims(), &[30, 8]);
        assert_eq!(rearrange_inverse(&r, &left, &right).unwrap(), t);
    }

    #[test]
    fn rearrange_errors() {
        let t = seq(&[6, 6]);
        let bad = Shape::new(vec![4, 2]).unwrap();
        let ok = Shape::new(vec![2, 3]).unwrap();
        assert_eq!(
            rearrange(&t, &bad, &ok).unwrap_err(),
            TensorError::FactorMismatch { mode: 0, left: 4, right: 2, extent: 6 }
        );
        let r = rearrange(&t, &ok, &Shape::new(vec![3, 2]).unwrap()).unwrap();
        assert!(rearrange_inverse(&r, &Shape::new(vec![3, 3]).unwrap(), &ok).is_err());
    }
}
