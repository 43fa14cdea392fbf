use crate::tensor::{mode_unfold, DenseTensor};

use super::{svd, LowRankError, Result};

/// Sum of singular values.
pub fn nuclear_norm(m: &DenseTensor) -> Result<f64> {
    Ok(svd(m)?.s.iter().sum())
}

/// Nuclear norm of every mode unfolding, in mode order.
pub fn unfolding_nuclear_norms(t: &DenseTensor) -> Result<Vec<f64>> {
    (0..t.order()).map(|mode| nuclear_norm(&mode_unfold(t, mode)?)).collect()
}

/// `Σ_i β_i ‖T_(i)‖_*` over the mode unfoldings `T_(i)`. Weights are free
/// nonnegative reals; they need not sum to one. Zero-weight unfoldings are
/// skipped.
pub fn tensor_nuclear_norm(t: &DenseTensor, weights: &[f64]) -> Result<f64> {
    if weights.len() != t.order() {
        return Err(LowRankError::WeightCount { expected: t.order(), actual: weights.len() });
    }
    if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| w.is_nan() || **w < 0.0) {
        return Err(LowRankError::NegativeWeight { index, value });
    }
    let mut total = 0.0;
    for (mode, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            total += w * nuclear_norm(&mode_unfold(t, mode)?)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{outer, Shape};

    #[test]
    fn identity_and_diagonal() {
        let eye = DenseTensor::identity(5).unwrap();
        assert!((nuclear_norm(&eye).unwrap() - 5.0).abs() < 1e-12);
        let d = DenseTensor::diag(&[3.0, 1.0]).unwrap();
        assert!((nuclear_norm(&d).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unit_rank_one() {
        let s = 1.0 / 3f64.sqrt();
        let u = [s, s, -s];
        let v = [0.6, 0.8];
        let m = outer(&u, &v).unwrap();
        assert!((nuclear_norm(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_select_unfoldings() {
        let t = DenseTensor::from_fn(Shape::new(vec![2, 3]).unwrap(), |i| (i[0] * 3 + i[1]) as f64);
        let direct = nuclear_norm(&t).unwrap();
        assert_eq!(tensor_nuclear_norm(&t, &[1.0, 0.0]).unwrap(), direct);
        assert_eq!(tensor_nuclear_norm(&t, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn bad_weights() {
        let t = DenseTensor::zeros(Shape::new(vec![2, 2, 2]).unwrap());
        assert_eq!(
            tensor_nuclear_norm(&t, &[1.0, 1.0]),
            Err(LowRankError::WeightCount { expected: 3, actual: 2 })
        );
        assert_eq!(
            tensor_nuclear_norm(&t, &[1.0, -0.5, 1.0]),
            Err(LowRankError::NegativeWeight { index: 1, value: -0.5 })
        );
        assert!(tensor_nuclear_norm(&t, &[1.0, f64::NAN, 1.0]).is_err());
    }
}
