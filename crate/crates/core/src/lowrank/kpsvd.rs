//! Kronecker-product SVD: `T = Σ σ_i U_i ⊗ V_i`, obtained from the SVD of the
//! rearranged matrix `R(T)`.

use crate::tensor::{kron_tensor, rearrange, DenseTensor, Shape};

use super::{svd, LowRankError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KpsvdResult {
    pub left_shape: Shape,
    pub right_shape: Shape,
    /// Leading `k` singular values of `R(T)`.
    pub sigmas: Vec<f64>,
    pub left_factors: Vec<DenseTensor>,
    pub right_factors: Vec<DenseTensor>,
    /// Every singular value of `R(T)`, descending.
    pub spectrum: Vec<f64>,
}

impl KpsvdResult {
    pub fn components(&self) -> usize {
        self.sigmas.len()
    }

    /// `Σ σ_i U_i ⊗ V_i` over the retained components.
    pub fn reconstruct(&self) -> DenseTensor {
        let dims: Vec<usize> = self
            .left_shape
            .dims()
            .iter()
            .zip(self.right_shape.dims())
            .map(|(l, r)| l * r)
            .collect();
        let mut out = DenseTensor::zeros(Shape::new(dims).expect("validated at construction"));
        for ((s, u), v) in self.sigmas.iter().zip(&self.left_factors).zip(&self.right_factors) {
            let term = kron_tensor(u, v).expect("factors share an order");
            out.add_assign_scaled(*s, &term).expect("shapes agree");
        }
        out
    }

    /// The leading `k` retained components (all of them if fewer).
    pub fn truncated(&self, k: usize) -> KpsvdResult {
        let keep = k.min(self.components());
        KpsvdResult {
            left_shape: self.left_shape.clone(),
            right_shape: self.right_shape.clone(),
            sigmas: self.sigmas[..keep].to_vec(),
            left_factors: self.left_factors[..keep].to_vec(),
            right_factors: self.right_factors[..keep].to_vec(),
            spectrum: self.spectrum.clone(),
        }
    }

    /// Squared Frobenius error predicted by the discarded spectrum.
    pub fn tail_energy(&self) -> f64 {
        self.spectrum.iter().skip(self.sigmas.len()).map(|s| s * s).sum()
    }

    /// Parameters stored by the retained factors.
    pub fn param_count(&self) -> usize {
        self.components() * (self.left_shape.numel() + self.right_shape.numel())
    }
}

/// Best `k`-term Kronecker approximation of `t` for the given factor shapes.
/// Asking for more terms than `R(t)` has singular values keeps them all.
pub fn kpsvd(t: &DenseTensor, left: &Shape, right: &Shape, k: usize) -> Result<KpsvdResult> {
    if k == 0 {
        return Err(LowRankError::ZeroComponents);
    }
    let r = rearrange(t, left, right)?;
    let dec = svd(&r)?;
    let keep = k.min(dec.s.len());
    let mut left_factors = Vec::with_capacity(keep);
    let mut right_factors = Vec::with_capacity(keep);
    for c in 0..keep {
        left_factors.push(DenseTensor::from_vec(left.clone(), dec.left_vector(c))?);
        right_factors.push(DenseTensor::from_vec(right.clone(), dec.right_vector(c))?);
    }
    Ok(KpsvdResult {
        left_shape: left.clone(),
        right_shape: right.clone(),
        sigmas: dec.s[..keep].to_vec(),
        left_factors,
        right_factors,
        spectrum: dec.s,
    })
}

/// One group of identically shaped Kronecker terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeGroup {
    pub left: Shape,
    pub right: Shape,
    pub components: usize,
}

/// Fits several shape groups in the given order, each on the residual left
/// by the previous ones. Returns one result per group; the approximation is
/// the sum of their reconstructions.
pub fn kpsvd_greedy(t: &DenseTensor, groups: &[ShapeGroup]) -> Result<Vec<KpsvdResult>> {
    let mut residual = t.clone();
    let mut out = Vec::with_capacity(groups.len());
    for g in groups {
        let fit = kpsvd(&residual, &g.left, &g.right, g.components)?;
        residual = residual.sub(&fit.reconstruct())?;
        out.push(fit);
    }
    Ok(out)
}
