//! Multilinear maps that combine the factor tensors of an output head.
//!
//! Both maps are linear in each factor separately, so the backward pass of
//! one factor is the same contraction with the other factor held fixed.

use crate::tensor::Shape;

/// Index plan for one KTP shape group: for every output offset, the offsets
/// into the left and right factors that multiply into it.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KtpGroupPlan {
    pub left_len: usize,
    pub right_len: usize,
    pub pairs: Vec<(u32, u32)>,
}

impl KtpGroupPlan {
    pub fn new(left: &[usize], right: &[usize]) -> Self {
        let order = left.len();
        let out: Vec<usize> = left.iter().zip(right).map(|(l, r)| l * r).collect();
        let shape = Shape::new(out).expect("validated");
        let lshape = Shape::new(left.to_vec()).expect("validated");
        let rshape = Shape::new(right.to_vec()).expect("validated");
        let mut idx = vec![0; order];
        let mut a = vec![0; order];
        let mut b = vec![0; order];
        let pairs = (0..shape.numel())
            .map(|k| {
                shape.unravel(k, &mut idx);
                for j in 0..order {
                    a[j] = idx[j] / right[j];
                    b[j] = idx[j] % right[j];
                }
                (lshape.offset(&a) as u32, rshape.offset(&b) as u32)
            })
            .collect();
        KtpGroupPlan { left_len: lshape.numel(), right_len: rshape.numel(), pairs }
    }
}

/// `Σ_j Σ_i A_ij ⊗ B_ij`. `factors` lists, per group and per component, the
/// left factor followed by the right factor.
pub(crate) fn ktp_forward(plans: &[KtpGroupPlan], components: usize, factors: &[Vec<f64>], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut f = 0;
    for plan in plans {
        for _ in 0..components {
            let (a, b) = (&factors[f], &factors[f + 1]);
            for (o, &(ia, ib)) in out.iter_mut().zip(&plan.pairs) {
                *o += a[ia as usize] * b[ib as usize];
            }
            f += 2;
        }
    }
}

pub(crate) fn ktp_backward(
    plans: &[KtpGroupPlan],
    components: usize,
    factors: &[Vec<f64>],
    grad_out: &[f64],
) -> Vec<Vec<f64>> {
    let mut grads = Vec::with_capacity(factors.len());
    let mut f = 0;
    for plan in plans {
        for _ in 0..components {
            let (a, b) = (&factors[f], &factors[f + 1]);
            let mut ga = vec![0.0; plan.left_len];
            let mut gb = vec![0.0; plan.right_len];
            for (&g, &(ia, ib)) in grad_out.iter().zip(&plan.pairs) {
                ga[ia as usize] += g * b[ib as usize];
                gb[ib as usize] += g * a[ia as usize];
            }
            grads.push(ga);
            grads.push(gb);
            f += 2;
        }
    }
    grads
}

/// Dimensions of an HKD head: output `C2 × (H1·H2) × (W1·W2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct HkdDims {
    pub components: usize,
    pub c2: usize,
    pub c1: usize,
    pub h1: usize,
    pub w1: usize,
    pub h2: usize,
    pub w2: usize,
}

impl HkdDims {
    fn a_index(&self, k: usize, c1: usize, h2: usize, w2: usize) -> usize {
        ((k * self.c1 + c1) * self.h2 + h2) * self.w2 + w2
    }

    fn b_index(&self, k: usize, c: usize, c1: usize, h1: usize, w1: usize) -> usize {
        (((k * self.c2 + c) * self.c1 + c1) * self.h1 + h1) * self.w1 + w1
    }
}

/// `T[c, h1 + H1·h2, w1 + W1·w2] = Σ_k Σ_c1 A[k, c1, h2, w2] · B[k, c, c1, h1, w1]`.
pub(crate) fn hkd_forward(d: HkdDims, a: &[f64], b: &[f64], out: &mut [f64]) {
    let height = d.h1 * d.h2;
    let width = d.w1 * d.w2;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..d.components {
        for c in 0..d.c2 {
            for c1 in 0..d.c1 {
                for h2 in 0..d.h2 {
                    for w2 in 0..d.w2 {
                        let av = a[d.a_index(k, c1, h2, w2)];
                        for h1 in 0..d.h1 {
                            let row = (c * height + h1 + d.h1 * h2) * width + d.w1 * w2;
                            let brow = d.b_index(k, c, c1, h1, 0);
                            for w1 in 0..d.w1 {
                                out[row + w1] += av * b[brow + w1];
                            }
                        }
                    }
                }
            }
        }
    }
}

pub(crate) fn hkd_backward(d: HkdDims, a: &[f64], b: &[f64], grad_out: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let height = d.h1 * d.h2;
    let width = d.w1 * d.w2;
    let mut ga = vec![0.0; a.len()];
    let mut gb = vec![0.0; b.len()];
    for k in 0..d.components {
        for c in 0..d.c2 {
            for c1 in 0..d.c1 {
                for h2 in 0..d.h2 {
                    for w2 in 0..d.w2 {
                        let ai = d.a_index(k, c1, h2, w2);
                        let av = a[ai];
                        let mut acc = 0.0;
                        for h1 in 0..d.h1 {
                            let row = (c * height + h1 + d.h1 * h2) * width + d.w1 * w2;
                            let brow = d.b_index(k, c, c1, h1, 0);
                            for w1 in 0..d.w1 {
                                let g = grad_out[row + w1];
                                acc += g * b[brow + w1];
                                gb[brow + w1] += g * av;
                            }
                        }
                        ga[ai] += acc;
                    }
                }
            }
        }
    }
    (ga, gb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{kron_tensor, DenseTensor};

    #[test]
    fn single_group_ktp_is_kron_tensor() {
        let left = [1, 2, 3];
        let right = [2, 2, 1];
        let plan = KtpGroupPlan::new(&left, &right);
        let a: Vec<f64> = (0..6).map(|v| v as f64 - 2.5).collect();
        let b: Vec<f64> = (0..4).map(|v| 0.5 * v as f64 + 1.0).collect();
        let mut out = vec![0.0; 24];
        ktp_forward(&[plan], 1, &[a.clone(), b.clone()], &mut out);
        let ta = DenseTensor::from_vec(Shape::new(left.to_vec()).unwrap(), a).unwrap();
        let tb = DenseTensor::from_vec(Shape::new(right.to_vec()).unwrap(), b).unwrap();
        assert_eq!(out, kron_tensor(&ta, &tb).unwrap().into_data());
    }

    #[test]
    fn hkd_single_channel_is_per_channel_kron() {
        let d = HkdDims { components: 1, c2: 2, c1: 1, h1: 2, w1: 3, h2: 2, w2: 2 };
        let a: Vec<f64> = (0..4).map(|v| v as f64 + 1.0).collect();
        let b: Vec<f64> = (0..12).map(|v| 0.1 * v as f64 - 0.4).collect();
        let mut out = vec![0.0; 2 * 4 * 6];
        hkd_forward(d, &a, &b, &mut out);
        let ta = DenseTensor::matrix(2, 2, a).unwrap();
        for c in 0..2 {
            let tb = DenseTensor::matrix(2, 3, b[c * 6..(c + 1) * 6].to_vec()).unwrap();
            let k = kron_tensor(&ta, &tb).unwrap();
            assert_eq!(&out[c * 24..(c + 1) * 24], k.data());
        }
    }

    #[test]
    fn hkd_backward_matches_directional_derivative() {
        let d = HkdDims { components: 2, c2: 2, c1: 3, h1: 2, w1: 2, h2: 3, w2: 1 };
        let na = 2 * 3 * 3;
        let nb = 2 * 2 * 3 * 2 * 2;
        let a: Vec<f64> = (0..na).map(|v| ((v * 7) % 5) as f64 - 2.0).collect();
        let b: Vec<f64> = (0..nb).map(|v| ((v * 3) % 7) as f64 * 0.25 - 0.5).collect();
        let g: Vec<f64> = (0..2 * 6 * 2).map(|v| (v % 4) as f64 - 1.5).collect();
        let (ga, gb) = hkd_backward(d, &a, &b, &g);
        // The map is bilinear, so <g, T(a, b)> = <ga, a> = <gb, b>.
        let mut out = vec![0.0; g.len()];
        hkd_forward(d, &a, &b, &mut out);
        let gt: f64 = g.iter().zip(&out).map(|(x, y)| x * y).sum();
        let ga_a: f64 = ga.iter().zip(&a).map(|(x, y)| x * y).sum();
        let gb_b: f64 = gb.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((gt - ga_a).abs() < 1e-10);
        assert!((gt - gb_b).abs() < 1e-10);
    }
}
