//! Factorizations and norms built on the thin SVD: rank truncation, matrix
//! and tensor nuclear norms, Kronecker-product SVD and robust PCA.

mod kpsvd;
mod norms;
mod rpca;
mod svd;

pub use kpsvd::{kpsvd, kpsvd_greedy, KpsvdResult, ShapeGroup};
pub use norms::{nuclear_norm, tensor_nuclear_norm, unfolding_nuclear_norms};
pub use rpca::{
    rpca_decompose, rpca_decompose_with, rpca_norm, soft_threshold, RpcaIterate, RpcaNorm,
    RpcaOptions, RpcaResult,
};
pub use svd::{
    svd, svd_with_progress, truncate_rank, SvdProgress, SvdResult, MAX_SWEEPS, ORTHOGONALITY_TOL,
    RANK_TOL,
};

use thiserror::Error;

use crate::tensor::TensorError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LowRankError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("solver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("expected {expected} weights, got {actual}")]
    WeightCount { expected: usize, actual: usize },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("component count must be at least 1")]
    ZeroComponents,
    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),
}

pub type Result<T> = std::result::Result<T, LowRankError>;
