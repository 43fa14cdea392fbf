//! A small reverse-mode network engine: dense, convolution, pooling and
//! un-pooling layers, elementwise nonlinearities, and three output heads
//! (fully connected, Kronecker tensor product, hybrid Kronecker/dot).
//!
//! Every head computes its factor tensors as affine maps of the flattened
//! input followed by the head's nonlinearity, then combines the factors with
//! its multilinear map. No nonlinearity is applied after the combination.

mod gradcheck;
mod layer;
mod loss;
mod mlm;
mod network;
mod ops;
mod train;

pub use gradcheck::{grad_check, GradCheckOptions, GradCheckReport, LayerCheck};
pub use layer::{Activation, KtpGroup, LayerSpec};
pub use loss::Loss;
pub use network::{ForwardPass, Network};
pub use train::{train, train_autoencoder, Dataset, EpochRecord, Sgd, TrainConfig, TrainOutcome};

use thiserror::Error;

use crate::tensor::TensorError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("layer {layer}: {reason}")]
    InvalidSpec { layer: usize, reason: String },
    #[error("layer {layer}: expected input {expected}, got {actual}")]
    ShapeMismatch { layer: usize, expected: String, actual: String },
    #[error("{what} batch: expected {expected}, got {actual}")]
    BatchShape { what: String, expected: String, actual: String },
    #[error("expected {expected} parameters, got {actual}")]
    ParamLength { expected: usize, actual: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("inputs and targets differ in count ({inputs} vs {targets})")]
    DatasetMismatch { inputs: usize, targets: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("training diverged (non-finite loss) in epoch {epoch}")]
    Diverged { epoch: usize },
}

pub type Result<T> = std::result::Result<T, NnError>;
