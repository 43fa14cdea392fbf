//! Mini-batch SGD with momentum.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::tensor::{DenseTensor, Shape};

use super::{Loss, Network, NnError, Result};

/// `v ← momentum·v − lr·g`, `θ ← θ + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sgd {
    pub lr: f64,
    pub momentum: f64,
    velocity: Vec<f64>,
}

impl Sgd {
    pub fn new(lr: f64, momentum: f64, params: usize) -> Result<Self> {
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(NnError::InvalidHyperparameter(format!("lr must be positive, got {lr}")));
        }
        if !(0.0..1.0).contains(&momentum) {
            return Err(NnError::InvalidHyperparameter(format!("momentum must be in [0, 1), got {momentum}")));
        }
        Ok(Sgd { lr, momentum, velocity: vec![0.0; params] })
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        for ((p, v), &g) in params.iter_mut().zip(&mut self.velocity).zip(grads) {
            *v = self.momentum * *v - self.lr * g;
            *p += *v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    #[serde(default)]
    pub momentum: f64,
    #[serde(default)]
    pub loss: Loss,
    /// Seeds the per-epoch shuffles.
    #[serde(default)]
    pub seed: u64,
}

/// Paired inputs and targets, one tensor per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<DenseTensor>,
    pub targets: Vec<DenseTensor>,
}

impl Dataset {
    pub fn new(inputs: Vec<DenseTensor>, targets: Vec<DenseTensor>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(NnError::DatasetMismatch { inputs: inputs.len(), targets: targets.len() });
        }
        Ok(Dataset { inputs, targets })
    }

    /// Each sample is its own target.
    pub fn autoencoder(samples: Vec<DenseTensor>) -> Self {
        Dataset { targets: samples.clone(), inputs: samples }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Stacks the selected samples into `(inputs, targets)` batch tensors.
    pub fn batch(&self, indices: &[usize]) -> Result<(DenseTensor, DenseTensor)> {
        Ok((stack(&self.inputs, indices)?, stack(&self.targets, indices)?))
    }

    pub fn full_batch(&self) -> Result<(DenseTensor, DenseTensor)> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.batch(&all)
    }
}

fn stack(samples: &[DenseTensor], indices: &[usize]) -> Result<DenseTensor> {
    let first = samples[indices[0]].shape();
    let mut dims = vec![indices.len()];
    dims.extend_from_slice(first.dims());
    let mut data = Vec::with_capacity(indices.len() * first.numel());
    for &i in indices {
        if samples[i].shape() != first {
            return Err(NnError::BatchShape {
                what: format!("sample {i}"),
                expected: first.to_string(),
                actual: samples[i].shape().to_string(),
            });
        }
        data.extend_from_slice(samples[i].data());
    }
    Ok(DenseTensor::from_vec_unchecked_finite(Shape::new(dims)?, data)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the mini-batch losses seen during the epoch.
    pub train_loss: f64,
    pub val_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub net: Network,
    pub trace: Vec<EpochRecord>,
    pub steps: usize,
    /// Loss of the final parameters over the whole training set.
    pub final_train_loss: f64,
    pub final_val_loss: Option<f64>,
}

fn evaluate(net: &Network, data: &Dataset, loss: Loss) -> Result<f64> {
    let (x, y) = data.full_batch()?;
    net.loss(&x, &y, loss)
}

/// Trains `net` in place of a copy and returns it with the loss trace.
/// Fully determined by the network's initial parameters and `cfg.seed`.
pub fn train(mut net: Network, data: &Dataset, val: Option<&Dataset>, cfg: &TrainConfig) -> Result<TrainOutcome> {
    if data.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    if cfg.batch_size == 0 {
        return Err(NnError::InvalidHyperparameter("batch_size must be positive".into()));
    }
    let val = val.filter(|v| !v.is_empty());
    let mut opt = Sgd::new(cfg.lr, cfg.momentum, net.param_count())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut steps = 0;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut weighted = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let (x, y) = data.batch(chunk)?;
            let (value, grads) = net.loss_and_gradient(&x, &y, cfg.loss)?;
            if !value.is_finite() || grads.iter().any(|g| !g.is_finite()) {
                return Err(NnError::Diverged { epoch });
            }
            opt.step(net.params_mut(), &grads);
            weighted += value * chunk.len() as f64;
            steps += 1;
        }
        let train_loss = weighted / data.len() as f64;
        let val_loss = val.map(|v| evaluate(&net, v, cfg.loss)).transpose()?;
        if val_loss.is_some_and(|v| !v.is_finite()) {
            return Err(NnError::Diverged { epoch });
        }
        trace.push(EpochRecord { epoch, train_loss, val_loss });
    }

    let final_train_loss = evaluate(&net, data, cfg.loss)?;
    if !final_train_loss.is_finite() {
        return Err(NnError::Diverged { epoch: cfg.epochs.saturating_sub(1) });
    }
    let final_val_loss = val.map(|v| evaluate(&net, v, cfg.loss)).transpose()?;
    Ok(TrainOutcome { net, trace, steps, final_train_loss, final_val_loss })
}

/// Trains the network to reproduce its inputs.
pub fn train_autoencoder(
    net: Network,
    samples: &[DenseTensor],
    val: &[DenseTensor],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let data = Dataset::autoencoder(samples.to_vec());
    let val = Dataset::autoencoder(val.to_vec());
    train(net, &data, Some(&val), cfg)
}
