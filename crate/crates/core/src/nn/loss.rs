use serde::{Deserialize, Serialize};

use crate::tensor::DenseTensor;

/// Reconstruction objective, averaged over every output entry in the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// Mean squared error.
    #[default]
    L2,
    /// Mean absolute error.
    L1,
}

impl Loss {
    pub fn value(self, output: &DenseTensor, target: &DenseTensor) -> f64 {
        let n = output.numel() as f64;
        let sum: f64 = output
            .data()
            .iter()
            .zip(target.data())
            .map(|(&y, &t)| match self {
                Loss::L2 => (y - t) * (y - t),
                Loss::L1 => (y - t).abs(),
            })
            .sum();
        sum / n
    }

    /// Derivative of [`Loss::value`] with respect to each output entry.
    /// The ℓ1 subgradient at zero residual is taken as zero.
    pub fn gradient(self, output: &DenseTensor, target: &DenseTensor) -> Vec<f64> {
        let n = output.numel() as f64;
        output
            .data()
            .iter()
            .zip(target.data())
            .map(|(&y, &t)| match self {
                Loss::L2 => 2.0 * (y - t) / n,
                Loss::L1 => {
                    let r = y - t;
                    if r > 0.0 {
                        1.0 / n
                    } else if r < 0.0 {
                        -1.0 / n
                    } else {
                        0.0
                    }
                }
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Loss::L2 => "l2",
            Loss::L1 => "l1",
        }
    }
}
