//! Central-difference verification of the analytic gradient.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::DenseTensor;

use super::{Loss, Network, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckOptions {
    pub eps: f64,
    /// Minimum number of parameters to check; all of them when the network
    /// has fewer.
    pub samples: usize,
    pub seed: u64,
    /// Test hook: added to every analytic gradient entry before comparison.
    pub corrupt: Option<f64>,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        GradCheckOptions { eps: 1e-5, samples: 200, seed: 0, corrupt: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerCheck {
    pub layer: usize,
    pub kind: &'static str,
    pub checked: usize,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// `max |analytic − numeric| / max(1, |analytic|)` over checked parameters.
    pub max_rel_error: f64,
    pub checked: usize,
    /// Parameters whose ±eps perturbation flipped a relu sign or a max-pool
    /// winner somewhere in the batch.
    pub skipped_kinks: usize,
    pub layers: Vec<LayerCheck>,
}

impl GradCheckReport {
    /// Worst error per layer kind, in first-seen order.
    pub fn by_kind(&self) -> Vec<(&'static str, f64)> {
        let mut out: Vec<(&'static str, f64)> = Vec::new();
        for l in &self.layers {
            match out.iter_mut().find(|(k, _)| *k == l.kind) {
                Some((_, e)) => *e = e.max(l.max_rel_error),
                None => out.push((l.kind, l.max_rel_error)),
            }
        }
        out
    }
}

/// Picks parameters stratified by layer so that every layer with parameters
/// is represented.
fn choose_params(net: &Network, samples: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let total = net.param_count();
    if total <= samples {
        return (0..total).collect();
    }
    let layers: Vec<std::ops::Range<usize>> = (0..net.layers().len())
        .map(|i| net.layer_range(i))
        .filter(|r| !r.is_empty())
        .collect();
    let quota = samples.div_ceil(layers.len());
    let mut picked = Vec::new();
    for r in layers {
        let k = quota.min(r.len());
        let mut idx: Vec<usize> = sample(rng, r.len(), k).into_iter().map(|i| r.start + i).collect();
        idx.sort_unstable();
        picked.extend(idx);
    }
    picked
}

pub fn grad_check(
    net: &Network,
    batch: &DenseTensor,
    target: &DenseTensor,
    loss: Loss,
    opts: &GradCheckOptions,
) -> Result<GradCheckReport> {
    let base = net.forward(batch)?;
    let signature = base.branch_signature();
    let (_, mut analytic) = net.backward(&base, target, loss)?;
    if let Some(offset) = opts.corrupt {
        analytic.iter_mut().for_each(|g| *g += offset);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let chosen = choose_params(net, opts.samples, &mut rng);
    let mut probe = net.clone();
    let mut layers: Vec<LayerCheck> = Vec::new();
    let mut skipped = 0;
    let mut checked = 0;
    let mut worst: f64 = 0.0;

    for p in chosen {
        let original = probe.params()[p];
        probe.params_mut()[p] = original + opts.eps;
        let plus = probe.forward(batch)?;
        probe.params_mut()[p] = original - opts.eps;
        let minus = probe.forward(batch)?;
        probe.params_mut()[p] = original;
        if plus.branch_signature() != signature || minus.branch_signature() != signature {
            skipped += 1;
            continue;
        }
        let numeric = (loss.value(&plus.output, target) - loss.value(&minus.output, target)) / (2.0 * opts.eps);
        let a = analytic[p];
        let err = (a - numeric).abs() / a.abs().max(1.0);
        worst = worst.max(err);
        checked += 1;

        let layer = net.layer_of_param(p);
        match layers.iter_mut().find(|l| l.layer == layer) {
            Some(l) => {
                l.checked += 1;
                l.max_rel_error = l.max_rel_error.max(err);
            }
            None => layers.push(LayerCheck {
                layer,
                kind: net.layers()[layer].kind(),
                checked: 1,
                max_rel_error: err,
            }),
        }
    }
    Ok(GradCheckReport { max_rel_error: worst, checked, skipped_kinks: skipped, layers })
}
