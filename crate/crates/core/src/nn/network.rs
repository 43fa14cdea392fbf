use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{DenseTensor, Shape};

use super::layer::{head_factor_sizes, Activation, LayerSpec};
use super::loss::Loss;
use super::mlm::{hkd_backward, hkd_forward, ktp_backward, ktp_forward, HkdDims, KtpGroupPlan};
use super::ops::{self, ConvGeometry};
use super::{NnError, Result};

/// Precomputed per-layer data that does not depend on parameters.
#[derive(Debug, Clone, PartialEq)]
enum Plan {
    Plain,
    Ktp(Vec<KtpGroupPlan>),
    Hkd(HkdDims),
}

/// A feed-forward stack of layers with a flat parameter store.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_shape: Shape,
    layers: Vec<LayerSpec>,
    /// `shapes[i]` is the input shape of layer `i`; the last entry is the
    /// network output shape.
    shapes: Vec<Shape>,
    offsets: Vec<usize>,
    plans: Vec<Plan>,
    params: Vec<f64>,
    seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
enum Cache {
    None,
    Input(Vec<f64>),
    Argmax(Vec<usize>),
    Activation { z: Vec<f64>, a: Vec<f64> },
    Head { input: Vec<f64>, z: Vec<Vec<f64>>, a: Vec<Vec<f64>> },
}

/// Output of a forward pass plus everything backward needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    pub output: DenseTensor,
    caches: Vec<Vec<Cache>>,
    /// Per layer: whether its activation is relu.
    relu: Vec<bool>,
}

impl ForwardPass {
    /// Discrete branch decisions taken by the pass: relu signs and max-pool
    /// winners. Finite differences are only meaningful where this does not
    /// change under perturbation.
    pub fn branch_signature(&self) -> Vec<u64> {
        let mut sig = Vec::new();
        for sample in &self.caches {
            for (cache, &relu) in sample.iter().zip(&self.relu) {
                match cache {
                    Cache::Argmax(arg) => sig.extend(arg.iter().map(|&k| k as u64)),
                    Cache::Activation { z, .. } if relu => sig.extend(z.iter().map(|&v| u64::from(v > 0.0))),
                    Cache::Head { z, .. } if relu => sig.extend(z.iter().flatten().map(|&v| u64::from(v > 0.0))),
                    _ => {}
                }
            }
        }
        sig
    }
}

impl Network {
    pub fn new(input_shape: Shape, layers: Vec<LayerSpec>, seed: u64) -> Result<Self> {
        let mut shapes = vec![input_shape.clone()];
        let mut offsets = vec![0];
        let mut plans = Vec::with_capacity(layers.len());
        for (i, layer) in layers.iter().enumerate() {
            let input = shapes.last().unwrap();
            let out = layer.output_shape(i, input)?;
            let count = layer.param_count(input.numel());
            offsets.push(offsets.last().unwrap() + count);
            plans.push(match layer {
                LayerSpec::OutputKtp { groups, .. } => Plan::Ktp(
                    groups.iter().map(|g| KtpGroupPlan::new(&g.left, &g.right)).collect(),
                ),
                LayerSpec::OutputHkd { shape, c1, h1, w1, h2, w2, components, .. } => Plan::Hkd(HkdDims {
                    components: *components,
                    c2: shape[0],
                    c1: *c1,
                    h1: *h1,
                    w1: *w1,
                    h2: *h2,
                    w2: *w2,
                }),
                _ => Plan::Plain,
            });
            shapes.push(out);
        }
        let total = *offsets.last().unwrap();
        let mut net = Network { input_shape, layers, shapes, offsets, plans, params: vec![0.0; total], seed };
        net.initialize(seed);
        Ok(net)
    }

    /// Fan-balanced uniform weights `±√(6 / (fan_in + fan_out))`, zero biases.
    pub fn initialize(&mut self, seed: u64) {
        self.seed = seed;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..self.layers.len() {
            let d = self.shapes[i].numel();
            let (start, end) = (self.offsets[i], self.offsets[i + 1]);
            let p = &mut self.params[start..end];
            p.iter_mut().for_each(|v| *v = 0.0);
            // (rows, fan_in, fan_out) of every weight matrix in layout order.
            let blocks: Vec<(usize, usize, usize)> = match &self.layers[i] {
                LayerSpec::Dense { inputs, outputs } => vec![(*outputs, *inputs, *outputs)],
                LayerSpec::Conv2d { in_channels, out_channels, kernel } => {
                    let k = kernel[0] * kernel[1];
                    vec![(*out_channels, in_channels * k, out_channels * k)]
                }
                spec if spec.is_head() => head_factor_sizes(spec).into_iter().map(|n| (n, d, n)).collect(),
                _ => Vec::new(),
            };
            let mut off = 0;
            for (rows, fan_in, fan_out) in blocks {
                let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let nw = rows * fan_in;
                for v in &mut p[off..off + nw] {
                    *v = rng.random_range(-bound..bound);
                }
                off += nw + rows;
            }
        }
    }

    pub fn input_shape(&self) -> &Shape {
        &self.input_shape
    }

    pub fn output_shape(&self) -> &Shape {
        self.shapes.last().unwrap()
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    /// Input shape of each layer followed by the output shape.
    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(NnError::ParamLength { expected: self.params.len(), actual: params.len() });
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Parameter range of layer `i` in the flat store.
    pub fn layer_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Index of the layer owning flat parameter `p`.
    pub fn layer_of_param(&self, p: usize) -> usize {
        self.offsets.partition_point(|&o| o <= p) - 1
    }

    /// Mutable views of the weight matrix and bias of factor `f` of the head
    /// at layer `layer`.
    pub fn head_factor_mut(&mut self, layer: usize, f: usize) -> Option<(&mut [f64], &mut [f64])> {
        let spec = self.layers.get(layer)?;
        let sizes = head_factor_sizes(spec);
        if f >= sizes.len() {
            return None;
        }
        let d = self.shapes[layer].numel();
        let mut off = self.offsets[layer];
        for &n in &sizes[..f] {
            off += n * (d + 1);
        }
        let n = sizes[f];
        let (w, rest) = self.params[off..off + n * (d + 1)].split_at_mut(n * d);
        Some((w, rest))
    }

    fn check_batch(&self, batch: &DenseTensor, expected: &Shape, what: &str) -> Result<usize> {
        let dims = batch.dims();
        if dims.len() != expected.order() + 1 || &dims[1..] != expected.dims() {
            return Err(NnError::BatchShape {
                what: what.to_string(),
                expected: format!("N x {expected}"),
                actual: batch.shape().to_string(),
            });
        }
        Ok(dims[0])
    }

    pub fn forward(&self, batch: &DenseTensor) -> Result<ForwardPass> {
        let n = self.check_batch(batch, &self.input_shape, "input")?;
        let in_len = self.input_shape.numel();
        let out_len = self.output_shape().numel();
        let mut out = Vec::with_capacity(n * out_len);
        let mut caches = Vec::with_capacity(n);
        for s in 0..n {
            let x = &batch.data()[s * in_len..(s + 1) * in_len];
            let (y, cache) = self.forward_sample(x)?;
            out.extend_from_slice(&y);
            caches.push(cache);
        }
        let mut dims = vec![n];
        dims.extend_from_slice(self.output_shape().dims());
        let output = DenseTensor::from_vec_unchecked_finite(Shape::new(dims)?, out)?;
        let relu = self
            .layers
            .iter()
            .map(|l| match l {
                LayerSpec::Nonlinearity { function }
                | LayerSpec::OutputFc { activation: function, .. }
                | LayerSpec::OutputKtp { activation: function, .. }
                | LayerSpec::OutputHkd { activation: function, .. } => *function == Activation::Relu,
                _ => false,
            })
            .collect();
        Ok(ForwardPass { output, caches, relu })
    }

    /// Forward pass returning only the output.
    pub fn predict(&self, batch: &DenseTensor) -> Result<DenseTensor> {
        Ok(self.forward(batch)?.output)
    }

    fn forward_sample(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<Cache>)> {
        let mut act = x.to_vec();
        let mut caches = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let p = &self.params[self.layer_range(i)];
            let din = self.shapes[i].dims();
            let (next, cache) = match layer {
                LayerSpec::Dense { inputs, outputs } => {
                    let (w, b) = p.split_at(inputs * outputs);
                    let mut y = vec![0.0; *outputs];
                    ops::affine(w, b, &act, &mut y);
                    (y, Cache::Input(act))
                }
                LayerSpec::Conv2d { in_channels, out_channels, kernel } => {
                    let g = ConvGeometry {
                        in_channels: *in_channels,
                        out_channels: *out_channels,
                        kh: kernel[0],
                        kw: kernel[1],
                        height: din[1],
                        width: din[2],
                    };
                    let (w, b) = p.split_at(out_channels * in_channels * kernel[0] * kernel[1]);
                    (ops::conv2d(g, w, b, &act), Cache::Input(act))
                }
                LayerSpec::Maxpool2 => {
                    let (y, arg) = ops::maxpool2(din[0], din[1], din[2], &act);
                    (y, Cache::Argmax(arg))
                }
                LayerSpec::Unpool2 => (ops::unpool2(din[0], din[1], din[2], &act), Cache::None),
                LayerSpec::Reshape { .. } => (act, Cache::None),
                LayerSpec::Nonlinearity { function } => {
                    let a = ops::activate(*function, &act);
                    (a.clone(), Cache::Activation { z: act, a })
                }
                head => {
                    let activation = head_activation(head);
                    let sizes = head_factor_sizes(head);
                    let d = act.len();
                    let mut zs = Vec::with_capacity(sizes.len());
                    let mut off = 0;
                    for &nf in &sizes {
                        let w = &p[off..off + nf * d];
                        let b = &p[off + nf * d..off + nf * (d + 1)];
                        let mut z = vec![0.0; nf];
                        ops::affine(w, b, &act, &mut z);
                        zs.push(z);
                        off += nf * (d + 1);
                    }
                    let a: Vec<Vec<f64>> = zs.iter().map(|z| ops::activate(activation, z)).collect();
                    let out_len = self.shapes[i + 1].numel();
                    let mut y = vec![0.0; out_len];
                    match (&self.plans[i], head) {
                        (Plan::Ktp(plans), LayerSpec::OutputKtp { components, .. }) => {
                            ktp_forward(plans, *components, &a, &mut y)
                        }
                        (Plan::Hkd(dims), _) => hkd_forward(*dims, &a[0], &a[1], &mut y),
                        _ => y.copy_from_slice(&a[0]),
                    }
                    (y, Cache::Head { input: act, z: zs, a })
                }
            };
            caches.push(cache);
            act = next;
        }
        Ok((act, caches))
    }

    /// Gradient of `loss(forward(batch), target)` with respect to every
    /// parameter, in the layout of [`Network::params`]. Also returns the
    /// loss value.
    pub fn backward(&self, pass: &ForwardPass, target: &DenseTensor, loss: Loss) -> Result<(f64, Vec<f64>)> {
        if target.shape() != pass.output.shape() {
            return Err(NnError::BatchShape {
                what: "target".into(),
                expected: pass.output.shape().to_string(),
                actual: target.shape().to_string(),
            });
        }
        let value = loss.value(&pass.output, target);
        let grad_out = loss.gradient(&pass.output, target);
        let out_len = self.output_shape().numel();
        let mut grads = vec![0.0; self.params.len()];
        for (s, cache) in pass.caches.iter().enumerate() {
            self.backward_sample(cache, &grad_out[s * out_len..(s + 1) * out_len], &mut grads);
        }
        Ok((value, grads))
    }

    pub fn loss_and_gradient(&self, batch: &DenseTensor, target: &DenseTensor, loss: Loss) -> Result<(f64, Vec<f64>)> {
        let pass = self.forward(batch)?;
        self.backward(&pass, target, loss)
    }

    pub fn loss(&self, batch: &DenseTensor, target: &DenseTensor, loss: Loss) -> Result<f64> {
        let out = self.predict(batch)?;
        if target.shape() != out.shape() {
            return Err(NnError::BatchShape {
                what: "target".into(),
                expected: out.shape().to_string(),
                actual: target.shape().to_string(),
            });
        }
        Ok(loss.value(&out, target))
    }

    fn backward_sample(&self, caches: &[Cache], grad_out: &[f64], grads: &mut [f64]) {
        let mut g = grad_out.to_vec();
        for i in (0..self.layers.len()).rev() {
            let range = self.layer_range(i);
            let p = &self.params[range.clone()];
            let gp = &mut grads[range];
            let din = self.shapes[i].dims();
            g = match (&self.layers[i], &caches[i]) {
                (LayerSpec::Dense { inputs, outputs }, Cache::Input(x)) => {
                    let (w, _) = p.split_at(inputs * outputs);
                    let (gw, gb) = gp.split_at_mut(inputs * outputs);
                    let mut gx = vec![0.0; *inputs];
                    ops::affine_backward(w, x, &g, gw, gb, &mut gx);
                    gx
                }
                (LayerSpec::Conv2d { in_channels, out_channels, kernel }, Cache::Input(x)) => {
                    let geom = ConvGeometry {
                        in_channels: *in_channels,
                        out_channels: *out_channels,
                        kh: kernel[0],
                        kw: kernel[1],
                        height: din[1],
                        width: din[2],
                    };
                    let nw = out_channels * in_channels * kernel[0] * kernel[1];
                    let (w, _) = p.split_at(nw);
                    let (gw, gb) = gp.split_at_mut(nw);
                    ops::conv2d_backward(geom, w, x, &g, gw, gb)
                }
                (LayerSpec::Maxpool2, Cache::Argmax(arg)) => {
                    ops::maxpool2_backward(self.shapes[i].numel(), arg, &g)
                }
                (LayerSpec::Unpool2, _) => ops::unpool2_backward(din[0], din[1], din[2], &g),
                (LayerSpec::Reshape { .. }, _) => g,
                (LayerSpec::Nonlinearity { function }, Cache::Activation { z, a }) => {
                    ops::activate_backward(*function, z, a, &g)
                }
                (head, Cache::Head { input, z, a }) => {
                    let activation = head_activation(head);
                    let grad_factors = match (&self.plans[i], head) {
                        (Plan::Ktp(plans), LayerSpec::OutputKtp { components, .. }) => {
                            ktp_backward(plans, *components, a, &g)
                        }
                        (Plan::Hkd(dims), _) => {
                            let (ga, gb) = hkd_backward(*dims, &a[0], &a[1], &g);
                            vec![ga, gb]
                        }
                        _ => vec![g],
                    };
                    let d = input.len();
                    let mut gx = vec![0.0; d];
                    let mut off = 0;
                    for ((gf, zf), af) in grad_factors.iter().zip(z).zip(a) {
                        let nf = zf.len();
                        let gz = ops::activate_backward(activation, zf, af, gf);
                        let w = &p[off..off + nf * d];
                        let (gw, gb) = gp[off..off + nf * (d + 1)].split_at_mut(nf * d);
                        ops::affine_backward(w, input, &gz, gw, gb, &mut gx);
                        off += nf * (d + 1);
                    }
                    gx
                }
                _ => unreachable!("cache kind always matches its layer"),
            };
        }
    }
}

fn head_activation(spec: &LayerSpec) -> Activation {
    match spec {
        LayerSpec::OutputFc { activation, .. }
        | LayerSpec::OutputKtp { activation, .. }
        | LayerSpec::OutputHkd { activation, .. } => *activation,
        _ => Activation::Identity,
    }
}
