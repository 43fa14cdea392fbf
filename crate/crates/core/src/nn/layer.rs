//! Declarative layer specifications, shape inference and parameter counts.

use serde::{Deserialize, Serialize};

use crate::tensor::Shape;

use super::{NnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    #[default]
    Tanh,
    Sigmoid,
    Relu,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
        }
    }
}

fn identity() -> Activation {
    Activation::Identity
}

fn one() -> usize {
    1
}

/// Left/right factor shapes for one shape group of a KTP head.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KtpGroup {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerSpec {
    /// `y = W x + b` on the flattened input.
    Dense { inputs: usize, outputs: usize },
    /// Stride 1, zero "same" padding.
    Conv2d { in_channels: usize, out_channels: usize, kernel: [usize; 2] },
    /// 2×2 max pooling with stride 2.
    Maxpool2,
    /// 2×2 un-pooling into the top-left cell of each block.
    Unpool2,
    /// Parameter-free reinterpretation of the activation's shape.
    Reshape { shape: Vec<usize> },
    Nonlinearity { function: Activation },
    /// Fully connected output head `h(W x + b)` reshaped to `shape`.
    OutputFc {
        shape: Vec<usize>,
        #[serde(default = "identity")]
        activation: Activation,
    },
    /// Kronecker-tensor-product head: `Σ_j Σ_i A_ij ⊗ B_ij`.
    OutputKtp {
        shape: Vec<usize>,
        #[serde(default = "one")]
        components: usize,
        groups: Vec<KtpGroup>,
        #[serde(default)]
        activation: Activation,
    },
    /// Hybrid Kronecker/dot head with coarse factor `A[k, c1, h2, w2]` and
    /// per-channel patch factor `B[k, c, c1, h1, w1]`.
    OutputHkd {
        shape: Vec<usize>,
        c1: usize,
        h1: usize,
        w1: usize,
        h2: usize,
        w2: usize,
        #[serde(default = "one")]
        components: usize,
        #[serde(default)]
        activation: Activation,
    },
}

/// Sizes of the affine factor generators of an output head.
pub(crate) fn head_factor_sizes(spec: &LayerSpec) -> Vec<usize> {
    match spec {
        LayerSpec::OutputFc { shape, .. } => vec![shape.iter().product()],
        LayerSpec::OutputKtp { components, groups, .. } => groups
            .iter()
            .flat_map(|g| {
                let a: usize = g.left.iter().product();
                let b: usize = g.right.iter().product();
                std::iter::repeat_n([a, b], *components).flatten()
            })
            .collect(),
        LayerSpec::OutputHkd { shape, c1, h1, w1, h2, w2, components, .. } => {
            let c2 = shape.first().copied().unwrap_or(0);
            vec![components * c1 * h2 * w2, components * c2 * c1 * h1 * w1]
        }
        _ => Vec::new(),
    }
}

impl LayerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Conv2d { .. } => "conv2d",
            LayerSpec::Maxpool2 => "maxpool2",
            LayerSpec::Unpool2 => "unpool2",
            LayerSpec::Reshape { .. } => "reshape",
            LayerSpec::Nonlinearity { .. } => "nonlinearity",
            LayerSpec::OutputFc { .. } => "output_fc",
            LayerSpec::OutputKtp { .. } => "output_ktp",
            LayerSpec::OutputHkd { .. } => "output_hkd",
        }
    }

    pub fn is_head(&self) -> bool {
        matches!(self, LayerSpec::OutputFc { .. } | LayerSpec::OutputKtp { .. } | LayerSpec::OutputHkd { .. })
    }

    /// Exact number of trainable parameters given `input_len` flattened
    /// inputs. Dense and conv layers count from their declared sizes.
    pub fn param_count(&self, input_len: usize) -> usize {
        match self {
            LayerSpec::Dense { inputs, outputs } => inputs * outputs + outputs,
            LayerSpec::Conv2d { in_channels, out_channels, kernel } => {
                out_channels * in_channels * kernel[0] * kernel[1] + out_channels
            }
            LayerSpec::Maxpool2
            | LayerSpec::Unpool2
            | LayerSpec::Reshape { .. }
            | LayerSpec::Nonlinearity { .. } => 0,
            head => head_factor_sizes(head).iter().map(|n| (input_len + 1) * n).sum(),
        }
    }

    /// Checks internal consistency of the declared sizes.
    pub fn validate(&self, layer: usize) -> Result<()> {
        let invalid = |reason: String| Err(NnError::InvalidSpec { layer, reason });
        match self {
            LayerSpec::Dense { inputs, outputs } if *inputs == 0 || *outputs == 0 => {
                invalid("dense sizes must be positive".into())
            }
            LayerSpec::Conv2d { in_channels, out_channels, kernel }
                if *in_channels == 0 || *out_channels == 0 || kernel.contains(&0) =>
            {
                invalid("conv2d channels and kernel must be positive".into())
            }
            LayerSpec::Reshape { shape } => Shape::new(shape.clone()).map(|_| ()).map_err(|e| {
                NnError::InvalidSpec { layer, reason: format!("reshape: {e}") }
            }),
            LayerSpec::OutputFc { shape, .. } => check_image_shape(layer, shape),
            LayerSpec::OutputKtp { shape, components, groups, .. } => {
                check_image_shape(layer, shape)?;
                if *components == 0 {
                    return invalid("output_ktp needs at least one component".into());
                }
                if groups.is_empty() {
                    return invalid("output_ktp needs at least one shape group".into());
                }
                for (j, g) in groups.iter().enumerate() {
                    if g.left.len() != shape.len() || g.right.len() != shape.len() {
                        return invalid(format!("output_ktp group {j}: factor orders must match output order {}", shape.len()));
                    }
                    for (mode, ((&l, &r), &d)) in g.left.iter().zip(&g.right).zip(shape).enumerate() {
                        if l == 0 || r == 0 || l * r != d {
                            return invalid(format!(
                                "output_ktp group {j}: mode {mode} left {l} x right {r} != output extent {d}"
                            ));
                        }
                    }
                }
                Ok(())
            }
            LayerSpec::OutputHkd { shape, c1, h1, w1, h2, w2, components, .. } => {
                check_image_shape(layer, shape)?;
                if shape.len() != 3 {
                    return invalid(format!("output_hkd needs a C x H x W output, got order {}", shape.len()));
                }
                if *components == 0 || [*c1, *h1, *w1, *h2, *w2].contains(&0) {
                    return invalid("output_hkd factor dims and components must be positive".into());
                }
                if shape[1] != h1 * h2 || shape[2] != w1 * w2 {
                    return invalid(format!(
                        "output_hkd: output {}x{} != (h1*h2) x (w1*w2) = {}x{}",
                        shape[1],
                        shape[2],
                        h1 * h2,
                        w1 * w2
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Infers the per-sample output shape from the input shape.
    pub fn output_shape(&self, layer: usize, input: &Shape) -> Result<Shape> {
        self.validate(layer)?;
        let dims = input.dims();
        let mismatch = |expected: String| NnError::ShapeMismatch {
            layer,
            expected,
            actual: input.to_string(),
        };
        let shape = match self {
            LayerSpec::Dense { inputs, outputs } => {
                if input.numel() != *inputs {
                    return Err(mismatch(format!("{inputs} elements")));
                }
                vec![*outputs]
            }
            LayerSpec::Conv2d { in_channels, out_channels, .. } => {
                if dims.len() != 3 || dims[0] != *in_channels {
                    return Err(mismatch(format!("{in_channels}xHxW")));
                }
                vec![*out_channels, dims[1], dims[2]]
            }
            LayerSpec::Maxpool2 => {
                if dims.len() != 3 || !dims[1].is_multiple_of(2) || !dims[2].is_multiple_of(2) {
                    return Err(mismatch("CxHxW with even H and W".into()));
                }
                vec![dims[0], dims[1] / 2, dims[2] / 2]
            }
            LayerSpec::Unpool2 => {
                if dims.len() != 3 {
                    return Err(mismatch("CxHxW".into()));
                }
                vec![dims[0], dims[1] * 2, dims[2] * 2]
            }
            LayerSpec::Reshape { shape } => {
                let n: usize = shape.iter().product();
                if n != input.numel() {
                    return Err(mismatch(format!("{n} elements")));
                }
                shape.clone()
            }
            LayerSpec::Nonlinearity { .. } => dims.to_vec(),
            LayerSpec::OutputFc { shape, .. }
            | LayerSpec::OutputKtp { shape, .. }
            | LayerSpec::OutputHkd { shape, .. } => shape.clone(),
        };
        Ok(Shape::new(shape)?)
    }
}

fn check_image_shape(layer: usize, shape: &[usize]) -> Result<()> {
    Shape::new(shape.to_vec())
        .map(|_| ())
        .map_err(|e| NnError::InvalidSpec { layer, reason: format!("output shape: {e}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fc_head_count_matches_table() {
        let fc = LayerSpec::OutputFc { shape: vec![3, 40, 40], activation: Activation::Identity };
        assert_eq!(fc.param_count(1200), 5_764_800);
        assert_eq!(fc.param_count(1200), 1200 * 4800 + 4800);
    }

    #[test]
    fn ktp_bias_only_count() {
        let ktp = LayerSpec::OutputKtp {
            shape: vec![3, 40, 40],
            components: 1,
            groups: vec![KtpGroup { left: vec![3, 8, 8], right: vec![1, 5, 5] }],
            activation: Activation::Identity,
        };
        assert_eq!(ktp.param_count(0), 192 + 25);
        assert_eq!(ktp.param_count(1200), 1201 * 217);
    }

    #[test]
    fn hkd_count_formula() {
        let hkd = LayerSpec::OutputHkd {
            shape: vec![3, 40, 40],
            c1: 2,
            h1: 8,
            w1: 8,
            h2: 5,
            w2: 5,
            components: 2,
            activation: Activation::Tanh,
        };
        let a = 2 * 2 * 5 * 5;
        let b = 2 * 3 * 2 * 8 * 8;
        assert_eq!(hkd.param_count(1200), 1201 * (a + b));
    }

    #[test]
    fn affine_heads_for_3x40x40_cannot_go_below_sum_bound() {
        // |A|·|B| = K²·C1²·4800, so |A| + |B| >= 139 for every factorisation.
        let smallest = LayerSpec::OutputHkd {
            shape: vec![3, 40, 40],
            c1: 1,
            h1: 5,
            w1: 5,
            h2: 8,
            w2: 8,
            components: 1,
            activation: Activation::Tanh,
        };
        assert_eq!(smallest.param_count(1200), 1201 * 139);
        assert!(smallest.param_count(1200) < 5_764_800 / 30);
    }

    #[test]
    fn validation_errors_name_the_layer() {
        let bad = LayerSpec::OutputKtp {
            shape: vec![3, 4, 4],
            components: 1,
            groups: vec![KtpGroup { left: vec![3, 2, 3], right: vec![1, 2, 2] }],
            activation: Activation::Tanh,
        };
        let err = bad.validate(4).unwrap_err();
        assert!(matches!(err, NnError::InvalidSpec { layer: 4, .. }));
        let hkd = LayerSpec::OutputHkd {
            shape: vec![3, 4, 4], c1: 1, h1: 2, w1: 2, h2: 2, w2: 3, components: 1,
            activation: Activation::Tanh,
        };
        assert!(hkd.validate(0).is_err());
    }

    #[test]
    fn shape_inference() {
        let s = Shape::new(vec![2, 4, 6]).unwrap();
        assert_eq!(LayerSpec::Maxpool2.output_shape(0, &s).unwrap().dims(), &[2, 2, 3]);
        assert_eq!(LayerSpec::Unpool2.output_shape(0, &s).unwrap().dims(), &[2, 8, 12]);
        let odd = Shape::new(vec![1, 3, 4]).unwrap();
        assert!(matches!(
            LayerSpec::Maxpool2.output_shape(2, &odd),
            Err(NnError::ShapeMismatch { layer: 2, .. })
        ));
        let dense = LayerSpec::Dense { inputs: 48, outputs: 5 };
        assert_eq!(dense.output_shape(0, &s).unwrap().dims(), &[5]);
        let conv = LayerSpec::Conv2d { in_channels: 3, out_channels: 4, kernel: [3, 3] };
        assert!(conv.output_shape(1, &s).is_err());
    }

    #[test]
    fn parses_from_toml() {
        let src = r#"
            kind = "output_ktp"
            shape = [3, 4, 4]
            components = 2
            groups = [{ left = [1, 2, 2], right = [3, 2, 2] }]
        "#;
        let spec: LayerSpec = toml::from_str(src).unwrap();
        assert_eq!(spec.kind(), "output_ktp");
        assert!(matches!(spec, LayerSpec::OutputKtp { activation: Activation::Tanh, components: 2, .. }));
    }
}
