//! Central-difference check of every layer kind's analytic gradient.
//!
//!     cargo run --release --example gradient_check [seed]

use mlmkit::nn::{grad_check, Activation, GradCheckOptions, KtpGroup, LayerSpec, Loss, Network};
use mlmkit::tensor::{DenseTensor, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn batch(shape: &Shape, n: usize, rng: &mut ChaCha8Rng) -> DenseTensor {
    let mut dims = vec![n];
    dims.extend_from_slice(shape.dims());
    DenseTensor::from_fn(Shape::new(dims).unwrap(), |_| rng.random_range(-1.0..1.0))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let conv_net = vec![
        LayerSpec::Conv2d { in_channels: 2, out_channels: 3, kernel: [3, 3] },
        LayerSpec::Nonlinearity { function: Activation::Relu },
        LayerSpec::Maxpool2,
        LayerSpec::Unpool2,
        LayerSpec::Conv2d { in_channels: 3, out_channels: 1, kernel: [2, 3] },
        LayerSpec::Reshape { shape: vec![16] },
        LayerSpec::Dense { inputs: 16, outputs: 6 },
        LayerSpec::Nonlinearity { function: Activation::Sigmoid },
        LayerSpec::OutputFc { shape: vec![2, 2, 2], activation: Activation::Tanh },
    ];
    let ktp_net = vec![
        LayerSpec::Dense { inputs: 32, outputs: 5 },
        LayerSpec::Nonlinearity { function: Activation::Tanh },
        LayerSpec::OutputKtp {
            shape: vec![2, 4, 6],
            components: 2,
            groups: vec![
                KtpGroup { left: vec![1, 2, 3], right: vec![2, 2, 2] },
                KtpGroup { left: vec![2, 4, 2], right: vec![1, 1, 3] },
            ],
            activation: Activation::Tanh,
        },
    ];
    let hkd_net = vec![
        LayerSpec::Reshape { shape: vec![32] },
        LayerSpec::Dense { inputs: 32, outputs: 5 },
        LayerSpec::Nonlinearity { function: Activation::Identity },
        LayerSpec::OutputHkd { shape: vec![3, 4, 6], c1: 2, h1: 2, w1: 3, h2: 2, w2: 2, components: 2, activation: Activation::Relu },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = GradCheckOptions { seed, ..GradCheckOptions::default() };
    for (name, layers, input) in [
        ("conv/relu/pool/unpool/dense/fc", conv_net, vec![2, 4, 4]),
        ("dense/tanh/ktp", ktp_net, vec![32]),
        ("dense/identity/hkd(relu)", hkd_net, vec![2, 4, 4]),
    ] {
        let net = Network::new(Shape::new(input)?, layers, seed)?;
        let x = batch(net.input_shape(), 3, &mut rng);
        let y = batch(net.output_shape(), 3, &mut rng);
        for loss in [Loss::L2, Loss::L1] {
            let report = grad_check(&net, &x, &y, loss, &opts)?;
            println!(
                "{name} [{}]: {} params checked, {} kinks skipped, max rel error {:.2e}",
                loss.name(),
                report.checked,
                report.skipped_kinks,
                report.max_rel_error
            );
            if loss == Loss::L2 {
                for (kind, err) in report.by_kind() {
                    println!("    {kind:<12} {err:.2e}");
                }
            }
        }
    }
    Ok(())
}
