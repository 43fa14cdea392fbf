//! FC head versus HKD head on Kronecker-structured 3x16x16 images, with the
//! same encoder, data and schedule.
//!
//!     cargo run --release --example train_mlm_autoencoder [epochs]

use mlmkit::io::{generate_synthetic, SynthSpec};
use mlmkit::nn::{train_autoencoder, Activation, LayerSpec, Loss, Network, TrainConfig};
use mlmkit::tensor::Shape;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(40);
    let spec = SynthSpec {
        count: 600,
        shape: vec![3, 16, 16],
        rank: 1,
        left: vec![1, 4, 4],
        right: vec![3, 4, 4],
        noise: 0.02,
        seed: 5,
        nonnegative: true,
    };
    let data = generate_synthetic(&spec)?;
    let (train, val) = data.samples.split_at(500);

    let encoder = || {
        vec![LayerSpec::Dense { inputs: 768, outputs: 64 }, LayerSpec::Nonlinearity { function: Activation::Tanh }]
    };
    let heads = [
        ("fc", LayerSpec::OutputFc { shape: vec![3, 16, 16], activation: Activation::Identity }),
        (
            "hkd",
            LayerSpec::OutputHkd { shape: vec![3, 16, 16], c1: 1, h1: 4, w1: 4, h2: 4, w2: 4, components: 1, activation: Activation::Tanh },
        ),
    ];
    let cfg = TrainConfig { epochs, batch_size: 10, lr: 0.05, momentum: 0.9, loss: Loss::L2, seed: 0 };
    for (name, head) in heads {
        let mut layers = encoder();
        layers.push(head);
        let net = Network::new(Shape::new(vec![3, 16, 16])?, layers, 0)?;
        let head_params = net.layer_range(2).len();
        let out = train_autoencoder(net, train, val, &cfg)?;
        println!("{name}: head params {head_params}, total {}", out.net.param_count());
        for r in out.trace.iter().filter(|r| r.epoch % 10 == 0 || r.epoch + 1 == epochs) {
            println!("  epoch {:3} train {:.4e} val {:.4e}", r.epoch, r.train_loss, r.val_loss.unwrap());
        }
        println!("  final train l2 {:.4e}, val l2 {:.4e}", out.final_train_loss, out.final_val_loss.unwrap());
    }
    Ok(())
}
