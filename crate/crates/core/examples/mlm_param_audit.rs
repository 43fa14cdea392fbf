//! Parameter counts of FC, KTP and HKD output heads for a 3x40x40 output
//! from a 1200-unit bottleneck.
//!
//!     cargo run --example mlm_param_audit

use mlmkit::nn::{Activation, KtpGroup, LayerSpec};

fn main() {
    let d = 1200;
    let out = vec![3, 40, 40];
    let fc = LayerSpec::OutputFc { shape: out.clone(), activation: Activation::Identity };
    let fc_count = fc.param_count(d);
    let heads = [
        ("output_fc", fc.clone()),
        (
            "ktp K=1 (3x8x8)(1x5x5)",
            LayerSpec::OutputKtp {
                shape: out.clone(),
                components: 1,
                groups: vec![KtpGroup { left: vec![3, 8, 8], right: vec![1, 5, 5] }],
                activation: Activation::Tanh,
            },
        ),
        (
            "ktp K=1 (1x8x8)(3x5x5)",
            LayerSpec::OutputKtp {
                shape: out.clone(),
                components: 1,
                groups: vec![KtpGroup { left: vec![1, 8, 8], right: vec![3, 5, 5] }],
                activation: Activation::Tanh,
            },
        ),
        (
            "ktp K=2, two shape groups",
            LayerSpec::OutputKtp {
                shape: out.clone(),
                components: 2,
                groups: vec![
                    KtpGroup { left: vec![1, 8, 8], right: vec![3, 5, 5] },
                    KtpGroup { left: vec![3, 4, 10], right: vec![1, 10, 4] },
                ],
                activation: Activation::Tanh,
            },
        ),
        (
            "hkd C1=1 K=1 (5x5 patch, 8x8 grid)",
            LayerSpec::OutputHkd { shape: out.clone(), c1: 1, h1: 5, w1: 5, h2: 8, w2: 8, components: 1, activation: Activation::Tanh },
        ),
        (
            "hkd C1=2 K=2 (8x8 patch, 5x5 grid)",
            LayerSpec::OutputHkd { shape: out.clone(), c1: 2, h1: 8, w1: 8, h2: 5, w2: 5, components: 2, activation: Activation::Tanh },
        ),
    ];
    println!("{:<38} {:>10} {:>10}", "head", "params", "vs FC");
    for (name, head) in &heads {
        let n = head.param_count(d);
        println!("{name:<38} {n:>10} {:>9.3}%", 100.0 * n as f64 / fc_count as f64);
    }
    // Each factor costs (d + 1) per entry, and the two factor sizes of any
    // head for 3x40x40 multiply to at least 4800.
    let floor = (d + 1) * 139;
    println!("\nsmallest possible affine MLM head: {floor} ({:.3}% of FC)", 100.0 * floor as f64 / fc_count as f64);
    println!("bias-only heads (d = 0) for the first KTP: {}", heads[1].1.param_count(0));
}
