//! A KTP head can represent exactly-K-term Kronecker targets: by direct
//! weight assignment, and by SGD from a random start.
//!
//!     cargo run --release --example ktp_representability

use mlmkit::nn::{train, Activation, Dataset, KtpGroup, LayerSpec, Loss, Network, TrainConfig};
use mlmkit::tensor::{kron_tensor, DenseTensor, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = 2;
    let (left, right) = (vec![1, 2, 3], vec![1, 2, 2]);
    let head = LayerSpec::OutputKtp {
        shape: vec![1, 4, 6],
        components: k,
        groups: vec![KtpGroup { left: left.clone(), right: right.clone() }],
        activation: Activation::Identity,
    };
    let input = Shape::new(vec![6])?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    // Constant target Σ A_i ⊗ B_i: zero weights, factors in the biases.
    let mut target = DenseTensor::zeros(Shape::new(vec![1, 4, 6])?);
    let mut net = Network::new(input.clone(), vec![head.clone()], 0)?;
    for i in 0..k {
        let a = DenseTensor::from_fn(Shape::new(left.clone())?, |_| rng.random_range(-1.0..1.0));
        let b = DenseTensor::from_fn(Shape::new(right.clone())?, |_| rng.random_range(-1.0..1.0));
        target.add_assign_scaled(1.0, &kron_tensor(&a, &b)?)?;
        for (f, factor) in [(2 * i, &a), (2 * i + 1, &b)] {
            let (w, bias) = net.head_factor_mut(0, f).expect("KTP head factor");
            w.fill(0.0);
            bias.copy_from_slice(factor.data());
        }
    }
    let x = DenseTensor::from_fn(Shape::new(vec![4, 6])?, |_| rng.random_range(-1.0..1.0));
    let mut y = Vec::new();
    for _ in 0..4 {
        y.extend_from_slice(target.data());
    }
    let y = DenseTensor::from_vec(Shape::new(vec![4, 1, 4, 6])?, y)?;
    println!("constructive assignment: l2 = {:.3e}", net.loss(&x, &y, Loss::L2)?);

    // Input-dependent targets produced by a teacher head; train a student.
    let teacher = Network::new(input.clone(), vec![head.clone()], 100)?;
    let xs = DenseTensor::from_fn(Shape::new(vec![64, 6])?, |_| rng.random_range(-1.0..1.0));
    let ys = teacher.predict(&xs)?;
    let split = |t: &DenseTensor, shape: &[usize]| -> Vec<DenseTensor> {
        let s = Shape::new(shape.to_vec()).unwrap();
        t.data().chunks(s.numel()).map(|c| DenseTensor::from_vec(s.clone(), c.to_vec()).unwrap()).collect()
    };
    let data = Dataset::new(split(&xs, &[6]), split(&ys, &[1, 4, 6]))?;
    let cfg = TrainConfig { epochs: 2000, batch_size: 64, lr: 0.4, momentum: 0.9, loss: Loss::L2, seed: 0 };
    for seed in 0..5 {
        let student = Network::new(input.clone(), vec![head.clone()], seed)?;
        let out = train(student, &data, None, &cfg)?;
        let hit = out.trace.iter().position(|r| r.train_loss < 1e-6);
        println!(
            "student seed {seed}: l2 {:.3e} after {} steps (first below 1e-6 at step {})",
            out.final_train_loss,
            out.steps,
            hit.map_or("never".to_string(), |e| (e + 1).to_string())
        );
    }
    Ok(())
}
