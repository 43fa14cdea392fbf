//! Nuclear norms of every unfolding and their weighted sum.
//!
//!     cargo run --example tensor_norms

use mlmkit::lowrank::{nuclear_norm, tensor_nuclear_norm, unfolding_nuclear_norms};
use mlmkit::tensor::{kron_tensor, mode_unfold, DenseTensor, Shape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("nuclear norm of I_5: {}", nuclear_norm(&DenseTensor::identity(5)?)?);

    let shape = Shape::new(vec![2, 3, 4])?;
    let dense = DenseTensor::from_fn(shape.clone(), |i| ((i[0] * 7 + i[1] * 3 + i[2] * 5) % 11) as f64 / 11.0 - 0.4);
    let a = DenseTensor::from_fn(Shape::new(vec![2, 1, 2])?, |i| 1.0 + i[0] as f64 - 0.5 * i[2] as f64);
    let b = DenseTensor::from_fn(Shape::new(vec![1, 3, 2])?, |i| 0.3 * i[1] as f64 - 0.2 * i[2] as f64 + 0.1);
    let kron = kron_tensor(&a, &b)?;
    let cases = [("structured 2x3x4", dense), ("Kronecker 2x3x4", kron)];

    for (name, t) in &cases {
        let per_mode = unfolding_nuclear_norms(t)?;
        let ranks: Vec<usize> = (0..3)
            .map(|m| mlmkit::lowrank::svd(&mode_unfold(t, m).unwrap()).unwrap().numerical_rank())
            .collect();
        println!("\n{name}");
        println!("  unfolding nuclear norms {per_mode:.4?}, ranks {ranks:?}");
        for w in [[1.0 / 3.0; 3], [1.0, 0.0, 0.0], [0.5, 0.25, 0.25]] {
            println!("  weights {w:.3?} -> {:.6}", tensor_nuclear_norm(t, &w)?);
        }
    }
    match tensor_nuclear_norm(&cases[0].1, &[1.0, 1.0]) {
        Err(e) => println!("\nwrong weight count: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
