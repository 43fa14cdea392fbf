//! Kronecker tensor products, the rearrangement that turns them into rank-one
//! matrices, and mode unfoldings.
//!
//!     cargo run --example kronecker_rearrangement

use mlmkit::lowrank::svd;
use mlmkit::tensor::{kron_tensor, mode_fold, mode_unfold, outer, rearrange, rearrange_inverse, DenseTensor, Shape};

fn show(name: &str, m: &DenseTensor) {
    println!("{name} ({}):", m.shape());
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| format!("{:6.2}", m.get(&[r, c]))).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = DenseTensor::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]])?;
    let b = DenseTensor::from_rows(&[&[0.0, 1.0, 0.5], &[1.0, 0.0, -1.0]])?;
    let k = kron_tensor(&a, &b)?;
    show("A ⊗ B", &k);

    let (left, right) = (a.shape().clone(), b.shape().clone());
    let r = rearrange(&k, &left, &right)?;
    show("R(A ⊗ B)", &r);
    let expected = outer(a.data(), b.data())?;
    println!("R(A ⊗ B) == vec(A) vec(B)^T: {}", r == expected);
    println!("singular values of R: {:?}", svd(&r)?.s);
    println!("inverse recovers A ⊗ B: {}", rearrange_inverse(&r, &left, &right)? == k);

    // Order-3 tensors interleave every mode the same way.
    let t3a = DenseTensor::from_fn(Shape::new(vec![2, 1, 2])?, |i| (i[0] * 2 + i[2] + 1) as f64);
    let t3b = DenseTensor::from_fn(Shape::new(vec![1, 3, 2])?, |i| (i[1] + i[2]) as f64 - 1.0);
    let t3 = kron_tensor(&t3a, &t3b)?;
    println!("\norder-3 product has shape {}", t3.shape());
    for mode in 0..3 {
        let m = mode_unfold(&t3, mode)?;
        let back = mode_fold(&m, mode, t3.shape())?;
        println!("mode-{mode} unfolding is {} and folds back exactly: {}", m.shape(), back == t3);
    }
    let r3 = rearrange(&t3, t3a.shape(), t3b.shape())?;
    let s = svd(&r3)?.s;
    println!("R of the order-3 product is {} with rank {}", r3.shape(), s.iter().filter(|&&v| v > 1e-12 * s[0]).count());
    Ok(())
}
