//! Parameter-matched comparison of truncated SVD and KPSVD on an image.
//!
//! With no argument a 320x480 synthetic image is used: smooth shading plus a
//! repeated 16x20 motif, the kind of structure a Kronecker factor captures
//! well.
//!
//!     cargo run --release --example svd_vs_kpsvd [image.pgm] [output_dir]

use mlmkit::io::{read_image, write_image};
use mlmkit::lowrank::kpsvd;
use mlmkit::tensor::{DenseTensor, Shape};

fn synthetic_image() -> DenseTensor {
    DenseTensor::from_fn(Shape::new(vec![1, 320, 480]).unwrap(), |i| {
        let (y, x) = (i[1] as f64, i[2] as f64);
        let shade = 0.5 + 0.3 * (y / 70.0).sin() * (x / 110.0).cos();
        let (py, px) = ((i[1] % 16) as f64, (i[2] % 20) as f64);
        let motif = if (py - 7.5).powi(2) / 30.0 + (px - 9.5).powi(2) / 50.0 < 1.0 { 0.25 } else { 0.0 };
        let stripe = if (i[1] / 80 + i[2] / 120) % 2 == 0 { 0.1 } else { -0.1 };
        (shade + motif * (1.0 + stripe)).clamp(0.0, 1.0)
    })
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let image = match args.next() {
        Some(path) => read_image(path)?,
        None => synthetic_image(),
    };
    let out_dir = args.next();
    let [c, h, w] = *image.dims() else { unreachable!() };
    let (rh, rw) = (16, 20);
    if h % rh != 0 || w % rw != 0 {
        return Err(format!("image {h}x{w} is not divisible by the {rh}x{rw} right factor").into());
    }
    let norm = image.frobenius_norm();
    let ranks = [1, 2, 5, 10, 20];
    let max = *ranks.iter().max().unwrap();

    // Truncated SVD of the channel-stacked image, written as a KPSVD with
    // column-vector and row-vector factors.
    let svd_full = kpsvd(&image, &Shape::new(vec![c, h, 1])?, &Shape::new(vec![1, 1, w])?, max)?;
    let kp_full = kpsvd(&image, &Shape::new(vec![c, h / rh, w / rw])?, &Shape::new(vec![1, rh, rw])?, max)?;

    println!("{:>5} {:>10} {:>12} {:>10} {:>12}", "rank", "svd params", "svd rel err", "kp params", "kp rel err");
    for r in ranks {
        let (s, k) = (svd_full.truncated(r), kp_full.truncated(r));
        let (rs, rk) = (s.reconstruct(), k.reconstruct());
        let es = rs.sub(&image)?.frobenius_norm() / norm;
        let ek = rk.sub(&image)?.frobenius_norm() / norm;
        println!("{r:>5} {:>10} {es:>12.4e} {:>10} {ek:>12.4e}", s.param_count(), k.param_count());
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir)?;
            write_image(format!("{dir}/svd_rank{r}.pgm"), &rs.map(|v| v.clamp(0.0, 1.0)))?;
            write_image(format!("{dir}/kpsvd_rank{r}.pgm"), &rk.map(|v| v.clamp(0.0, 1.0)))?;
        }
    }
    Ok(())
}
