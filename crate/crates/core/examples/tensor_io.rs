//! TensorFile round trips, PGM/PPM round trips, and the synthetic
//! Kronecker-structured dataset generator.
//!
//!     cargo run --example tensor_io [output_dir]

use mlmkit::io::{
    decode_image, decode_tensor, encode_image, encode_tensor, generate_synthetic, read_tensor, write_image, write_tensor,
    SynthSpec,
};
use mlmkit::lowrank::kpsvd;
use mlmkit::tensor::{DenseTensor, Shape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(std::env::temp_dir).join("mlmkit-io-demo");
    std::fs::create_dir_all(&dir)?;

    let t = DenseTensor::from_fn(Shape::new(vec![3, 4, 5])?, |i| (i[0] as f64).exp() / (1.0 + (i[1] * i[2]) as f64));
    let path = dir.join("t.mlmt");
    write_tensor(&path, &t)?;
    let back = read_tensor(&path)?;
    let bitwise = t.data().iter().zip(back.data()).all(|(a, b)| a.to_bits() == b.to_bits());
    println!("{}: {} bytes, bitwise round trip {bitwise}", path.display(), std::fs::metadata(&path)?.len());
    for (name, bytes) in [("bad magic", b"XXXX".to_vec()), ("empty", vec![]), ("truncated", encode_tensor(&t)?[..40].to_vec())] {
        println!("  {name}: {}", decode_tensor(&bytes).unwrap_err());
    }

    let spec = SynthSpec {
        count: 4,
        shape: vec![3, 16, 16],
        rank: 2,
        left: vec![1, 4, 4],
        right: vec![3, 4, 4],
        noise: 0.05,
        seed: 9,
        nonnegative: true,
    };
    let data = generate_synthetic(&spec)?;
    let (l, r) = (Shape::new(spec.left.clone())?, Shape::new(spec.right.clone())?);
    for (i, (clean, noisy)) in data.clean.iter().zip(&data.samples).enumerate() {
        let spectrum = kpsvd(clean, &l, &r, 1)?.spectrum;
        let ppm = dir.join(format!("sample{i}.ppm"));
        write_image(&ppm, noisy)?;
        let bytes = std::fs::read(&ppm)?;
        let stable = encode_image(&decode_image(&bytes)?)? == bytes;
        println!(
            "sample {i}: Kronecker spectrum {:.3e} {:.3e} {:.1e}, {} byte-stable {stable}",
            spectrum[0],
            spectrum[1],
            spectrum[2],
            ppm.display()
        );
    }
    Ok(())
}
