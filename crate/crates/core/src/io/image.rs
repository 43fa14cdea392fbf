use std::path::Path;

use crate::tensor::{DenseTensor, Shape};

use super::{IoError, Result};

fn quantize(v: f64) -> u8 {
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

struct Header {
    channels: usize,
    width: usize,
    height: usize,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(IoError::UnsupportedImage("expected P5 or P6 magic".into())),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (k, field) in fields.iter_mut().enumerate() {
        // Whitespace and `#` comments may separate header tokens.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let token = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = token
            .parse()
            .map_err(|_| IoError::UnsupportedImage(format!("bad header field {}", ["width", "height", "maxval"][k])))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(IoError::UnsupportedImage("missing whitespace after maxval".into()));
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(IoError::UnsupportedImage(format!("maxval {maxval}, only 255 is supported")));
    }
    if width == 0 || height == 0 {
        return Err(IoError::UnsupportedImage("zero image dimension".into()));
    }
    Ok(Header { channels, width, height, data_start: pos + 1 })
}

/// Decodes binary PGM (P5) or PPM (P6) into a `C × H × W` tensor of `v / 255`.
pub fn decode_image(bytes: &[u8]) -> Result<DenseTensor> {
    let h = parse_header(bytes)?;
    let n = h
        .channels
        .checked_mul(h.width)
        .and_then(|v| v.checked_mul(h.height))
        .ok_or_else(|| IoError::ExtentOverflow { extents: vec![h.channels as u64, h.height as u64, h.width as u64] })?;
    let pixels = &bytes[h.data_start..];
    if pixels.len() < n {
        return Err(IoError::Truncated { what: "pixel data", expected: h.data_start + n, actual: bytes.len() });
    }
    if pixels.len() > n {
        return Err(IoError::TrailingBytes(pixels.len() - n));
    }
    let plane = h.width * h.height;
    // Samples are interleaved per pixel; the tensor is channel-major.
    let mut data = vec![0.0; n];
    for (p, chunk) in pixels.chunks_exact(h.channels).enumerate() {
        for (c, &v) in chunk.iter().enumerate() {
            data[c * plane + p] = v as f64 / 255.0;
        }
    }
    Ok(DenseTensor::from_vec(Shape::new(vec![h.channels, h.height, h.width])?, data)?)
}

/// Encodes a `1 × H × W` or `3 × H × W` tensor with round-half-up quantization.
pub fn encode_image(t: &DenseTensor) -> Result<Vec<u8>> {
    let (c, h, w) = match *t.dims() {
        [c @ (1 | 3), h, w] => (c, h, w),
        _ => return Err(IoError::ChannelCount(t.shape().to_string())),
    };
    let magic = if c == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{w} {h}\n255\n").into_bytes();
    let plane = h * w;
    let data = t.data();
    out.reserve(c * plane);
    for p in 0..plane {
        for ch in 0..c {
            out.push(quantize(data[ch * plane + p]));
        }
    }
    Ok(out)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(IoError::at(path))?;
    decode_image(&bytes)
}

pub fn write_image(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_image(t)?).map_err(IoError::at(path))
}
