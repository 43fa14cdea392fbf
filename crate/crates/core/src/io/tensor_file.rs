use std::path::Path;

use crate::tensor::{DenseTensor, Shape};

use super::{IoError, Result};

pub const MAGIC: &[u8; 4] = b"MLMT";
pub const VERSION: u32 = 1;

/// Layout: magic, version, order, extents (all u32 LE), then f64 LE payload.
pub fn encode_tensor(t: &DenseTensor) -> Result<Vec<u8>> {
    let dims = t.dims();
    if dims.iter().any(|&d| d > u32::MAX as usize) || dims.len() > u32::MAX as usize {
        return Err(IoError::ExtentOverflow { extents: dims.iter().map(|&d| d as u64).collect() });
    }
    let mut out = Vec::with_capacity(12 + 4 * dims.len() + 8 * t.numel());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        let rest = self.bytes.len() - self.pos;
        if rest < n {
            return Err(IoError::Truncated { what, expected: self.pos + n, actual: self.bytes.len() });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }
}

pub fn decode_tensor(bytes: &[u8]) -> Result<DenseTensor> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(IoError::BadMagic { found: magic.to_vec() });
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(IoError::UnsupportedVersion(version));
    }
    let order = r.u32("order")? as usize;
    // Checked before allocating anything proportional to `order`.
    if order.checked_mul(4).is_none_or(|n| n > bytes.len() - r.pos) {
        return Err(IoError::Truncated {
            what: "extents",
            expected: r.pos.saturating_add(order.saturating_mul(4)),
            actual: bytes.len(),
        });
    }
    let extents: Vec<u64> = (0..order).map(|_| r.u32("extents").map(u64::from)).collect::<Result<_>>()?;
    let count = extents
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
        .and_then(|n| n.checked_mul(8).map(|_| n));
    let Some(count) = count else {
        return Err(IoError::ExtentOverflow { extents });
    };
    let payload = r.take(count * 8, "payload")?;
    if r.pos != bytes.len() {
        return Err(IoError::TrailingBytes(bytes.len() - r.pos));
    }
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let shape = Shape::new(extents.iter().map(|&d| d as usize).collect::<Vec<_>>())?;
    Ok(DenseTensor::from_vec(shape, data)?)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_tensor(t)?).map_err(IoError::at(path))
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(IoError::at(path))?;
    decode_tensor(&bytes)
}
