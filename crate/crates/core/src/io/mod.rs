//! Tensor files, 8-bit PNM images and seeded synthetic datasets.

mod image;
mod synth;
mod tensor_file;

use std::path::PathBuf;

use thiserror::Error;

use crate::tensor::TensorError;

pub use image::{decode_image, encode_image, read_image, write_image};
pub use synth::{generate_synthetic, SynthDataset, SynthSpec};
pub use tensor_file::{decode_tensor, encode_tensor, read_tensor, write_tensor, MAGIC, VERSION};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic {found:?}, expected \"MLMT\"")]
    BadMagic { found: Vec<u8> },
    #[error("unsupported tensor file version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated {what}: need {expected} bytes, have {actual}")]
    Truncated { what: &'static str, expected: usize, actual: usize },
    #[error("extents {extents:?} overflow the addressable element count")]
    ExtentOverflow { extents: Vec<u64> },
    #[error("{0} unexpected bytes after payload")]
    TrailingBytes(usize),
    #[error("unsupported image: {0}")]
    UnsupportedImage(String),
    #[error("images need 1 or 3 channels in a C x H x W tensor, got shape {0}")]
    ChannelCount(String),
    #[error("synthetic spec: {0}")]
    InvalidSynth(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl IoError {
    pub(crate) fn at(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> IoError {
        let path = path.into();
        move |source| IoError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, IoError>;
