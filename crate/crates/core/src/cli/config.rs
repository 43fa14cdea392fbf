//! TOML run configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::io::SynthSpec;
use crate::nn::{LayerSpec, Loss, Network, TrainConfig};
use crate::tensor::Shape;

use super::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub input: Option<InputSection>,
    #[serde(default, rename = "layer")]
    pub layers: Vec<LayerSpec>,
    pub train: Option<TrainSection>,
    pub data: Option<DataSection>,
    pub approx: Option<ApproxSection>,
    pub norms: Option<NormsSection>,
    pub gradcheck: Option<GradcheckSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    #[serde(default)]
    pub momentum: f64,
    #[serde(default)]
    pub loss: Loss,
    /// Model file; defaults to `model.mlmt` next to the config.
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSection {
    /// Autoencoder on seeded Kronecker-structured images of the input shape.
    Synthetic {
        count: usize,
        #[serde(default)]
        val_count: usize,
        rank: usize,
        left: Vec<usize>,
        right: Vec<usize>,
        #[serde(default)]
        noise: f64,
        #[serde(default)]
        nonnegative: bool,
        seed: Option<u64>,
    },
    /// Uniform random inputs in [-1, 1] with targets produced by a copy of
    /// the configured network initialised from `teacher_seed`.
    Teacher {
        count: usize,
        #[serde(default)]
        val_count: usize,
        teacher_seed: u64,
        seed: Option<u64>,
    },
    /// Autoencoder on PGM/PPM files.
    Images {
        train: Vec<PathBuf>,
        #[serde(default)]
        val: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxSection {
    pub image: Option<PathBuf>,
    pub tensor: Option<PathBuf>,
    pub method: Option<String>,
    pub ranks: Option<Vec<usize>>,
    pub right_shape: Option<Vec<usize>>,
    pub recon_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsSection {
    pub input: Option<PathBuf>,
    pub image: Option<PathBuf>,
    pub weights: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub mode: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradcheckSection {
    pub batch: Option<usize>,
    pub eps: Option<f64>,
    pub samples: Option<usize>,
    pub threshold: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })?;
        if let Some(dir) = origin.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, path)
    }

    /// Makes relative paths relative to the config file's directory.
    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let Some(t) = &mut self.train {
            t.model.as_mut().map(fix);
        }
        if let Some(DataSection::Images { train, val }) = &mut self.data {
            train.iter_mut().chain(val.iter_mut()).for_each(fix);
        }
        if let Some(a) = &mut self.approx {
            [&mut a.image, &mut a.tensor, &mut a.recon_dir].into_iter().flatten().for_each(fix);
        }
        if let Some(n) = &mut self.norms {
            [&mut n.input, &mut n.image].into_iter().flatten().for_each(fix);
        }
    }

    pub fn input_shape(&self) -> Result<Shape, CliError> {
        let input = self.input.as_ref().ok_or_else(|| CliError::field("input.shape", "missing [input] section"))?;
        Shape::new(input.shape.clone()).map_err(|e| CliError::field("input.shape", e))
    }

    pub fn network(&self, seed: u64) -> Result<Network, CliError> {
        let shape = self.input_shape()?;
        Network::new(shape, self.layers.clone(), seed).map_err(|e| CliError::field("layer", e))
    }

    pub fn train_config(&self, seed: u64) -> Result<(TrainConfig, &TrainSection), CliError> {
        let t = self.train.as_ref().ok_or_else(|| CliError::field("train", "missing [train] section"))?;
        let cfg = TrainConfig {
            epochs: t.epochs,
            batch_size: t.batch_size,
            lr: t.lr,
            momentum: t.momentum,
            loss: t.loss,
            seed,
        };
        Ok((cfg, t))
    }
}

impl DataSection {
    pub fn synth_spec(&self, shape: &Shape, seed: u64) -> Option<SynthSpec> {
        match self {
            DataSection::Synthetic { count, val_count, rank, left, right, noise, nonnegative, seed: s } => Some(SynthSpec {
                count: count + val_count,
                shape: shape.dims().to_vec(),
                rank: *rank,
                left: left.clone(),
                right: right.clone(),
                noise: *noise,
                seed: s.unwrap_or(seed),
                nonnegative: *nonnegative,
            }),
            _ => None,
        }
    }
}
