use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::io::{generate_synthetic, read_image, read_tensor, write_image, write_tensor};
use crate::lowrank::{kpsvd, rpca_norm, tensor_nuclear_norm, unfolding_nuclear_norms, RpcaOptions};
use crate::nn::{grad_check, Dataset, GradCheckOptions, Loss, Network, NnError};
use crate::tensor::{mode_unfold, DenseTensor, Shape};

use super::config::DataSection;
use super::metrics::{metrics, Record, Sink};
use super::{ApproxArgs, CliError, GradcheckArgs, NormsArgs, RunConfig, TrainArgs};

pub(crate) struct Context<'a> {
    pub config: &'a RunConfig,
    pub seed: u64,
}

impl Context<'_> {
    fn record(&self, command: &'static str, record: &'static str, metrics: super::Metrics) -> Record {
        Record { command, record, seed: self.seed, metrics }
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

/// Matrices become `1 × m × n`; order-3 tensors are taken as `C × H × W`.
fn as_image_tensor(t: DenseTensor, what: &str) -> Result<DenseTensor, CliError> {
    match *t.dims() {
        [m, n] => Ok(t.reshape(Shape::new(vec![1, m, n]).expect("nonzero extents")).expect("same size")),
        [_, _, _] => Ok(t),
        _ => Err(CliError::Usage(format!("{what}: expected an order-2 or order-3 tensor, got shape {}", t.shape()))),
    }
}

fn pick<T: Clone>(flag: &Option<T>, section: Option<&Option<T>>) -> Option<T> {
    flag.clone().or_else(|| section.and_then(|s| s.clone()))
}

pub(crate) fn approx(ctx: &Context, args: &ApproxArgs, sink: &mut Sink) -> Result<(), CliError> {
    let sec = ctx.config.approx.as_ref();
    let image = pick(&args.image, sec.map(|s| &s.image));
    let tensor = pick(&args.tensor, sec.map(|s| &s.tensor));
    let (input, from_image) = match (image, tensor) {
        (Some(p), None) => (read_image(&p)?, true),
        (None, Some(p)) => (as_image_tensor(read_tensor(&p)?, &p.display().to_string())?, false),
        (Some(_), Some(_)) => return Err(CliError::Usage("approx: give either an image or a tensor, not both".into())),
        (None, None) => return Err(CliError::Usage("approx: an --image or --tensor input is required".into())),
    };
    let right_shape = match &args.right_shape {
        Some(text) => Some(super::parse_dims(text).map_err(|e| CliError::field("approx.right_shape", e))?),
        None => sec.and_then(|s| s.right_shape.clone()),
    };
    let method = pick(&args.method, sec.map(|s| &s.method))
        .unwrap_or_else(|| if right_shape.is_some() { "both".into() } else { "svd".into() });
    let methods: &[&str] = match method.as_str() {
        "svd" => &["svd"],
        "kpsvd" => &["kpsvd"],
        "both" => &["svd", "kpsvd"],
        other => return Err(CliError::field("approx.method", format!("unknown method {other:?}; use svd, kpsvd or both"))),
    };
    let ranks = pick(&args.ranks, sec.map(|s| &s.ranks)).unwrap_or_else(|| vec![1, 2, 5, 10, 20]);
    if ranks.is_empty() || ranks.contains(&0) {
        return Err(CliError::field("approx.ranks", "ranks must be a nonempty list of positive integers"));
    }
    let recon_dir = pick(&args.recon_dir, sec.map(|s| &s.recon_dir));
    if let Some(dir) = &recon_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    }

    let [c, h, w] = *input.dims() else { unreachable!("order-3 input") };
    let norm = input.frobenius_norm();
    let max_rank = *ranks.iter().max().expect("nonempty");
    for &method in methods {
        // A truncated SVD of the channel-stacked (C·H) × W matrix is the KPSVD
        // with factor shapes (C, H, 1) and (1, 1, W).
        let (left, right) = if method == "svd" {
            (vec![c, h, 1], vec![1, 1, w])
        } else {
            let r = match right_shape.as_deref() {
                Some(&[rh, rw]) => vec![1, rh, rw],
                Some(&[rc, rh, rw]) => vec![rc, rh, rw],
                Some(other) => {
                    return Err(CliError::field("approx.right_shape", format!("expected HxW or CxHxW, got {other:?}")))
                }
                None => return Err(CliError::field("approx.right_shape", "kpsvd needs a right factor shape")),
            };
            let dims = [c, h, w];
            if r.iter().zip(&dims).any(|(&a, &b)| a == 0 || b % a != 0) {
                return Err(CliError::field(
                    "approx.right_shape",
                    format!("right shape {r:?} does not divide the input shape {dims:?}"),
                ));
            }
            (dims.iter().zip(&r).map(|(d, r)| d / r).collect(), r)
        };
        let left = Shape::new(left).map_err(|e| CliError::field("approx.right_shape", e))?;
        let right = Shape::new(right).map_err(|e| CliError::field("approx.right_shape", e))?;
        let full = kpsvd(&input, &left, &right, max_rank).map_err(failed)?;
        for &rank in &ranks {
            let part = full.truncated(rank);
            let recon = part.reconstruct();
            let err = recon.sub(&input).map_err(failed)?.frobenius_norm();
            let rel = if norm > 0.0 { err / norm } else { 0.0 };
            let written = match &recon_dir {
                Some(dir) if from_image => {
                    let ext = if c == 1 { "pgm" } else { "ppm" };
                    let path = dir.join(format!("{method}_rank{rank}.{ext}"));
                    write_image(&path, &recon)?;
                    Some(path)
                }
                Some(dir) => {
                    let path = dir.join(format!("{method}_rank{rank}.mlmt"));
                    write_tensor(&path, &recon)?;
                    Some(path)
                }
                None => None,
            };
            sink.emit(&ctx.record(
                "approx",
                "rank",
                metrics! {
                    "method" => method,
                    "rank" => rank,
                    "components" => part.components(),
                    "left_shape" => left.dims(),
                    "right_shape" => right.dims(),
                    "param_count" => part.param_count(),
                    "frobenius_error" => err,
                    "relative_error" => rel,
                    "reconstruction" => written.map(|p| p.display().to_string()),
                },
            ))?;
        }
    }
    Ok(())
}

pub(crate) fn norms(ctx: &Context, args: &NormsArgs, sink: &mut Sink) -> Result<(), CliError> {
    let sec = ctx.config.norms.as_ref();
    let input = match (pick(&args.input, sec.map(|s| &s.input)), pick(&args.image, sec.map(|s| &s.image))) {
        (Some(p), None) => read_tensor(&p)?,
        (None, Some(p)) => read_image(&p)?,
        (Some(_), Some(_)) => return Err(CliError::Usage("norms: give either a tensor or an image, not both".into())),
        (None, None) => return Err(CliError::Usage("norms: an --input tensor or --image is required".into())),
    };
    let order = input.order();
    let weights = pick(&args.weights, sec.map(|s| &s.weights)).unwrap_or_else(|| vec![1.0 / order as f64; order]);
    let unfoldings = unfolding_nuclear_norms(&input).map_err(failed)?;
    let tnn = tensor_nuclear_norm(&input, &weights).map_err(|e| CliError::field("norms.weights", e))?;
    let mode = pick(&args.mode, sec.map(|s| &s.mode)).unwrap_or(0);
    if mode >= order {
        return Err(CliError::field("norms.mode", format!("mode {mode} out of range for order-{order} input")));
    }
    let m = mode_unfold(&input, mode).map_err(failed)?;
    let lambda = pick(&args.lambda, sec.map(|s| &s.lambda)).unwrap_or_else(|| RpcaOptions::default_lambda(m.rows(), m.cols()));
    let rpca = rpca_norm(&m, lambda).map_err(|e| CliError::field("norms.lambda", e))?;
    sink.emit(&ctx.record(
        "norms",
        "summary",
        metrics! {
            "shape" => input.dims(),
            "nuclear_norms" => unfoldings,
            "weights" => weights,
            "tensor_nuclear_norm" => tnn,
            "rpca_mode" => mode,
            "rpca_lambda" => lambda,
            "rpca_norm" => rpca.value,
            "rpca_converged" => rpca.converged,
            "rpca_iterations" => rpca.iterations,
        },
    ))
}

pub(crate) fn params(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let net = ctx.config.network(ctx.seed)?;
    let mut head_params = 0;
    let mut fc_equivalent = 0;
    for (i, layer) in net.layers().iter().enumerate() {
        let count = net.layer_range(i).len();
        let (input, output) = (&net.shapes()[i], &net.shapes()[i + 1]);
        let mut m = metrics! {
            "layer" => i,
            "kind" => layer.kind(),
            "params" => count,
            "input_shape" => input.dims(),
            "output_shape" => output.dims(),
        };
        if layer.is_head() {
            let fc = (input.numel() + 1) * output.numel();
            head_params += count;
            fc_equivalent += fc;
            m.insert("fc_equivalent_params".into(), json!(fc));
            m.insert("fc_ratio".into(), json!(count as f64 / fc as f64));
        }
        sink.emit(&ctx.record("params", "layer", m))?;
    }
    sink.emit(&ctx.record(
        "params",
        "summary",
        metrics! {
            "layers" => net.layers().len(),
            "total_params" => net.param_count(),
            "head_params" => head_params,
            "fc_equivalent_params" => fc_equivalent,
            "fc_ratio" => (fc_equivalent > 0).then(|| head_params as f64 / fc_equivalent as f64),
        },
    ))
}

fn uniform_batch(shape: &Shape, n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> DenseTensor {
    let mut dims = vec![n];
    dims.extend_from_slice(shape.dims());
    DenseTensor::from_fn(Shape::new(dims).expect("nonzero extents"), |_| rng.random_range(lo..hi))
}

pub(crate) fn gradcheck(ctx: &Context, args: &GradcheckArgs, sink: &mut Sink) -> Result<(), CliError> {
    let sec = ctx.config.gradcheck.clone().unwrap_or_default();
    let net = ctx.config.network(ctx.seed)?;
    let loss = ctx.config.train.as_ref().map_or(Loss::L2, |t| t.loss);
    let batch_size = args.batch.or(sec.batch).unwrap_or(4);
    if batch_size == 0 {
        return Err(CliError::field("gradcheck.batch", "batch must be positive"));
    }
    let defaults = GradCheckOptions::default();
    let opts = GradCheckOptions {
        eps: args.eps.or(sec.eps).unwrap_or(defaults.eps),
        samples: args.samples.or(sec.samples).unwrap_or(defaults.samples),
        seed: ctx.seed,
        corrupt: args.corrupt_gradient,
    };
    let threshold = args.threshold.or(sec.threshold).unwrap_or(1e-5);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x6772_6164);
    let x = uniform_batch(net.input_shape(), batch_size, -1.0, 1.0, &mut rng);
    let y = uniform_batch(net.output_shape(), batch_size, 0.0, 1.0, &mut rng);
    let report = grad_check(&net, &x, &y, loss, &opts).map_err(failed)?;
    for (kind, err) in report.by_kind() {
        let checked: usize = report.layers.iter().filter(|l| l.kind == kind).map(|l| l.checked).sum();
        sink.emit(&ctx.record(
            "gradcheck",
            "kind",
            metrics! { "kind" => kind, "max_rel_error" => err, "checked" => checked },
        ))?;
    }
    let starved = report.checked == 0 && net.param_count() > 0;
    let passed = report.max_rel_error <= threshold && !starved;
    sink.emit(&ctx.record(
        "gradcheck",
        "summary",
        metrics! {
            "max_rel_error" => report.max_rel_error,
            "checked" => report.checked,
            "skipped_kinks" => report.skipped_kinks,
            "threshold" => threshold,
            "passed" => passed,
        },
    ))?;
    if starved {
        return Err(failed("every sampled parameter sat at a kink; nothing was checked"));
    }
    if !passed {
        return Err(failed(format!(
            "gradient check failed: max relative error {:.3e} exceeds {threshold:.1e}",
            report.max_rel_error
        )));
    }
    Ok(())
}

fn load_data(ctx: &Context, net: &Network) -> Result<(Dataset, Dataset), CliError> {
    let data = ctx.config.data.as_ref().ok_or_else(|| CliError::field("data", "missing [data] section"))?;
    let shape = net.input_shape();
    match data {
        DataSection::Synthetic { count, .. } => {
            let spec = data.synth_spec(shape, ctx.seed).expect("synthetic section");
            let mut samples = generate_synthetic(&spec).map_err(|e| CliError::field("data", e))?.samples;
            let val = samples.split_off(*count);
            Ok((Dataset::autoencoder(samples), Dataset::autoencoder(val)))
        }
        DataSection::Teacher { count, val_count, teacher_seed, seed } => {
            let mut teacher = net.clone();
            teacher.initialize(*teacher_seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(ctx.seed));
            let mut split = |n: usize| -> Result<Dataset, CliError> {
                if n == 0 {
                    return Ok(Dataset::autoencoder(Vec::new()));
                }
                let x = uniform_batch(shape, n, -1.0, 1.0, &mut rng);
                let y = teacher.predict(&x).map_err(failed)?;
                Ok(Dataset::new(unstack(&x), unstack(&y)).expect("equal counts"))
            };
            let train = split(*count)?;
            Ok((train, split(*val_count)?))
        }
        DataSection::Images { train, val } => {
            let load = |paths: &[PathBuf]| -> Result<Vec<DenseTensor>, CliError> {
                paths
                    .iter()
                    .map(|p| {
                        let t = read_image(p)?;
                        if t.shape() != shape {
                            return Err(CliError::field(
                                "data.train",
                                format!("{}: image shape {} differs from input shape {shape}", p.display(), t.shape()),
                            ));
                        }
                        Ok(t)
                    })
                    .collect()
            };
            Ok((Dataset::autoencoder(load(train)?), Dataset::autoencoder(load(val)?)))
        }
    }
}

fn unstack(batch: &DenseTensor) -> Vec<DenseTensor> {
    let n = batch.dims()[0];
    let shape = Shape::new(batch.dims()[1..].to_vec()).expect("sample shape");
    batch
        .data()
        .chunks_exact(shape.numel())
        .take(n)
        .map(|c| DenseTensor::from_vec_unchecked_finite(shape.clone(), c.to_vec()).expect("chunk size"))
        .collect()
}

pub(crate) fn train(ctx: &Context, args: &TrainArgs, sink: &mut Sink) -> Result<(), CliError> {
    let net = ctx.config.network(ctx.seed)?;
    let (cfg, section) = ctx.config.train_config(ctx.seed)?;
    let (train_set, val_set) = load_data(ctx, &net)?;
    if let Some(first) = train_set.targets.first() {
        if first.shape() != net.output_shape() {
            return Err(CliError::field(
                "data",
                format!("targets have shape {} but the network outputs {}", first.shape(), net.output_shape()),
            ));
        }
    }
    let model = args.model.clone().or_else(|| section.model.clone()).unwrap_or_else(|| PathBuf::from("model.mlmt"));
    let val = (!val_set.is_empty()).then_some(&val_set);
    let outcome = match crate::nn::train(net, &train_set, val, &cfg) {
        Ok(o) => o,
        Err(e @ NnError::Diverged { .. }) => return Err(failed(e)),
        Err(e @ (NnError::InvalidHyperparameter(_) | NnError::EmptyDataset)) => {
            return Err(CliError::field("train", e))
        }
        Err(e) => return Err(failed(e)),
    };
    for r in &outcome.trace {
        sink.emit(&ctx.record(
            "train",
            "epoch",
            metrics! { "epoch" => r.epoch, "train_loss" => r.train_loss, "val_loss" => r.val_loss },
        ))?;
    }
    let net = &outcome.net;
    let l2 = |d: &Dataset| -> Result<f64, CliError> {
        let (x, y) = d.full_batch().map_err(failed)?;
        net.loss(&x, &y, Loss::L2).map_err(failed)
    };
    let final_train_l2 = l2(&train_set)?;
    let final_val_l2 = val.map(l2).transpose()?;
    let layer_params: Vec<usize> = (0..net.layers().len()).map(|i| net.layer_range(i).len()).collect();
    let head_params: usize = (0..net.layers().len())
        .filter(|&i| net.layers()[i].is_head())
        .map(|i| layer_params[i])
        .sum();
    let written = if net.param_count() > 0 {
        let t = DenseTensor::from_vec(Shape::new(vec![net.param_count()]).expect("nonzero"), net.params().to_vec())
            .map_err(failed)?;
        if let Some(dir) = model.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        }
        write_tensor(&model, &t)?;
        Some(model.display().to_string())
    } else {
        None
    };
    sink.emit(&ctx.record(
        "train",
        "summary",
        metrics! {
            "loss" => cfg.loss.name(),
            "epochs" => cfg.epochs,
            "steps" => outcome.steps,
            "final_train_loss" => outcome.final_train_loss,
            "final_val_loss" => outcome.final_val_loss,
            "final_train_l2" => final_train_l2,
            "final_val_l2" => final_val_l2,
            "layer_params" => layer_params,
            "head_params" => head_params,
            "total_params" => net.param_count(),
            "model" => written,
        },
    ))
}
