//! Per-sample kernels. Activations are flat row-major slices; shapes come
//! from the network's shape inference.

use super::layer::Activation;

pub(crate) fn affine(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let d = x.len();
    for (r, (o, &bias)) in out.iter_mut().zip(b).enumerate() {
        let row = &w[r * d..(r + 1) * d];
        *o = bias + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Accumulates `gW += g xᵀ`, `gb += g`, `gx += Wᵀ g`.
pub(crate) fn affine_backward(
    w: &[f64],
    x: &[f64],
    g: &[f64],
    gw: &mut [f64],
    gb: &mut [f64],
    gx: &mut [f64],
) {
    let d = x.len();
    for (r, &gr) in g.iter().enumerate() {
        gb[r] += gr;
        if gr == 0.0 {
            continue;
        }
        let row = &w[r * d..(r + 1) * d];
        let grow = &mut gw[r * d..(r + 1) * d];
        for ((gwv, &xv), (gxv, &wv)) in grow.iter_mut().zip(x).zip(gx.iter_mut().zip(row)) {
            *gwv += gr * xv;
            *gxv += gr * wv;
        }
    }
}

pub(crate) fn activate(f: Activation, z: &[f64]) -> Vec<f64> {
    z.iter().map(|&v| f.apply(v)).collect()
}

pub(crate) fn activate_backward(f: Activation, z: &[f64], a: &[f64], g: &[f64]) -> Vec<f64> {
    z.iter().zip(a).zip(g).map(|((&z, &a), &g)| g * f.derivative(z, a)).collect()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ConvGeometry {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kh: usize,
    pub kw: usize,
    pub height: usize,
    pub width: usize,
}

impl ConvGeometry {
    fn pad(&self) -> (isize, isize) {
        (((self.kh - 1) / 2) as isize, ((self.kw - 1) / 2) as isize)
    }
}

/// Stride-1 convolution (cross-correlation) with zero same-padding.
pub(crate) fn conv2d(g: ConvGeometry, w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let (h, wd) = (g.height, g.width);
    let (ph, pw) = g.pad();
    let mut out = vec![0.0; g.out_channels * h * wd];
    for co in 0..g.out_channels {
        let plane = &mut out[co * h * wd..(co + 1) * h * wd];
        plane.iter_mut().for_each(|v| *v = b[co]);
        for ci in 0..g.in_channels {
            let xin = &x[ci * h * wd..(ci + 1) * h * wd];
            for ky in 0..g.kh {
                for kx in 0..g.kw {
                    let wv = w[((co * g.in_channels + ci) * g.kh + ky) * g.kw + kx];
                    if wv == 0.0 {
                        continue;
                    }
                    let dy = ky as isize - ph;
                    let dx = kx as isize - pw;
                    for y in 0..h {
                        let sy = y as isize + dy;
                        if sy < 0 || sy >= h as isize {
                            continue;
                        }
                        for xx in 0..wd {
                            let sx = xx as isize + dx;
                            if sx < 0 || sx >= wd as isize {
                                continue;
                            }
                            plane[y * wd + xx] += wv * xin[sy as usize * wd + sx as usize];
                        }
                    }
                }
            }
        }
    }
    out
}

pub(crate) fn conv2d_backward(
    g: ConvGeometry,
    w: &[f64],
    x: &[f64],
    grad_out: &[f64],
    gw: &mut [f64],
    gb: &mut [f64],
) -> Vec<f64> {
    let (h, wd) = (g.height, g.width);
    let (ph, pw) = g.pad();
    let mut gx = vec![0.0; g.in_channels * h * wd];
    for co in 0..g.out_channels {
        let gplane = &grad_out[co * h * wd..(co + 1) * h * wd];
        gb[co] += gplane.iter().sum::<f64>();
        for ci in 0..g.in_channels {
            let xin = &x[ci * h * wd..(ci + 1) * h * wd];
            for ky in 0..g.kh {
                for kx in 0..g.kw {
                    let widx = ((co * g.in_channels + ci) * g.kh + ky) * g.kw + kx;
                    let wv = w[widx];
                    let dy = ky as isize - ph;
                    let dx = kx as isize - pw;
                    let mut acc = 0.0;
                    for y in 0..h {
                        let sy = y as isize + dy;
                        if sy < 0 || sy >= h as isize {
                            continue;
                        }
                        for xx in 0..wd {
                            let sx = xx as isize + dx;
                            if sx < 0 || sx >= wd as isize {
                                continue;
                            }
                            let src = sy as usize * wd + sx as usize;
                            let gv = gplane[y * wd + xx];
                            acc += gv * xin[src];
                            gx[ci * h * wd + src] += gv * wv;
                        }
                    }
                    gw[widx] += acc;
                }
            }
        }
    }
    gx
}

/// 2×2 stride-2 max pooling over a `C × H × W` input. Returns the pooled
/// values and, per output cell, the flat input index that won (first in
/// row-major order on ties).
pub(crate) fn maxpool2(channels: usize, height: usize, width: usize, x: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let (oh, ow) = (height / 2, width / 2);
    let mut out = Vec::with_capacity(channels * oh * ow);
    let mut arg = Vec::with_capacity(channels * oh * ow);
    for c in 0..channels {
        for i in 0..oh {
            for j in 0..ow {
                let mut best = c * height * width + 2 * i * width + 2 * j;
                for (di, dj) in [(0, 1), (1, 0), (1, 1)] {
                    let k = c * height * width + (2 * i + di) * width + 2 * j + dj;
                    if x[k] > x[best] {
                        best = k;
                    }
                }
                out.push(x[best]);
                arg.push(best);
            }
        }
    }
    (out, arg)
}

pub(crate) fn maxpool2_backward(input_len: usize, arg: &[usize], grad_out: &[f64]) -> Vec<f64> {
    let mut gx = vec![0.0; input_len];
    for (&k, &g) in arg.iter().zip(grad_out) {
        gx[k] += g;
    }
    gx
}

/// Writes each value to the top-left cell of its 2×2 block; the other three
/// cells are zero.
pub(crate) fn unpool2(channels: usize, height: usize, width: usize, x: &[f64]) -> Vec<f64> {
    let (oh, ow) = (height * 2, width * 2);
    let mut out = vec![0.0; channels * oh * ow];
    for c in 0..channels {
        for i in 0..height {
            for j in 0..width {
                out[c * oh * ow + 2 * i * ow + 2 * j] = x[c * height * width + i * width + j];
            }
        }
    }
    out
}

pub(crate) fn unpool2_backward(channels: usize, height: usize, width: usize, grad_out: &[f64]) -> Vec<f64> {
    let (oh, ow) = (height * 2, width * 2);
    let mut gx = vec![0.0; channels * height * width];
    for c in 0..channels {
        for i in 0..height {
            for j in 0..width {
                gx[c * height * width + i * width + j] = grad_out[c * oh * ow + 2 * i * ow + 2 * j];
            }
        }
    }
    gx
}
