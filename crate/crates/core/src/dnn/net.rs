use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::linalg::gemm;
use super::spec::{LayerSpec, NetSpec, Shape};
use crate::seed::{self, stage};
use crate::{Error, Result};

/// Samples per gradient chunk. Chunks are reduced in index order, so the
/// summed gradient does not depend on how many threads ran them.
const GRAD_CHUNK: usize = 8;

/// One learnable tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
    /// Whether L2 applies (weights yes, biases no).
    pub decay: bool,
}

/// Gradients, one vector per [`Param`].
pub type Grads = Vec<Vec<f64>>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pass {
    Inference,
    /// Dropout masks are drawn from `dropout_seed` and the sample's position
    /// in the batch.
    Training {
        dropout_seed: u64,
    },
}

#[derive(Debug, Clone, Copy)]
struct ConvGeom {
    inp: Shape,
    out: Shape,
    k: usize,
    stride: usize,
    pad: usize,
}

impl ConvGeom {
    fn patch(&self) -> usize {
        self.inp.channels * self.k * self.k
    }

    fn positions(&self) -> usize {
        self.out.height * self.out.width
    }

    /// `patch × positions` matrix of input taps, zeros where the window
    /// hangs over the padding.
    fn im2col(&self, x: &[f64]) -> Vec<f64> {
        let (ih, iw) = (self.inp.height as isize, self.inp.width as isize);
        let (oh, ow) = (self.out.height, self.out.width);
        let p = self.positions();
        let mut cols = vec![0.0; self.patch() * p];
        for c in 0..self.inp.channels {
            let plane = &x[c * self.inp.height * self.inp.width..];
            for ky in 0..self.k {
                for kx in 0..self.k {
                    let row = &mut cols[((c * self.k + ky) * self.k + kx) * p..][..p];
                    for oy in 0..oh {
                        let iy = (oy * self.stride + ky) as isize - self.pad as isize;
                        if iy < 0 || iy >= ih {
                            continue;
                        }
                        let src = &plane[iy as usize * iw as usize..];
                        for ox in 0..ow {
                            let ix = (ox * self.stride + kx) as isize - self.pad as isize;
                            if ix >= 0 && ix < iw {
                                row[oy * ow + ox] = src[ix as usize];
                            }
                        }
                    }
                }
            }
        }
        cols
    }

    /// Adjoint of [`im2col`](Self::im2col).
    fn col2im(&self, cols: &[f64]) -> Vec<f64> {
        let (ih, iw) = (self.inp.height as isize, self.inp.width as isize);
        let (oh, ow) = (self.out.height, self.out.width);
        let p = self.positions();
        let mut x = vec![0.0; self.inp.len()];
        for c in 0..self.inp.channels {
            let plane =
                &mut x[c * self.inp.height * self.inp.width..][..self.inp.height * self.inp.width];
            for ky in 0..self.k {
                for kx in 0..self.k {
                    let row = &cols[((c * self.k + ky) * self.k + kx) * p..][..p];
                    for oy in 0..oh {
                        let iy = (oy * self.stride + ky) as isize - self.pad as isize;
                        if iy < 0 || iy >= ih {
                            continue;
                        }
                        let dst = &mut plane[iy as usize * iw as usize..];
                        for ox in 0..ow {
                            let ix = (ox * self.stride + kx) as isize - self.pad as isize;
                            if ix >= 0 && ix < iw {
                                dst[ix as usize] += row[oy * ow + ox];
                            }
                        }
                    }
                }
            }
        }
        x
    }
}

#[derive(Debug, Clone)]
enum Layer {
    Conv {
        geom: ConvGeom,
        w: usize,
        b: usize,
    },
    Relu,
    MaxPool {
        inp: Shape,
        out: Shape,
        k: usize,
        stride: usize,
    },
    Dense {
        n_in: usize,
        n_out: usize,
        w: usize,
        b: usize,
    },
    Dropout {
        rate: f64,
    },
    Softmax,
}

enum Cache {
    Conv(Vec<f64>),
    /// Layer output; the gradient passes where it is positive.
    Relu(Vec<f64>),
    Pool(Vec<usize>),
    Dense(Vec<f64>),
    Dropout(Vec<f64>),
    None,
}

#[derive(Debug, Clone)]
pub struct Network {
    spec: NetSpec,
    layers: Vec<Layer>,
    params: Vec<Param>,
    num_classes: usize,
}

/// Numerically stable softmax; also returns `ln Σ exp(z)`.
fn softmax(z: &[f64]) -> (Vec<f64>, f64) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|&v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    (e.iter().map(|v| v / s).collect(), m + s.ln())
}

impl Network {
    /// Builds the net and draws He-scaled Gaussian weights from
    /// `spec.init_seed`; biases start at zero.
    pub fn new(spec: NetSpec) -> Result<Self> {
        let shapes = spec.shapes()?;
        let mut layers = Vec::with_capacity(spec.layers.len());
        let mut params = Vec::new();
        let mut prev = spec.input;
        for (i, (ls, &out)) in spec.layers.iter().zip(&shapes).enumerate() {
            let layer = match *ls {
                LayerSpec::Conv { kernel, stride, .. } => {
                    let geom = ConvGeom {
                        inp: prev,
                        out,
                        k: kernel,
                        stride,
                        pad: kernel / 2,
                    };
                    let fan_in = geom.patch();
                    params.push(Param {
                        name: format!("conv{i}.weight"),
                        shape: vec![out.channels, prev.channels, kernel, kernel],
                        data: he_init(fan_in, out.channels * fan_in, spec.init_seed, params.len()),
                        decay: true,
                    });
                    params.push(Param {
                        name: format!("conv{i}.bias"),
                        shape: vec![out.channels],
                        data: vec![0.0; out.channels],
                        decay: false,
                    });
                    Layer::Conv {
                        geom,
                        w: params.len() - 2,
                        b: params.len() - 1,
                    }
                }
                LayerSpec::Dense { units } => {
                    let n_in = prev.len();
                    params.push(Param {
                        name: format!("dense{i}.weight"),
                        shape: vec![units, n_in],
                        data: he_init(n_in, units * n_in, spec.init_seed, params.len()),
                        decay: true,
                    });
                    params.push(Param {
                        name: format!("dense{i}.bias"),
                        shape: vec![units],
                        data: vec![0.0; units],
                        decay: false,
                    });
                    Layer::Dense {
                        n_in,
                        n_out: units,
                        w: params.len() - 2,
                        b: params.len() - 1,
                    }
                }
                LayerSpec::MaxPool { kernel, stride } => Layer::MaxPool {
                    inp: prev,
                    out,
                    k: kernel,
                    stride,
                },
                LayerSpec::Relu => Layer::Relu,
                LayerSpec::Dropout { rate } => Layer::Dropout { rate },
                LayerSpec::Softmax => Layer::Softmax,
            };
            layers.push(layer);
            prev = out;
        }
        Ok(Network {
            num_classes: prev.len(),
            spec,
            layers,
            params,
        })
    }

    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn input_len(&self) -> usize {
        self.spec.input.len()
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Param] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.iter().map(|p| p.data.len()).sum()
    }

    /// Σ w² over decayed parameters.
    pub fn weight_norm_sq(&self) -> f64 {
        self.params
            .iter()
            .filter(|p| p.decay)
            .flat_map(|p| &p.data)
            .map(|w| w * w)
            .sum()
    }

    fn check_input(&self, x: &[f64], i: usize) -> Result<()> {
        if x.len() != self.input_len() {
            return Err(Error::Shape(format!(
                "sample {i} has {} values, net expects {} ({:?})",
                x.len(),
                self.input_len(),
                self.spec.input
            )));
        }
        Ok(())
    }

    /// Logits for one sample, with per-layer caches when `keep` is set.
    fn forward_one(
        &self,
        x: &[f64],
        dropout_seed: Option<u64>,
        keep: bool,
    ) -> (Vec<f64>, Vec<Cache>) {
        let mut caches = Vec::with_capacity(if keep { self.layers.len() } else { 0 });
        let mut cur = x.to_vec();
        for (li, layer) in self.layers.iter().enumerate() {
            let (next, cache) = match layer {
                Layer::Conv { geom, w, b } => {
                    let cols = geom.im2col(&cur);
                    let (oc, kk, p) = (geom.out.channels, geom.patch(), geom.positions());
                    let mut out = vec![0.0; oc * p];
                    for (c, &bias) in self.params[*b].data.iter().enumerate() {
                        out[c * p..(c + 1) * p].fill(bias);
                    }
                    gemm(
                        oc,
                        kk,
                        p,
                        &self.params[*w].data,
                        (kk, 1),
                        &cols,
                        (p, 1),
                        1.0,
                        &mut out,
                    );
                    (out, Cache::Conv(cols))
                }
                Layer::Dense { n_in, n_out, w, b } => {
                    let mut out = self.params[*b].data.clone();
                    gemm(
                        *n_out,
                        *n_in,
                        1,
                        &self.params[*w].data,
                        (*n_in, 1),
                        &cur,
                        (1, 1),
                        1.0,
                        &mut out,
                    );
                    (out, Cache::Dense(cur))
                }
                Layer::Relu => {
                    for v in cur.iter_mut() {
                        *v = v.max(0.0);
                    }
                    let c = if keep {
                        Cache::Relu(cur.clone())
                    } else {
                        Cache::None
                    };
                    (cur, c)
                }
                Layer::MaxPool {
                    inp,
                    out,
                    k,
                    stride,
                } => {
                    let mut vals = vec![0.0; out.len()];
                    let mut arg = vec![0usize; out.len()];
                    for c in 0..out.channels {
                        for oy in 0..out.height {
                            for ox in 0..out.width {
                                let mut best = f64::NEG_INFINITY;
                                let mut at = 0;
                                for ky in 0..*k {
                                    for kx in 0..*k {
                                        let idx = (c * inp.height + oy * stride + ky) * inp.width
                                            + ox * stride
                                            + kx;
                                        if cur[idx] > best {
                                            best = cur[idx];
                                            at = idx;
                                        }
                                    }
                                }
                                let o = (c * out.height + oy) * out.width + ox;
                                vals[o] = best;
                                arg[o] = at;
                            }
                        }
                    }
                    (vals, Cache::Pool(arg))
                }
                Layer::Dropout { rate } => match dropout_seed {
                    Some(s) if *rate > 0.0 => {
                        let mut rng = seed::rng(seed::derive(s, &[stage::DROPOUT, li as u64]));
                        let scale = 1.0 / (1.0 - rate);
                        let mask: Vec<f64> = (0..cur.len())
                            .map(|_| {
                                if rng.random::<f64>() < *rate {
                                    0.0
                                } else {
                                    scale
                                }
                            })
                            .collect();
                        let out = cur.iter().zip(&mask).map(|(v, m)| v * m).collect();
                        (out, Cache::Dropout(mask))
                    }
                    _ => (cur, Cache::None),
                },
                Layer::Softmax => (cur, Cache::None),
            };
            cur = next;
            if keep {
                caches.push(cache);
            }
        }
        (cur, caches)
    }

    /// Back-propagates `dlogits` for one sample and adds into `grads`.
    fn backward_one(&self, caches: Vec<Cache>, dlogits: Vec<f64>, grads: &mut Grads) {
        let mut d = dlogits;
        for (layer, cache) in self.layers.iter().zip(caches).rev() {
            d = match (layer, cache) {
                (Layer::Softmax, _) => d,
                (Layer::Conv { geom, w, b }, Cache::Conv(cols)) => {
                    let (oc, kk, p) = (geom.out.channels, geom.patch(), geom.positions());
                    for (c, g) in grads[*b].iter_mut().enumerate() {
                        *g += d[c * p..(c + 1) * p].iter().sum::<f64>();
                    }
                    gemm(oc, p, kk, &d, (p, 1), &cols, (1, p), 1.0, &mut grads[*w]);
                    let mut dcols = vec![0.0; kk * p];
                    gemm(
                        kk,
                        oc,
                        p,
                        &self.params[*w].data,
                        (1, kk),
                        &d,
                        (p, 1),
                        0.0,
                        &mut dcols,
                    );
                    geom.col2im(&dcols)
                }
                (Layer::Dense { n_in, n_out, w, b }, Cache::Dense(x)) => {
                    for (g, v) in grads[*b].iter_mut().zip(&d) {
                        *g += v;
                    }
                    gemm(
                        *n_out,
                        1,
                        *n_in,
                        &d,
                        (1, 1),
                        &x,
                        (*n_in, 1),
                        1.0,
                        &mut grads[*w],
                    );
                    let mut dx = vec![0.0; *n_in];
                    gemm(
                        *n_in,
                        *n_out,
                        1,
                        &self.params[*w].data,
                        (1, *n_in),
                        &d,
                        (1, 1),
                        0.0,
                        &mut dx,
                    );
                    dx
                }
                (Layer::Relu, Cache::Relu(out)) => {
                    for (g, o) in d.iter_mut().zip(&out) {
                        if *o <= 0.0 {
                            *g = 0.0;
                        }
                    }
                    d
                }
                (Layer::MaxPool { inp, .. }, Cache::Pool(arg)) => {
                    let mut dx = vec![0.0; inp.len()];
                    for (g, &a) in d.iter().zip(&arg) {
                        dx[a] += g;
                    }
                    dx
                }
                (Layer::Dropout { .. }, Cache::Dropout(mask)) => {
                    d.iter().zip(&mask).map(|(g, m)| g * m).collect()
                }
                (Layer::Dropout { .. }, Cache::None) => d,
                _ => unreachable!("cache does not match layer"),
            };
        }
    }

    /// Class probabilities, one row per sample.
    pub fn forward<S: AsRef<[f64]> + Sync>(&self, batch: &[S]) -> Result<Vec<Vec<f64>>> {
        for (i, x) in batch.iter().enumerate() {
            self.check_input(x.as_ref(), i)?;
        }
        Ok(batch
            .par_iter()
            .map(|x| softmax(&self.forward_one(x.as_ref(), None, false).0).0)
            .collect())
    }

    /// Mean cross-entropy plus `(l2 / 2)·Σ w²`, and its gradient for every
    /// parameter.
    pub fn loss_and_grads<S: AsRef<[f64]> + Sync>(
        &self,
        batch: &[S],
        labels: &[usize],
        l2: f64,
        pass: Pass,
    ) -> Result<(f64, Grads)> {
        self.check_batch(batch, labels)?;
        let n = batch.len() as f64;
        let dropout = match pass {
            Pass::Inference => None,
            Pass::Training { dropout_seed } => Some(dropout_seed),
        };
        let zero = || -> Grads {
            self.params
                .iter()
                .map(|p| vec![0.0; p.data.len()])
                .collect()
        };
        let partial: Vec<(f64, Grads)> = batch
            .par_chunks(GRAD_CHUNK)
            .zip(labels.par_chunks(GRAD_CHUNK))
            .enumerate()
            .map(|(ci, (xs, ys))| {
                let mut g = zero();
                let mut loss = 0.0;
                for (j, (x, &y)) in xs.iter().zip(ys).enumerate() {
                    let idx = (ci * GRAD_CHUNK + j) as u64;
                    let seed = dropout.map(|s| seed::derive(s, &[idx]));
                    let (logits, caches) = self.forward_one(x.as_ref(), seed, true);
                    let (mut p, lse) = softmax(&logits);
                    loss += lse - logits[y];
                    p[y] -= 1.0;
                    for v in p.iter_mut() {
                        *v /= n;
                    }
                    self.backward_one(caches, p, &mut g);
                }
                (loss, g)
            })
            .collect();
        let mut grads = zero();
        let mut ce = 0.0;
        for (loss, g) in partial {
            ce += loss;
            for (acc, v) in grads.iter_mut().zip(g) {
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b;
                }
            }
        }
        let mut loss = ce / n;
        if l2 != 0.0 {
            loss += 0.5 * l2 * self.weight_norm_sq();
            for (g, p) in grads.iter_mut().zip(&self.params) {
                if p.decay {
                    for (a, w) in g.iter_mut().zip(&p.data) {
                        *a += l2 * w;
                    }
                }
            }
        }
        Ok((loss, grads))
    }

    /// Mean cross-entropy (no L2) and accuracy at inference.
    pub fn loss_and_accuracy<S: AsRef<[f64]> + Sync>(
        &self,
        batch: &[S],
        labels: &[usize],
    ) -> Result<(f64, f64)> {
        self.check_batch(batch, labels)?;
        let per: Vec<(f64, bool)> = batch
            .par_iter()
            .zip(labels.par_iter())
            .map(|(x, &y)| {
                let logits = self.forward_one(x.as_ref(), None, false).0;
                let (p, lse) = softmax(&logits);
                (lse - logits[y], argmax(&p) == y)
            })
            .collect();
        let n = per.len() as f64;
        let loss = per.iter().map(|r| r.0).sum::<f64>() / n;
        let acc = per.iter().filter(|r| r.1).count() as f64 / n;
        Ok((loss, acc))
    }

    fn check_batch<S: AsRef<[f64]>>(&self, batch: &[S], labels: &[usize]) -> Result<()> {
        if batch.is_empty() {
            return Err(Error::EmptyInput("batch"));
        }
        if batch.len() != labels.len() {
            return Err(Error::Length(format!(
                "{} samples but {} labels",
                batch.len(),
                labels.len()
            )));
        }
        for (i, x) in batch.iter().enumerate() {
            self.check_input(x.as_ref(), i)?;
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= self.num_classes) {
            return Err(Error::param(format!(
                "label {bad} out of range for {} classes",
                self.num_classes
            )));
        }
        Ok(())
    }
}

/// Index of the largest value; the first one on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn he_init(fan_in: usize, n: usize, init_seed: u64, param_index: usize) -> Vec<f64> {
    let mut rng = seed::rng(seed::derive(init_seed, &[stage::INIT, param_index as u64]));
    let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("positive std");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}
