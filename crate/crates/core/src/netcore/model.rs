use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kernels::{col2im, gemm, im2col, max_pool, softmax};
use super::loss::{check_targets, LOG_CLIP};
use super::spec::{ActShape, LayerSpec, ModelSpec};
use crate::error::{Error, Result};
use crate::label::{SoftLabel, NUM_CLASSES};
use crate::tensor::Tensor;

/// A [`ModelSpec`] together with its parameter tensors
/// (weight then bias for every conv/dense layer, in layer order).
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    spec: ModelSpec,
    params: Vec<Tensor>,
    shapes: Vec<ActShape>,
    /// Index of each layer's weight tensor in `params`.
    weight_slot: Vec<Option<usize>>,
}

impl Model {
    /// He-uniform initialisation (`U(-sqrt(6/fan_in), sqrt(6/fan_in))`), zero biases.
    pub fn new(spec: ModelSpec, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::new();
        for layer in &spec.layers {
            let shapes = layer.param_shapes();
            if shapes.is_empty() {
                continue;
            }
            let limit = (6.0 / layer.fan_in() as f64).sqrt();
            let mut weight = Tensor::zeros(&shapes[0]);
            for w in weight.data_mut() {
                *w = rng.random_range(-limit..limit);
            }
            params.push(weight);
            params.push(Tensor::zeros(&shapes[1]));
        }
        Model::from_params(spec, params)
    }

    pub fn zeros(spec: ModelSpec) -> Result<Self> {
        let params = spec.param_shapes().iter().map(|s| Tensor::zeros(s)).collect();
        Model::from_params(spec, params)
    }

    /// Binds parameter tensors to a spec, naming the first layer whose
    /// parameters do not fit.
    pub fn from_params(spec: ModelSpec, params: Vec<Tensor>) -> Result<Self> {
        spec.validate()?;
        let shapes = spec.activation_shapes()?;
        let mut weight_slot = Vec::with_capacity(spec.layers.len());
        let mut slot = 0;
        for (i, layer) in spec.layers.iter().enumerate() {
            let expected = layer.param_shapes();
            if expected.is_empty() {
                weight_slot.push(None);
                continue;
            }
            for (j, shape) in expected.iter().enumerate() {
                match params.get(slot + j) {
                    Some(t) if t.shape() == shape.as_slice() => {}
                    Some(t) => {
                        return Err(Error::SpecMismatch {
                            layer: i,
                            detail: format!(
                                "{} parameter {j} has shape {:?}, expected {shape:?}",
                                layer.name(),
                                t.shape()
                            ),
                        })
                    }
                    None => {
                        return Err(Error::SpecMismatch {
                            layer: i,
                            detail: format!("missing {} parameter {j}", layer.name()),
                        })
                    }
                }
            }
            weight_slot.push(Some(slot));
            slot += expected.len();
        }
        if slot != params.len() {
            return Err(Error::SpecMismatch {
                layer: spec.layers.len(),
                detail: format!("{} extra parameter tensors", params.len() - slot),
            });
        }
        Ok(Model {
            spec,
            params,
            shapes,
            weight_slot,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn params(&self) -> &[Tensor] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Tensor] {
        &mut self.params
    }

    pub fn into_params(self) -> Vec<Tensor> {
        self.params
    }

    fn check_batch(&self, batch: &Tensor) -> Result<usize> {
        let s = batch.shape();
        let expected = [
            self.spec.input_channels,
            self.spec.input_height,
            self.spec.input_width,
        ];
        if s.len() != 4 || s[1..] != expected {
            return Err(Error::LayerShape {
                layer: 0,
                detail: format!("batch shape {s:?} does not match input [N, {expected:?}]"),
            });
        }
        Ok(s[0])
    }

    /// Class probabilities, shape `[N, 4]`.
    pub fn forward(&self, batch: &Tensor) -> Result<Tensor> {
        let n = self.check_batch(batch)?;
        let mut trace = Trace::new(&self.shapes, &self.spec.layers);
        let mut out = Vec::with_capacity(n * NUM_CLASSES);
        for i in 0..n {
            let probs = self.forward_sample(batch.row(i), &mut trace);
            out.extend_from_slice(&probs);
        }
        Tensor::from_vec(&[n, NUM_CLASSES], out)
    }

    /// Argmax class index per sample.
    pub fn predict(&self, batch: &Tensor) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.forward(batch)?))
    }

    /// Mean soft cross-entropy over the batch and its gradient with respect to
    /// every parameter tensor (same order and shapes as [`Model::params`]).
    pub fn backward(&self, batch: &Tensor, targets: &[SoftLabel]) -> Result<(f64, Vec<Tensor>)> {
        let out = self.loss_and_grad(batch, targets)?;
        Ok((out.loss, out.grads))
    }

    /// [`Model::backward`] that also returns the forward probabilities.
    pub fn loss_and_grad(&self, batch: &Tensor, targets: &[SoftLabel]) -> Result<LossGrad> {
        let n = self.check_batch(batch)?;
        if targets.len() != n {
            return Err(Error::Shape(format!(
                "{} targets for a batch of {n}",
                targets.len()
            )));
        }
        let raw: Vec<[f64; NUM_CLASSES]> = targets.iter().map(|t| *t.probs()).collect();
        check_targets(&raw)?;
        let mut grads: Vec<Tensor> = self.params.iter().map(|p| Tensor::zeros(p.shape())).collect();
        let mut trace = Trace::new(&self.shapes, &self.spec.layers);
        let mut loss = 0.0;
        let mut all_probs = Vec::with_capacity(n * NUM_CLASSES);
        let scale = 1.0 / n as f64;
        for (i, target) in raw.iter().enumerate() {
            let probs = self.forward_sample(batch.row(i), &mut trace);
            let mut sample_loss = 0.0;
            let mut dlogits = [0.0; NUM_CLASSES];
            for c in 0..NUM_CLASSES {
                sample_loss -= target[c] * probs[c].max(LOG_CLIP).ln();
                dlogits[c] = (probs[c] - target[c]) * scale;
            }
            loss += sample_loss;
            all_probs.extend_from_slice(&probs);
            self.backward_sample(&mut trace, &dlogits, &mut grads);
        }
        Ok(LossGrad {
            loss: loss * scale,
            grads,
            probs: Tensor::from_vec(&[n, NUM_CLASSES], all_probs)?,
        })
    }

    fn forward_sample(&self, input: &[f64], trace: &mut Trace) -> [f64; NUM_CLASSES] {
        trace.acts[0].copy_from_slice(input);
        for (i, layer) in self.spec.layers.iter().enumerate() {
            let (before, after) = trace.acts.split_at_mut(i + 1);
            let x = &before[i];
            let y = &mut after[0];
            match (*layer, self.shapes[i]) {
                (
                    LayerSpec::Conv2d { out_channels, .. },
                    ActShape::Spatial {
                        channels,
                        height,
                        width,
                    },
                ) => {
                    let hw = height * width;
                    let cols = &mut trace.cols[i];
                    im2col(x, channels, height, width, cols);
                    let slot = self.weight_slot[i].expect("conv has parameters");
                    let weight = self.params[slot].data();
                    let bias = self.params[slot + 1].data();
                    for (o, b) in bias.iter().enumerate() {
                        y[o * hw..(o + 1) * hw].fill(*b);
                    }
                    gemm(out_channels, channels * 9, hw, weight, (channels * 9, 1), cols, (hw, 1), 1.0, y);
                }
                (LayerSpec::Relu, _) => {
                    for (o, &v) in y.iter_mut().zip(x.iter()) {
                        *o = v.max(0.0);
                    }
                }
                (
                    LayerSpec::MaxPool,
                    ActShape::Spatial {
                        channels,
                        height,
                        width,
                    },
                ) => max_pool(x, channels, height, width, y, &mut trace.argmax[i]),
                (
                    LayerSpec::GlobalAvgPool,
                    ActShape::Spatial {
                        channels,
                        height,
                        width,
                    },
                ) => {
                    let hw = height * width;
                    for c in 0..channels {
                        y[c] = x[c * hw..(c + 1) * hw].iter().sum::<f64>() / hw as f64;
                    }
                }
                (LayerSpec::Dense { inputs, outputs }, _) => {
                    let slot = self.weight_slot[i].expect("dense has parameters");
                    let weight = self.params[slot].data();
                    let bias = self.params[slot + 1].data();
                    for o in 0..outputs {
                        let row = &weight[o * inputs..(o + 1) * inputs];
                        y[o] = bias[o] + row.iter().zip(x.iter()).map(|(w, v)| w * v).sum::<f64>();
                    }
                }
                _ => unreachable!("shapes validated at construction"),
            }
        }
        let logits = trace.acts.last().expect("at least one activation");
        let mut probs = [0.0; NUM_CLASSES];
        softmax(logits, &mut probs);
        probs
    }

    fn backward_sample(&self, trace: &mut Trace, dlogits: &[f64; NUM_CLASSES], grads: &mut [Tensor]) {
        let last = self.spec.layers.len();
        trace.grads[last].copy_from_slice(dlogits);
        for (i, layer) in self.spec.layers.iter().enumerate().rev() {
            let (before, after) = trace.grads.split_at_mut(i + 1);
            let dx = &mut before[i];
            let dy = &after[0];
            let x = &trace.acts[i];
            let need_dx = i > 0;
            match (*layer, self.shapes[i]) {
                (
                    LayerSpec::Conv2d { out_channels, .. },
                    ActShape::Spatial {
                        channels,
                        height,
                        width,
                    },
                ) => {
                    let hw = height * width;
                    let k = channels * 9;
                    let slot = self.weight_slot[i].expect("conv has parameters");
                    let cols = &trace.cols[i];
                    {
                        let (gw, gb) = grads[slot..slot + 2].split_at_mut(1);
                        for (o, b) in gb[0].data_mut().iter_mut().enumerate() {
                            *b += dy[o * hw..(o + 1) * hw].iter().sum::<f64>();
                        }
                        // dW[o, r] += sum_p dY[o, p] * cols[r, p]
                        gemm(out_channels, hw, k, dy, (hw, 1), cols, (1, hw), 1.0, gw[0].data_mut());
                    }
                    if need_dx {
                        let dcols = &mut trace.dcols[i];
                        // dcols[r, p] = sum_o W[o, r] * dY[o, p]
                        gemm(k, out_channels, hw, self.params[slot].data(), (1, k), dy, (hw, 1), 0.0, dcols);
                        col2im(dcols, channels, height, width, dx);
                    }
                }
                (LayerSpec::Relu, _) => {
                    if need_dx {
                        for ((d, &g), &v) in dx.iter_mut().zip(dy.iter()).zip(x.iter()) {
                            *d = if v > 0.0 { g } else { 0.0 };
                        }
                    }
                }
                (LayerSpec::MaxPool, _) => {
                    if need_dx {
                        dx.fill(0.0);
                        for (&g, &idx) in dy.iter().zip(&trace.argmax[i]) {
                            dx[idx] += g;
                        }
                    }
                }
                (
                    LayerSpec::GlobalAvgPool,
                    ActShape::Spatial {
                        channels,
                        height,
                        width,
                    },
                ) => {
                    if need_dx {
                        let hw = height * width;
                        for c in 0..channels {
                            dx[c * hw..(c + 1) * hw].fill(dy[c] / hw as f64);
                        }
                    }
                }
                (LayerSpec::Dense { inputs, outputs }, _) => {
                    let slot = self.weight_slot[i].expect("dense has parameters");
                    {
                        let (gw, gb) = grads[slot..slot + 2].split_at_mut(1);
                        let gw = gw[0].data_mut();
                        let gb = gb[0].data_mut();
                        for o in 0..outputs {
                            gb[o] += dy[o];
                            for j in 0..inputs {
                                gw[o * inputs + j] += dy[o] * x[j];
                            }
                        }
                    }
                    if need_dx {
                        let weight = self.params[slot].data();
                        for j in 0..inputs {
                            dx[j] = (0..outputs).map(|o| weight[o * inputs + j] * dy[o]).sum();
                        }
                    }
                }
                _ => unreachable!("shapes validated at construction"),
            }
        }
    }
}

/// Index of the largest entry of each row (first on ties).
pub fn argmax_rows(probs: &Tensor) -> Vec<usize> {
    (0..probs.shape()[0])
        .map(|i| {
            let row = probs.row(i);
            let mut best = 0;
            for c in 1..row.len() {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Loss, parameter gradients and forward probabilities of one batch.
#[derive(Debug, Clone)]
pub struct LossGrad {
    pub loss: f64,
    pub grads: Vec<Tensor>,
    /// `[N, 4]`.
    pub probs: Tensor,
}

/// Per-sample scratch buffers reused across a batch.
struct Trace {
    acts: Vec<Vec<f64>>,
    grads: Vec<Vec<f64>>,
    cols: Vec<Vec<f64>>,
    dcols: Vec<Vec<f64>>,
    argmax: Vec<Vec<usize>>,
}

impl Trace {
    fn new(shapes: &[ActShape], layers: &[LayerSpec]) -> Self {
        let acts: Vec<Vec<f64>> = shapes.iter().map(|s| vec![0.0; s.len()]).collect();
        let grads = acts.clone();
        let mut cols = Vec::with_capacity(layers.len());
        let mut argmax = Vec::with_capacity(layers.len());
        for (layer, shape) in layers.iter().zip(shapes) {
            match layer {
                LayerSpec::Conv2d { .. } => {
                    cols.push(vec![0.0; shape.len() * 9]);
                    argmax.push(Vec::new());
                }
                LayerSpec::MaxPool => {
                    cols.push(Vec::new());
                    argmax.push(vec![0; shape.len() / 4]);
                }
                _ => {
                    cols.push(Vec::new());
                    argmax.push(Vec::new());
                }
            }
        }
        let dcols = cols.clone();
        Trace {
            acts,
            grads,
            cols,
            dcols,
            argmax,
        }
    }
}
