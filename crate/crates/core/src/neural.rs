//! A small fully connected network with exact backpropagation.
//!
//! Parameters live in one flat buffer: every layer's weight matrix
//! (row-major, `out × in`) in order, followed by every layer's bias vector.
//! That is also the on-disk payload order, and it makes soft updates and Adam
//! plain element-wise loops.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const LEAKY_SLOPE: f64 = 0.01;

const MAGIC: &[u8; 5] = b"RLAMW";
const VERSION: u8 = b'1';

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("expected input of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("backward called without a recorded forward pass")]
    NoForwardPass,
    #[error("parameter shapes do not match: {0}")]
    ShapeMismatch(String),
    #[error("not a weights file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported weights format version `{0}`")]
    VersionMismatch(char),
    #[error("weights file is truncated")]
    Truncated,
    #[error("unknown output activation tag {0}")]
    BadActivationTag(u8),
    #[error("invalid layer layout: {0}")]
    InvalidLayout(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    Tanh,
    Identity,
}

impl OutputActivation {
    fn tag(self) -> u8 {
        match self {
            OutputActivation::Tanh => 0,
            OutputActivation::Identity => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self, NeuralError> {
        match tag {
            0 => Ok(OutputActivation::Tanh),
            1 => Ok(OutputActivation::Identity),
            other => Err(NeuralError::BadActivationTag(other)),
        }
    }
}

/// Feed-forward network: leaky-ReLU between layers, `output` at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    dims: Vec<usize>,
    output: OutputActivation,
    params: Vec<f64>,
    weight_offsets: Vec<usize>,
    bias_offsets: Vec<usize>,
}

fn layout(dims: &[usize]) -> (Vec<usize>, Vec<usize>, usize) {
    let mut weight_offsets = Vec::with_capacity(dims.len() - 1);
    let mut offset = 0;
    for w in dims.windows(2) {
        weight_offsets.push(offset);
        offset += w[0] * w[1];
    }
    let mut bias_offsets = Vec::with_capacity(dims.len() - 1);
    for &out in &dims[1..] {
        bias_offsets.push(offset);
        offset += out;
    }
    (weight_offsets, bias_offsets, offset)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn check_dims(dims: &[usize]) -> Result<(), NeuralError> {
    if dims.len() < 2 {
        return Err(NeuralError::InvalidLayout(format!(
            "need at least 2 layer sizes, got {}",
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(NeuralError::InvalidLayout("layer size 0".into()));
    }
    Ok(())
}

impl Mlp {
    /// All-zero network.
    pub fn zeros(dims: &[usize], output: OutputActivation) -> Result<Self, NeuralError> {
        check_dims(dims)?;
        let (weight_offsets, bias_offsets, total) = layout(dims);
        Ok(Mlp {
            dims: dims.to_vec(),
            output,
            params: vec![0.0; total],
            weight_offsets,
            bias_offsets,
        })
    }

    /// Uniform initialization in `±1/√fan_in` for weights and biases.
    pub fn new(dims: &[usize], output: OutputActivation, seed: u64) -> Result<Self, NeuralError> {
        let mut net = Self::zeros(dims, output)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in 0..net.num_layers() {
            let bound = 1.0 / (net.dims[layer] as f64).sqrt();
            let (w, _) = net.layer_ranges(layer);
            for p in &mut net.params[w] {
                *p = rng.random_range(-bound..bound);
            }
        }
        for layer in 0..net.num_layers() {
            let bound = 1.0 / (net.dims[layer] as f64).sqrt();
            let (_, b) = net.layer_ranges(layer);
            for p in &mut net.params[b] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub fn from_params(dims: &[usize], output: OutputActivation, params: Vec<f64>) -> Result<Self, NeuralError> {
        let mut net = Self::zeros(dims, output)?;
        if params.len() != net.params.len() {
            return Err(NeuralError::ShapeMismatch(format!(
                "{} parameters for a layout needing {}",
                params.len(),
                net.params.len()
            )));
        }
        net.params = params;
        Ok(net)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        self.dims[self.dims.len() - 1]
    }

    /// Number of weight layers.
    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.dims == other.dims && self.output == other.output
    }

    fn layer_ranges(&self, layer: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let (inp, out) = (self.dims[layer], self.dims[layer + 1]);
        let w = self.weight_offsets[layer];
        let b = self.bias_offsets[layer];
        (w..w + inp * out, b..b + out)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.run(x, None)
    }

    /// Forward pass that caches activations on `tape` for a later [`Mlp::backward`].
    pub fn forward_recorded(&self, x: &[f64], tape: &mut GradientTape) -> Result<Vec<f64>, NeuralError> {
        if tape.grads.len() != self.params.len() {
            return Err(NeuralError::ShapeMismatch("tape belongs to another network".into()));
        }
        self.run(x, Some(tape))
    }

    fn run(&self, x: &[f64], mut tape: Option<&mut GradientTape>) -> Result<Vec<f64>, NeuralError> {
        if x.len() != self.input_dim() {
            return Err(NeuralError::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let mut cache = Vec::with_capacity(self.num_layers() + 1);
        let mut act = x.to_vec();
        let last = self.num_layers() - 1;
        for layer in 0..self.num_layers() {
            let (wr, br) = self.layer_ranges(layer);
            let weights = &self.params[wr];
            let biases = &self.params[br];
            let mut z: Vec<f64> = weights
                .chunks_exact(act.len())
                .zip(biases)
                .map(|(row, b)| dot(row, &act) + b)
                .collect();
            let prev = std::mem::take(&mut act);
            if tape.is_some() {
                cache.push(prev);
            }
            if layer == last {
                if self.output == OutputActivation::Tanh {
                    z.iter_mut().for_each(|v| *v = v.tanh());
                }
            } else {
                z.iter_mut().for_each(|v| {
                    if *v < 0.0 {
                        *v *= LEAKY_SLOPE
                    }
                });
            }
            act = z;
        }
        if let Some(tape) = tape.as_deref_mut() {
            cache.push(act.clone());
            tape.activations = Some(cache);
        }
        Ok(act)
    }

    /// Backpropagates `output_grad` (∂L/∂output) through the pass recorded
    /// on `tape`, accumulating parameter gradients there, and returns ∂L/∂input.
    pub fn backward(&self, tape: &mut GradientTape, output_grad: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.backprop(tape, output_grad, true)
    }

    /// Like [`Mlp::backward`] but only computes ∂L/∂input; the tape's
    /// parameter gradients are left untouched.
    pub fn input_gradient(&self, tape: &mut GradientTape, output_grad: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.backprop(tape, output_grad, false)
    }

    fn backprop(
        &self,
        tape: &mut GradientTape,
        output_grad: &[f64],
        accumulate: bool,
    ) -> Result<Vec<f64>, NeuralError> {
        let acts = tape.activations.take().ok_or(NeuralError::NoForwardPass)?;
        if output_grad.len() != self.output_dim() {
            return Err(NeuralError::DimensionMismatch {
                expected: self.output_dim(),
                got: output_grad.len(),
            });
        }
        let last = self.num_layers() - 1;
        let out = &acts[last + 1];
        // ∂L/∂z for the output layer.
        let mut delta: Vec<f64> = match self.output {
            OutputActivation::Tanh => output_grad
                .iter()
                .zip(out)
                .map(|(g, y)| g * (1.0 - y * y))
                .collect(),
            OutputActivation::Identity => output_grad.to_vec(),
        };
        for layer in (0..=last).rev() {
            let (wr, br) = self.layer_ranges(layer);
            let input = &acts[layer];
            let n_in = input.len();
            if accumulate {
                for (j, d) in delta.iter().enumerate() {
                    tape.grads[br.start + j] += d;
                    let row = &mut tape.grads[wr.start + j * n_in..wr.start + (j + 1) * n_in];
                    for (g, a) in row.iter_mut().zip(input) {
                        *g += d * a;
                    }
                }
            }
            let weights = &self.params[wr];
            let mut grad_in = vec![0.0; n_in];
            for (row, d) in weights.chunks_exact(n_in).zip(&delta) {
                for (g, w) in grad_in.iter_mut().zip(row) {
                    *g += d * w;
                }
            }
            if layer > 0 {
                // Leaky-ReLU derivative, read off the sign of the post-activation.
                for (g, a) in grad_in.iter_mut().zip(input) {
                    if *a < 0.0 {
                        *g *= LEAKY_SLOPE;
                    }
                }
            }
            delta = grad_in;
        }
        Ok(delta)
    }

    /// `θ ← τ·source + (1 − τ)·θ`.
    pub fn soft_update_from(&mut self, source: &Mlp, tau: f64) -> Result<(), NeuralError> {
        if !self.same_shape(source) {
            return Err(NeuralError::ShapeMismatch("soft update between different layouts".into()));
        }
        for (t, s) in self.params.iter_mut().zip(&source.params) {
            *t = tau * s + (1.0 - tau) * *t;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + 4 * (self.dims.len() + 1) + 1 + 8 * self.params.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.num_layers() as u32).to_le_bytes());
        for &d in &self.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        out.push(self.output.tag());
        for p in &self.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NeuralError> {
        let mut reader = ByteReader { bytes, pos: 0 };
        let magic = reader.take(6)?;
        if &magic[..5] != MAGIC {
            return Err(NeuralError::BadMagic);
        }
        if magic[5] != VERSION {
            return Err(NeuralError::VersionMismatch(magic[5] as char));
        }
        let layers = reader.u32()? as usize;
        if layers == 0 {
            return Err(NeuralError::InvalidLayout("zero layers".into()));
        }
        let dims = (0..=layers)
            .map(|_| reader.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>, _>>()?;
        check_dims(&dims)?;
        let tag = reader.take(1)?[0];
        // A header that advertises more parameters than the file holds is a truncation.
        let total = dims
            .windows(2)
            .try_fold(0usize, |acc, w| acc.checked_add(w[0].checked_mul(w[1])?)?.checked_add(w[1]))
            .and_then(|n| n.checked_mul(8))
            .ok_or(NeuralError::Truncated)?;
        let payload = reader.take(total)?;
        let output = OutputActivation::from_tag(tag)?;
        if reader.pos != bytes.len() {
            return Err(NeuralError::ShapeMismatch(format!(
                "{} trailing bytes after the advertised payload",
                bytes.len() - reader.pos
            )));
        }
        let params = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::from_params(&dims, output, params)
    }

    pub fn save_weights(&self, path: &Path) -> Result<(), NeuralError> {
        let mut file = fs::File::create(path)?;
        file.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load_weights(path: &Path) -> Result<Self, NeuralError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NeuralError> {
        let end = self.pos.checked_add(n).ok_or(NeuralError::Truncated)?;
        let slice = self.bytes.get(self.pos..end).ok_or(NeuralError::Truncated)?;
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, NeuralError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

/// Gradient buffers mirroring an [`Mlp`]'s parameters plus the activations
/// of the most recent recorded forward pass.
#[derive(Debug, Clone)]
pub struct GradientTape {
    grads: Vec<f64>,
    activations: Option<Vec<Vec<f64>>>,
}

impl GradientTape {
    pub fn new(net: &Mlp) -> Self {
        GradientTape {
            grads: vec![0.0; net.params.len()],
            activations: None,
        }
    }

    pub fn grads(&self) -> &[f64] {
        &self.grads
    }

    pub fn zero_grad(&mut self) {
        self.grads.iter_mut().for_each(|g| *g = 0.0);
    }

    pub fn scale(&mut self, factor: f64) {
        self.grads.iter_mut().for_each(|g| *g *= factor);
    }
}

/// Adam moments for one network.
#[derive(Debug, Clone)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(net: &Mlp) -> Self {
        Self::with_betas(net, 0.9, 0.999, 1e-8)
    }

    pub fn with_betas(net: &Mlp, beta1: f64, beta2: f64, eps: f64) -> Self {
        Adam {
            beta1,
            beta2,
            eps,
            m: vec![0.0; net.params.len()],
            v: vec![0.0; net.params.len()],
            t: 0,
        }
    }

    pub fn steps(&self) -> i32 {
        self.t
    }

    /// One bias-corrected descent step along `grads`.
    pub fn update(&mut self, net: &mut Mlp, grads: &[f64], lr: f64) -> Result<(), NeuralError> {
        if grads.len() != net.params.len() || self.m.len() != net.params.len() {
            return Err(NeuralError::ShapeMismatch(format!(
                "{} gradients, {} moments, {} parameters",
                grads.len(),
                self.m.len(),
                net.params.len()
            )));
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (((p, g), m), v) in net
            .params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
        Ok(())
    }
}
