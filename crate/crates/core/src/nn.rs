//! Fully connected tanh network with exact backpropagation and plain SGD.
//!
//! Weights are stored `(fan_out, fan_in)` so a batch `X` of shape
//! `(batch, fan_in)` maps to `X W^T + b`. Hidden layers use `tanh`, the output
//! layer is affine.
//!
//! # Snapshot format
//!
//! A UTF-8 text file:
//!
//! ```text
//! movcf-mlp 1
//! sizes <n0> <n1> ... <nP>
//! layer <p>                # repeated for p = 0..P-1
//! <fan_out lines of fan_in weights, row-major>
//! <one line of fan_out biases>
//! ```
//!
//! Numbers are written in shortest round-trip exponent form, so a save/load
//! cycle reproduces every parameter bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const SNAPSHOT_MAGIC: &str = "movcf-mlp";
const SNAPSHOT_VERSION: u32 = 1;

/// Input, two hidden layers of 256, output.
pub fn default_layer_sizes(input: usize, output: usize) -> Vec<usize> {
    vec![input, 256, 256, output]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

/// Pre- and post-activations retained by a forward pass.
///
/// `post[0]` is the input batch; `pre[p]` and `post[p + 1]` belong to layer `p`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub pre: Vec<Array2<f64>>,
    pub post: Vec<Array2<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `theta += lr * g` (actor, maximizing the surrogate).
    Ascend,
    /// `theta -= lr * g` (critic, minimizing squared error).
    Descend,
}

/// Exponentially decaying learning rate, `lr(e) = lr0 * rate^(e / steps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SgdSchedule {
    pub initial_lr: f64,
    pub decay_rate: f64,
    pub decay_steps: f64,
    pub batch_size: usize,
}

impl Default for SgdSchedule {
    fn default() -> Self {
        Self {
            initial_lr: 3e-4,
            decay_rate: 0.99,
            decay_steps: 1e4,
            batch_size: 2048,
        }
    }
}

impl SgdSchedule {
    pub fn lr(&self, episode: u64) -> f64 {
        self.initial_lr * self.decay_rate.powf(episode as f64 / self.decay_steps)
    }
}

impl Mlp {
    /// Scaled-uniform (Glorot) weights in `+-sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn init(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::EmptyInput("an MLP needs at least input and output sizes"));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::InvalidConfig("layer sizes must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit).expect("finite bounds");
            weights.push(Array2::from_shape_simple_fn((fan_out, fan_in), || {
                dist.sample(&mut rng)
            }));
            biases.push(Array1::zeros(fan_out));
        }
        Ok(Self {
            sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("non-empty")
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    /// `sum_p (n_{p-1} n_p + n_p)`.
    pub fn parameter_count(&self) -> usize {
        self.sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Forward pass on a single input vector.
    ///
    /// Uses matrix-vector products, which avoid the packing buffers of a
    /// one-row matrix product.
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        if input.len() != self.input_dim() {
            return Err(Error::Dimension {
                context: "MLP input",
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        let last = self.num_layers() - 1;
        let mut pre = Vec::with_capacity(self.num_layers());
        let mut post = Vec::with_capacity(self.num_layers() + 1);
        let mut a = Array1::from(input.to_vec());
        for (p, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = w.dot(&a) + b;
            let next = if p == last { z.clone() } else { z.mapv(f64::tanh) };
            post.push(a.insert_axis(Axis(0)));
            pre.push(z.insert_axis(Axis(0)));
            a = next;
        }
        post.push(a.clone().insert_axis(Axis(0)));
        Ok((a.to_vec(), ForwardCache { pre, post }))
    }

    /// Forward pass on a `(batch, input_dim)` matrix.
    pub fn forward_batch(&self, inputs: ArrayView2<'_, f64>) -> Result<(Array2<f64>, ForwardCache)> {
        if inputs.ncols() != self.input_dim() {
            return Err(Error::Dimension {
                context: "MLP input",
                expected: self.input_dim(),
                got: inputs.ncols(),
            });
        }
        let last = self.num_layers() - 1;
        let mut pre = Vec::with_capacity(self.num_layers());
        let mut post = Vec::with_capacity(self.num_layers() + 1);
        post.push(inputs.to_owned());
        for (p, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = post[p].dot(&w.t()) + b;
            let a = if p == last { z.clone() } else { z.mapv(f64::tanh) };
            pre.push(z);
            post.push(a);
        }
        let output = post.last().expect("non-empty").clone();
        Ok((output, ForwardCache { pre, post }))
    }

    /// Outputs only, without retaining a cache.
    pub fn predict(&self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if inputs.ncols() != self.input_dim() {
            return Err(Error::Dimension {
                context: "MLP input",
                expected: self.input_dim(),
                got: inputs.ncols(),
            });
        }
        let last = self.num_layers() - 1;
        let mut a = inputs.to_owned();
        for (p, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = a.dot(&w.t()) + b;
            a = if p == last { z } else { z.mapv(f64::tanh) };
        }
        Ok(a)
    }

    /// Parameter gradients of `sum_{b,j} output_grad[b, j] * output[b, j]`.
    ///
    /// Scale `output_grad` by `1 / batch` to get the mini-batch mean gradient.
    pub fn backward(&self, cache: &ForwardCache, output_grad: ArrayView2<'_, f64>) -> Result<Gradients> {
        let expected = cache.post.last().map(|a| a.dim());
        if cache.pre.len() != self.num_layers() || expected != Some(output_grad.dim()) {
            return Err(Error::Dimension {
                context: "MLP backward",
                expected: expected.map_or(0, |(b, o)| b * o),
                got: output_grad.len(),
            });
        }
        if output_grad.ncols() != self.output_dim() {
            return Err(Error::Dimension {
                context: "MLP output gradient",
                expected: self.output_dim(),
                got: output_grad.ncols(),
            });
        }
        let mut weights = Vec::with_capacity(self.num_layers());
        let mut biases = Vec::with_capacity(self.num_layers());
        let mut delta = output_grad.to_owned();
        for p in (0..self.num_layers()).rev() {
            weights.push(delta.t().dot(&cache.post[p]));
            biases.push(delta.sum_axis(Axis(0)));
            if p > 0 {
                let mut upstream = delta.dot(&self.weights[p]);
                Zip::from(&mut upstream)
                    .and(&cache.post[p])
                    .for_each(|g, &a| *g *= 1.0 - a * a);
                delta = upstream;
            }
        }
        weights.reverse();
        biases.reverse();
        Ok(Gradients { weights, biases })
    }

    /// Backward pass for a single-sample cache.
    pub fn backward_single(&self, cache: &ForwardCache, output_grad: &[f64]) -> Result<Gradients> {
        let grad = ArrayView2::from_shape((1, output_grad.len()), output_grad).expect("contiguous");
        self.backward(cache, grad)
    }

    /// `theta <- theta +- lr * g`.
    pub fn sgd_step(&mut self, grads: &Gradients, lr: f64, direction: Direction) -> Result<()> {
        if grads.weights.len() != self.num_layers() {
            return Err(Error::Dimension {
                context: "gradient layers",
                expected: self.num_layers(),
                got: grads.weights.len(),
            });
        }
        let step = match direction {
            Direction::Ascend => lr,
            Direction::Descend => -lr,
        };
        for p in 0..self.num_layers() {
            if grads.weights[p].dim() != self.weights[p].dim() || grads.biases[p].dim() != self.biases[p].dim() {
                return Err(Error::Dimension {
                    context: "gradient shape",
                    expected: self.weights[p].len(),
                    got: grads.weights[p].len(),
                });
            }
            self.weights[p].scaled_add(step, &grads.weights[p]);
            self.biases[p].scaled_add(step, &grads.biases[p]);
        }
        Ok(())
    }

    /// Parameter `idx` in flattened order: per layer, weights row-major then biases.
    pub fn parameter(&self, idx: usize) -> f64 {
        *locate(&self.weights, &self.biases, idx)
    }

    pub fn set_parameter(&mut self, idx: usize, value: f64) {
        *locate_mut(&mut self.weights, &mut self.biases, idx) = value;
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}")?;
        write!(out, "sizes")?;
        for s in &self.sizes {
            write!(out, " {s}")?;
        }
        writeln!(out)?;
        for (p, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            writeln!(out, "layer {p}")?;
            for row in w.rows() {
                write_row(out, row.iter())?;
            }
            write_row(out, b.iter())?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file)).map_err(|e| match e {
            Error::Parse { line, message } => Error::Snapshot {
                path: path.to_path_buf(),
                message: format!("line {line}: {message}"),
            },
            other => other,
        })
    }

    pub fn read_from(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, Ok(l))) => Ok((n, l)),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(Error::Parse {
                    line: 0,
                    message: format!("unexpected end of snapshot, expected {what}"),
                }),
            }
        };
        let (n, header) = next("header")?;
        if header.trim() != format!("{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}") {
            return Err(Error::Parse {
                line: n,
                message: format!("unsupported snapshot header `{header}`"),
            });
        }
        let (n, sizes_line) = next("sizes")?;
        let mut tokens = sizes_line.split_whitespace();
        if tokens.next() != Some("sizes") {
            return Err(Error::Parse {
                line: n,
                message: "expected `sizes`".into(),
            });
        }
        let sizes = tokens
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: n,
                message: e.to_string(),
            })?;
        let mut net = Mlp::init(&sizes, 0)?;
        for p in 0..net.num_layers() {
            let (n, tag) = next("layer tag")?;
            if tag.trim() != format!("layer {p}") {
                return Err(Error::Parse {
                    line: n,
                    message: format!("expected `layer {p}`"),
                });
            }
            let (fan_out, fan_in) = net.weights[p].dim();
            for r in 0..fan_out {
                let (n, row) = next("weight row")?;
                let values = parse_row(&row, fan_in, n)?;
                net.weights[p].row_mut(r).assign(&Array1::from(values));
            }
            let (n, row) = next("bias row")?;
            net.biases[p] = Array1::from(parse_row(&row, fan_out, n)?);
        }
        Ok(net)
    }
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            weights: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            biases: net.biases.iter().map(|b| Array1::zeros(b.dim())).collect(),
        }
    }

    pub fn get(&self, idx: usize) -> f64 {
        *locate(&self.weights, &self.biases, idx)
    }

    pub fn len(&self) -> usize {
        self.weights.iter().map(Array2::len).sum::<usize>()
            + self.biases.iter().map(Array1::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .flat_map(|w| w.iter())
            .chain(self.biases.iter().flat_map(|b| b.iter()))
            .fold(0.0, |m, g| m.max(g.abs()))
    }
}

fn locate<'a>(weights: &'a [Array2<f64>], biases: &'a [Array1<f64>], mut idx: usize) -> &'a f64 {
    for (w, b) in weights.iter().zip(biases) {
        if idx < w.len() {
            return &w[[idx / w.ncols(), idx % w.ncols()]];
        }
        idx -= w.len();
        if idx < b.len() {
            return &b[idx];
        }
        idx -= b.len();
    }
    panic!("parameter index out of range");
}

fn locate_mut<'a>(weights: &'a mut [Array2<f64>], biases: &'a mut [Array1<f64>], mut idx: usize) -> &'a mut f64 {
    for (w, b) in weights.iter_mut().zip(biases.iter_mut()) {
        if idx < w.len() {
            let cols = w.ncols();
            return &mut w[[idx / cols, idx % cols]];
        }
        idx -= w.len();
        if idx < b.len() {
            return &mut b[idx];
        }
        idx -= b.len();
    }
    panic!("parameter index out of range");
}

fn write_row<'a>(out: &mut impl Write, values: impl Iterator<Item = &'a f64>) -> std::io::Result<()> {
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.write_all(b" ")?;
        }
        write!(out, "{v:e}")?;
    }
    writeln!(out)
}

fn parse_row(row: &str, expected: usize, line: usize) -> Result<Vec<f64>> {
    let values = row
        .split_whitespace()
        .map(str::parse::<f64>)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
    if values.len() != expected {
        return Err(Error::Parse {
            line,
            message: format!("expected {expected} values, found {}", values.len()),
        });
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn init_is_seeded_with_zero_biases() {
        let a = Mlp::init(&[5, 7, 3], 11).unwrap();
        assert_eq!(a, Mlp::init(&[5, 7, 3], 11).unwrap());
        assert_ne!(a, Mlp::init(&[5, 7, 3], 12).unwrap());
        assert!(a.biases().iter().all(|b| b.iter().all(|&x| x == 0.0)));
        let limit = (6.0f64 / 12.0).sqrt();
        assert!(a.weights()[0].iter().all(|w| w.abs() <= limit));
    }

    #[test]
    fn parameter_count_of_default_shape() {
        let net = Mlp::init(&default_layer_sizes(5, 3), 0).unwrap();
        assert_eq!(net.parameter_count(), 5 * 256 + 256 + 256 * 256 + 256 + 256 * 3 + 3);
        assert_eq!(net.parameter_count(), 68_099);
        assert_eq!(Gradients::zeros_like(&net).len(), 68_099);
    }

    #[test]
    fn init_rejects_degenerate_shapes() {
        assert!(Mlp::init(&[], 0).is_err());
        assert!(Mlp::init(&[4], 0).is_err());
        assert!(Mlp::init(&[4, 0, 2], 0).is_err());
    }

    #[test]
    fn zero_network_outputs_zero() {
        let mut net = Mlp::init(&[3, 4, 2], 1).unwrap();
        for i in 0..net.parameter_count() {
            net.set_parameter(i, 0.0);
        }
        let (out, _) = net.forward(&[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn hidden_units_saturate() {
        let mut net = Mlp::init(&[1, 1, 1], 1).unwrap();
        net.set_parameter(0, 1.0);
        let (_, cache) = net.forward(&[1e3]).unwrap();
        assert!((cache.post[1][[0, 0]] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let net = Mlp::init(&[3, 2], 1).unwrap();
        assert!(net.forward(&[1.0, 2.0]).is_err());
        let (_, cache) = net.forward(&[1.0, 2.0, 3.0]).unwrap();
        assert!(net.backward_single(&cache, &[1.0]).is_err());
    }

    #[test]
    fn zero_output_grad_gives_zero_gradients() {
        let net = Mlp::init(&[3, 5, 2], 4).unwrap();
        let (_, cache) = net.forward(&[0.3, -0.1, 0.9]).unwrap();
        let g = net.backward_single(&cache, &[0.0, 0.0]).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn linear_layer_weight_gradient_is_input() {
        let net = Mlp::init(&[3, 1], 4).unwrap();
        let x = [0.5, -1.5, 2.0];
        let (_, cache) = net.forward(&x).unwrap();
        let g = net.backward_single(&cache, &[1.0]).unwrap();
        assert_eq!(g.weights[0], array![[0.5, -1.5, 2.0]]);
        assert_eq!(g.biases[0], array![1.0]);
    }

    #[test]
    fn sgd_arithmetic() {
        let mut net = Mlp::init(&[1, 1], 0).unwrap();
        net.set_parameter(0, 1.0);
        let mut g = Gradients::zeros_like(&net);
        g.weights[0][[0, 0]] = 2.0;
        net.sgd_step(&g, 0.1, Direction::Descend).unwrap();
        assert!((net.parameter(0) - 0.8).abs() < 1e-15);

        let before = net.clone();
        net.sgd_step(&g, 0.0, Direction::Ascend).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn ascend_then_descend_restores() {
        let mut net = Mlp::init(&[4, 6, 3], 2).unwrap();
        let (_, cache) = net.forward(&[0.1, 0.2, -0.3, 0.4]).unwrap();
        let g = net.backward_single(&cache, &[1.0, -2.0, 0.5]).unwrap();
        let before = net.clone();
        net.sgd_step(&g, 0.01, Direction::Ascend).unwrap();
        net.sgd_step(&g, 0.01, Direction::Descend).unwrap();
        for i in 0..net.parameter_count() {
            assert!((net.parameter(i) - before.parameter(i)).abs() <= 1e-15);
        }
    }

    #[test]
    fn schedule() {
        let s = SgdSchedule::default();
        assert_eq!(s.lr(0), 3e-4);
        assert!((s.lr(10_000) - 3e-4 * 0.99).abs() < 1e-18);
        assert!(s.lr(20_000) < s.lr(10_000));
    }

    #[test]
    fn snapshot_roundtrip_is_exact() {
        let net = Mlp::init(&[3, 4, 2], 77).unwrap();
        let mut buf = Vec::new();
        net.write_to(&mut buf).unwrap();
        let back = Mlp::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn snapshot_rejects_truncation() {
        let net = Mlp::init(&[3, 4, 2], 77).unwrap();
        let mut buf = Vec::new();
        net.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(Mlp::read_from(truncated.as_bytes()).is_err());
        assert!(Mlp::read_from("other 1\n".as_bytes()).is_err());
    }
}
