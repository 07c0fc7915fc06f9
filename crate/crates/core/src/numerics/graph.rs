//! Define-then-run computation graph with reverse-mode differentiation.
//!
//! Nodes are appended in construction order, which is always a valid
//! topological order. [`Graph::forward`] evaluates every node from the fed
//! inputs and keeps the activations; [`Graph::backward`] walks the nodes in
//! reverse and returns the accumulated gradient of every trainable input.
//!
//! Only a small op set is supported: matrix products, elementwise
//! add/multiply, tanh, relu, row-wise softmax, embedding gather, seeded
//! dropout, concatenation, slicing and mean reduction. Broadcasting is
//! limited to adding a row vector to every row of a matrix.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng as _;

use super::kernels::{matmul, matmul_nt, matmul_tn};
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::rng::{derive_index, rng_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

#[derive(Debug, Clone)]
enum Op {
    Input { name: String, trainable: bool },
    Constant,
    MatMul(NodeId, NodeId),
    MatMulNT(NodeId, NodeId),
    Add(NodeId, NodeId),
    Mul(NodeId, NodeId),
    AddRow(NodeId, NodeId),
    Scale(NodeId, f64),
    Tanh(NodeId),
    Relu(NodeId),
    Softmax(NodeId),
    Gather { table: NodeId, ids: Vec<usize> },
    Dropout { x: NodeId, rate: f64, seeds: Vec<u64>, site: u64 },
    Concat { parts: Vec<NodeId>, axis: Axis },
    Slice { x: NodeId, rows: Range<usize>, cols: Range<usize> },
    Mean(NodeId),
}

impl Op {
    fn name(&self) -> &'static str {
        match self {
            Op::Input { .. } => "input",
            Op::Constant => "constant",
            Op::MatMul(..) => "matmul",
            Op::MatMulNT(..) => "matmul_nt",
            Op::Add(..) => "add",
            Op::Mul(..) => "mul",
            Op::AddRow(..) => "add_row",
            Op::Scale(..) => "scale",
            Op::Tanh(_) => "tanh",
            Op::Relu(_) => "relu",
            Op::Softmax(_) => "softmax",
            Op::Gather { .. } => "gather",
            Op::Dropout { .. } => "dropout",
            Op::Concat { .. } => "concat",
            Op::Slice { .. } => "slice",
            Op::Mean(_) => "mean",
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    op: Op,
    value: Option<Tensor>,
    /// Dropout keeps its scaled mask here for the backward pass.
    mask: Option<Vec<f64>>,
}

/// Gradients of the trainable inputs, keyed by input name.
pub type Gradients = BTreeMap<String, Tensor>;

#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    inputs: BTreeMap<String, NodeId>,
    evaluated: bool,
}

fn shape_err(op: &'static str, detail: String) -> Error {
    Error::Shape { op, detail }
}

fn matrix_dims(t: &Tensor, op: &'static str, node: usize) -> Result<(usize, usize)> {
    match t.shape().len() {
        1 => Ok((1, t.shape()[0])),
        2 => Ok((t.shape()[0], t.shape()[1])),
        _ => Err(shape_err(op, format!("node {} expects a matrix, got shape {:?}", node, t.shape()))),
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: Option<Tensor>) -> NodeId {
        self.evaluated = false;
        self.nodes.push(Node { op, value, mask: None });
        NodeId(self.nodes.len() - 1)
    }

    /// Declares a named input that must be fed at every forward pass.
    ///
    /// Re-declaring an existing name returns the same node.
    pub fn input(&mut self, name: &str, trainable: bool) -> NodeId {
        if let Some(&id) = self.inputs.get(name) {
            return id;
        }
        let id = self.push(Op::Input { name: name.to_string(), trainable }, None);
        self.inputs.insert(name.to_string(), id);
        id
    }

    pub fn constant(&mut self, value: Tensor) -> NodeId {
        self.push(Op::Constant, Some(value))
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::MatMul(a, b), None)
    }

    /// `a · bᵀ`
    pub fn matmul_nt(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::MatMulNT(a, b), None)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Add(a, b), None)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Mul(a, b), None)
    }

    /// Adds a row vector to every row of a matrix.
    pub fn add_row(&mut self, a: NodeId, row: NodeId) -> NodeId {
        self.push(Op::AddRow(a, row), None)
    }

    pub fn scale(&mut self, a: NodeId, factor: f64) -> NodeId {
        self.push(Op::Scale(a, factor), None)
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        self.push(Op::Tanh(a), None)
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        self.push(Op::Relu(a), None)
    }

    /// Row-wise softmax, stabilized by subtracting each row's maximum.
    pub fn softmax(&mut self, a: NodeId) -> NodeId {
        self.push(Op::Softmax(a), None)
    }

    /// Selects rows of `table` by index.
    pub fn gather(&mut self, table: NodeId, ids: Vec<usize>) -> NodeId {
        self.push(Op::Gather { table, ids }, None)
    }

    /// Inverted dropout with one seed per equal-sized block of rows.
    ///
    /// The rows of `x` are split into `seeds.len()` contiguous blocks and
    /// block `i` draws its mask from `seeds[i]` mixed with `site`, so a
    /// block's mask depends only on its own seed and never on its position
    /// in the batch.
    pub fn dropout(&mut self, x: NodeId, rate: f64, seeds: Vec<u64>, site: u64) -> NodeId {
        self.push(Op::Dropout { x, rate, seeds, site }, None)
    }

    pub fn concat(&mut self, parts: Vec<NodeId>, axis: Axis) -> NodeId {
        self.push(Op::Concat { parts, axis }, None)
    }

    pub fn slice(&mut self, x: NodeId, rows: Range<usize>, cols: Range<usize>) -> NodeId {
        self.push(Op::Slice { x, rows, cols }, None)
    }

    /// Mean over all elements, producing a one-element tensor.
    pub fn mean(&mut self, x: NodeId) -> NodeId {
        self.push(Op::Mean(x), None)
    }

    pub fn value(&self, id: NodeId) -> Result<&Tensor> {
        self.nodes
            .get(id.0)
            .and_then(|n| n.value.as_ref())
            .ok_or_else(|| Error::State(format!("node {} has no value; run forward first", id.0)))
    }

    fn val(&self, id: NodeId) -> &Tensor {
        // forward evaluates in index order, so operands are always present
        self.nodes[id.0].value.as_ref().expect("operand evaluated")
    }

    /// Evaluates every node from the fed inputs.
    pub fn forward(&mut self, feeds: &[(&str, &Tensor)]) -> Result<()> {
        self.evaluated = false;
        let fed: BTreeMap<&str, &Tensor> = feeds.iter().copied().collect();
        for name in fed.keys() {
            if !self.inputs.contains_key(*name) {
                return Err(Error::Contract(format!("fed unknown input '{}'", name)));
            }
        }
        for idx in 0..self.nodes.len() {
            let op = self.nodes[idx].op.clone();
            let (value, mask) = match &op {
                Op::Input { name, .. } => {
                    let t = fed
                        .get(name.as_str())
                        .ok_or_else(|| Error::Contract(format!("input '{}' was not fed", name)))?;
                    ((*t).clone(), None)
                }
                Op::Constant => continue,
                _ => self.eval(idx, &op)?,
            };
            if value.has_nan() {
                return Err(Error::NaN { node: idx, op: op.name() });
            }
            self.nodes[idx].value = Some(value);
            self.nodes[idx].mask = mask;
        }
        self.evaluated = true;
        Ok(())
    }

    fn eval(&self, idx: usize, op: &Op) -> Result<(Tensor, Option<Vec<f64>>)> {
        let name = op.name();
        let out = match op {
            Op::Input { .. } | Op::Constant => unreachable!(),
            Op::MatMul(a, b) => {
                let (av, bv) = (self.val(*a), self.val(*b));
                let (m, k) = matrix_dims(av, name, idx)?;
                let (k2, n) = matrix_dims(bv, name, idx)?;
                if k != k2 {
                    return Err(shape_err(name, format!("node {}: [{}x{}] · [{}x{}]", idx, m, k, k2, n)));
                }
                let mut out = vec![0.0; m * n];
                matmul(av.data(), bv.data(), m, k, n, &mut out);
                Tensor::matrix(m, n, out)?
            }
            Op::MatMulNT(a, b) => {
                let (av, bv) = (self.val(*a), self.val(*b));
                let (m, k) = matrix_dims(av, name, idx)?;
                let (n, k2) = matrix_dims(bv, name, idx)?;
                if k != k2 {
                    return Err(shape_err(name, format!("node {}: [{}x{}] · [{}x{}]ᵀ", idx, m, k, n, k2)));
                }
                let mut out = vec![0.0; m * n];
                matmul_nt(av.data(), bv.data(), m, k, n, &mut out);
                Tensor::matrix(m, n, out)?
            }
            Op::Add(a, b) | Op::Mul(a, b) => {
                let (av, bv) = (self.val(*a), self.val(*b));
                if av.shape() != bv.shape() {
                    return Err(shape_err(name, format!("node {}: {:?} vs {:?}", idx, av.shape(), bv.shape())));
                }
                let data = if matches!(op, Op::Add(..)) {
                    av.data().iter().zip(bv.data()).map(|(x, y)| x + y).collect()
                } else {
                    av.data().iter().zip(bv.data()).map(|(x, y)| x * y).collect()
                };
                Tensor::new(av.shape().to_vec(), data)?
            }
            Op::AddRow(a, r) => {
                let (av, rv) = (self.val(*a), self.val(*r));
                let (_, n) = matrix_dims(av, name, idx)?;
                if rv.len() != n {
                    return Err(shape_err(name, format!("node {}: row of {} added to {:?}", idx, rv.len(), av.shape())));
                }
                let data = av
                    .data()
                    .chunks(n)
                    .flat_map(|row| row.iter().zip(rv.data()).map(|(x, y)| x + y))
                    .collect();
                Tensor::new(av.shape().to_vec(), data)?
            }
            Op::Scale(a, f) => {
                let av = self.val(*a);
                Tensor::new(av.shape().to_vec(), av.data().iter().map(|x| x * f).collect())?
            }
            Op::Tanh(a) => {
                let av = self.val(*a);
                Tensor::new(av.shape().to_vec(), av.data().iter().map(|&x| libm::tanh(x)).collect())?
            }
            Op::Relu(a) => {
                let av = self.val(*a);
                Tensor::new(av.shape().to_vec(), av.data().iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect())?
            }
            Op::Softmax(a) => {
                let av = self.val(*a);
                let n = av.cols();
                let mut data = av.data().to_vec();
                for row in data.chunks_mut(n) {
                    softmax_in_place(row);
                }
                Tensor::new(av.shape().to_vec(), data)?
            }
            Op::Gather { table, ids } => {
                let tv = self.val(*table);
                let (rows, d) = matrix_dims(tv, name, idx)?;
                let mut data = Vec::with_capacity(ids.len() * d);
                for &i in ids {
                    if i >= rows {
                        return Err(shape_err(name, format!("node {}: index {} out of {} rows", idx, i, rows)));
                    }
                    data.extend_from_slice(tv.row(i));
                }
                Tensor::matrix(ids.len(), d, data)?
            }
            Op::Dropout { x, rate, seeds, site } => {
                let xv = self.val(*x);
                if !(0.0..1.0).contains(rate) {
                    return Err(Error::Config(format!("dropout rate {} outside [0, 1)", rate)));
                }
                let rows = xv.rows();
                if seeds.is_empty() || rows % seeds.len() != 0 {
                    return Err(shape_err(
                        name,
                        format!("node {}: {} rows cannot be split into {} seed blocks", idx, rows, seeds.len()),
                    ));
                }
                let mask = dropout_mask(xv.len(), seeds, *rate, *site);
                let data = xv.data().iter().zip(&mask).map(|(a, m)| a * m).collect();
                return Ok((Tensor::new(xv.shape().to_vec(), data)?, Some(mask)));
            }
            Op::Concat { parts, axis } => {
                if parts.is_empty() {
                    return Err(shape_err(name, format!("node {}: nothing to concatenate", idx)));
                }
                let dims: Vec<(usize, usize)> =
                    parts.iter().map(|p| matrix_dims(self.val(*p), name, idx)).collect::<Result<_>>()?;
                match axis {
                    Axis::Rows => {
                        let n = dims[0].1;
                        if dims.iter().any(|d| d.1 != n) {
                            return Err(shape_err(name, format!("node {}: column counts {:?}", idx, dims)));
                        }
                        let m: usize = dims.iter().map(|d| d.0).sum();
                        let mut data = Vec::with_capacity(m * n);
                        for p in parts {
                            data.extend_from_slice(self.val(*p).data());
                        }
                        Tensor::matrix(m, n, data)?
                    }
                    Axis::Cols => {
                        let m = dims[0].0;
                        if dims.iter().any(|d| d.0 != m) {
                            return Err(shape_err(name, format!("node {}: row counts {:?}", idx, dims)));
                        }
                        let n: usize = dims.iter().map(|d| d.1).sum();
                        let mut data = Vec::with_capacity(m * n);
                        for r in 0..m {
                            for (p, d) in parts.iter().zip(&dims) {
                                let v = self.val(*p).data();
                                data.extend_from_slice(&v[r * d.1..(r + 1) * d.1]);
                            }
                        }
                        Tensor::matrix(m, n, data)?
                    }
                }
            }
            Op::Slice { x, rows, cols } => {
                let xv = self.val(*x);
                let (m, n) = matrix_dims(xv, name, idx)?;
                if rows.end > m || cols.end > n || rows.start >= rows.end || cols.start >= cols.end {
                    return Err(shape_err(
                        name,
                        format!("node {}: rows {:?} cols {:?} of [{}x{}]", idx, rows, cols, m, n),
                    ));
                }
                let mut data = Vec::with_capacity(rows.len() * cols.len());
                for r in rows.clone() {
                    data.extend_from_slice(&xv.data()[r * n + cols.start..r * n + cols.end]);
                }
                Tensor::matrix(rows.len(), cols.len(), data)?
            }
            Op::Mean(x) => {
                let xv = self.val(*x);
                if xv.is_empty() {
                    return Err(shape_err(name, format!("node {}: mean of empty tensor", idx)));
                }
                Tensor::scalar(xv.sum() / xv.len() as f64)
            }
        };
        Ok((out, None))
    }

    /// Back-propagates `seed` (the gradient of some scalar objective with
    /// respect to `output`) and returns the gradient of every trainable
    /// input. Inputs used several times receive the sum of all paths.
    pub fn backward(&self, output: NodeId, seed: &Tensor) -> Result<Gradients> {
        if !self.evaluated {
            return Err(Error::State("backward called before forward".to_string()));
        }
        let out_val = self.value(output)?;
        if out_val.len() != seed.len() {
            return Err(shape_err(
                "backward",
                format!("seed {:?} for output {:?}", seed.shape(), out_val.shape()),
            ));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; output.0 + 1];
        grads[output.0] = Some(seed.data().to_vec());

        fn acc(grads: &mut [Option<Vec<f64>>], id: NodeId, g: Vec<f64>) {
            match &mut grads[id.0] {
                Some(buf) => buf.iter_mut().zip(&g).for_each(|(a, b)| *a += b),
                slot => *slot = Some(g),
            }
        }

        for idx in (0..=output.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Input { .. } => {
                    grads[idx] = Some(g);
                    continue;
                }
                Op::Constant => {}
                Op::MatMul(a, b) => {
                    let (av, bv) = (self.val(*a), self.val(*b));
                    let (m, k) = matrix_dims(av, "matmul", idx)?;
                    let n = bv.cols();
                    let mut da = vec![0.0; m * k];
                    matmul_nt(&g, bv.data(), m, n, k, &mut da);
                    let mut db = vec![0.0; k * n];
                    matmul_tn(av.data(), &g, m, k, n, &mut db);
                    acc(&mut grads, *a, da);
                    acc(&mut grads, *b, db);
                }
                Op::MatMulNT(a, b) => {
                    let (av, bv) = (self.val(*a), self.val(*b));
                    let (m, k) = matrix_dims(av, "matmul_nt", idx)?;
                    let n = bv.rows();
                    let mut da = vec![0.0; m * k];
                    matmul(&g, bv.data(), m, n, k, &mut da);
                    let mut db = vec![0.0; n * k];
                    matmul_tn(&g, av.data(), m, n, k, &mut db);
                    acc(&mut grads, *a, da);
                    acc(&mut grads, *b, db);
                }
                Op::Add(a, b) => {
                    acc(&mut grads, *a, g.clone());
                    acc(&mut grads, *b, g);
                }
                Op::Mul(a, b) => {
                    let (av, bv) = (self.val(*a), self.val(*b));
                    let da = g.iter().zip(bv.data()).map(|(x, y)| x * y).collect();
                    let db = g.iter().zip(av.data()).map(|(x, y)| x * y).collect();
                    acc(&mut grads, *a, da);
                    acc(&mut grads, *b, db);
                }
                Op::AddRow(a, r) => {
                    let n = self.val(*r).len();
                    let mut dr = vec![0.0; n];
                    for row in g.chunks(n) {
                        dr.iter_mut().zip(row).for_each(|(s, v)| *s += v);
                    }
                    acc(&mut grads, *a, g);
                    acc(&mut grads, *r, dr);
                }
                Op::Scale(a, f) => acc(&mut grads, *a, g.iter().map(|x| x * f).collect()),
                Op::Tanh(a) => {
                    let y = node.value.as_ref().expect("evaluated");
                    acc(&mut grads, *a, g.iter().zip(y.data()).map(|(d, y)| d * (1.0 - y * y)).collect());
                }
                Op::Relu(a) => {
                    let x = self.val(*a);
                    acc(&mut grads, *a, g.iter().zip(x.data()).map(|(d, &x)| if x > 0.0 { *d } else { 0.0 }).collect());
                }
                Op::Softmax(a) => {
                    let y = node.value.as_ref().expect("evaluated");
                    let n = y.cols();
                    let mut dx = vec![0.0; g.len()];
                    for ((dxr, gr), yr) in dx.chunks_mut(n).zip(g.chunks(n)).zip(y.data().chunks(n)) {
                        let dot: f64 = gr.iter().zip(yr).map(|(a, b)| a * b).sum();
                        for ((o, gv), yv) in dxr.iter_mut().zip(gr).zip(yr) {
                            *o = yv * (gv - dot);
                        }
                    }
                    acc(&mut grads, *a, dx);
                }
                Op::Gather { table, ids } => {
                    let tv = self.val(*table);
                    let d = tv.cols();
                    let mut dt = vec![0.0; tv.len()];
                    for (r, &i) in ids.iter().enumerate() {
                        dt[i * d..(i + 1) * d].iter_mut().zip(&g[r * d..(r + 1) * d]).for_each(|(a, b)| *a += b);
                    }
                    acc(&mut grads, *table, dt);
                }
                Op::Dropout { x, .. } => {
                    let mask = node.mask.as_ref().expect("dropout mask retained");
                    acc(&mut grads, *x, g.iter().zip(mask).map(|(a, m)| a * m).collect());
                }
                Op::Concat { parts, axis } => {
                    let total_cols = node.value.as_ref().expect("evaluated").cols();
                    let mut offset = 0;
                    for p in parts {
                        let pv = self.val(*p);
                        let (m, n) = (pv.rows(), pv.cols());
                        let dp = match axis {
                            Axis::Rows => g[offset * n..(offset + m) * n].to_vec(),
                            Axis::Cols => {
                                let mut out = Vec::with_capacity(m * n);
                                for r in 0..m {
                                    out.extend_from_slice(&g[r * total_cols + offset..r * total_cols + offset + n]);
                                }
                                out
                            }
                        };
                        offset += match axis {
                            Axis::Rows => m,
                            Axis::Cols => n,
                        };
                        acc(&mut grads, *p, dp);
                    }
                }
                Op::Slice { x, rows, cols } => {
                    let xv = self.val(*x);
                    let n = xv.cols();
                    let mut dx = vec![0.0; xv.len()];
                    let w = cols.len();
                    for (i, r) in rows.clone().enumerate() {
                        dx[r * n + cols.start..r * n + cols.end].copy_from_slice(&g[i * w..(i + 1) * w]);
                    }
                    acc(&mut grads, *x, dx);
                }
                Op::Mean(x) => {
                    let n = self.val(*x).len();
                    acc(&mut grads, *x, vec![g[0] / n as f64; n]);
                }
            }
        }

        let mut out = Gradients::new();
        for (name, &id) in &self.inputs {
            let Op::Input { trainable, .. } = &self.nodes[id.0].op else { unreachable!() };
            if !*trainable {
                continue;
            }
            let shape = self.val(id).shape().to_vec();
            let data = if id.0 <= output.0 {
                grads[id.0].take().unwrap_or_else(|| vec![0.0; self.val(id).len()])
            } else {
                vec![0.0; self.val(id).len()]
            };
            out.insert(name.clone(), Tensor::new(shape, data)?);
        }
        Ok(out)
    }
}

/// Numerically stable softmax over one row.
pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = libm::exp(*v - max);
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

fn dropout_mask(len: usize, seeds: &[u64], rate: f64, site: u64) -> Vec<f64> {
    let block = len / seeds.len();
    let keep = 1.0 / (1.0 - rate);
    let mut mask = Vec::with_capacity(len);
    for &s in seeds {
        let mut rng = rng_from(derive_index(s, site));
        for _ in 0..block {
            let u: f64 = rng.random();
            mask.push(if u < rate { 0.0 } else { keep });
        }
    }
    mask
}
