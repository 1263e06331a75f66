//! Define-by-run reverse-mode differentiation over dense matrices.
//!
//! A [`Tape`] records every operation applied to its [`Var`]s. Nodes are
//! appended in execution order, so the node list is already a topological
//! order and [`Tape::backward`] is a single reverse sweep. A fresh tape is
//! built for every forward pass.
//!
//! ```
//! use gnn_dti::math::{Matrix, Tape};
//!
//! let tape = Tape::new();
//! let w = tape.param(Matrix::from_rows(&[[1.0, -2.0], [3.0, 0.5]]));
//! let loss = w.mul(w).unwrap().sum().scale(0.5);
//! let grads = tape.backward(loss).unwrap();
//! assert_eq!(grads.get(w).unwrap(), &*w.value());
//! ```

use std::cell::{Ref, RefCell};
use std::rc::Rc;

use super::matrix::Matrix;
use crate::error::{shape_err, Error, Result};

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(usize, usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Scale(usize, f64),
    AddScalar(usize),
    Exp(usize),
    Sigmoid(usize),
    Relu(usize),
    Softplus(usize),
    ClampedLn(usize, f64),
    Transpose(usize),
    Sum(usize),
    ColSum(usize),
    AddRow(usize, usize),
    MulCol(usize, usize),
    ConcatCols(usize, usize),
    MaskedSoftmax(usize),
    Gaussian {
        mu: usize,
        sigma: usize,
        dist: Rc<Matrix>,
        mask: Rc<Matrix>,
    },
}

impl Op {
    fn operands(&self) -> Vec<usize> {
        use Op::*;
        match *self {
            Leaf => vec![],
            MatMul(a, b) | Add(a, b) | Sub(a, b) | Mul(a, b) | AddRow(a, b) | MulCol(a, b)
            | ConcatCols(a, b) => vec![a, b],
            Scale(a, _) | AddScalar(a) | Exp(a) | Sigmoid(a) | Relu(a) | Softplus(a)
            | ClampedLn(a, _) | Transpose(a) | Sum(a) | ColSum(a) | MaskedSoftmax(a) => vec![a],
            Gaussian { mu, sigma, .. } => vec![mu, sigma],
        }
    }
}

struct Node {
    value: Matrix,
    op: Op,
    requires_grad: bool,
}

/// Records operations for one forward pass. Single-threaded; build one tape
/// per sample (or batch) and run independent tapes on separate threads.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

/// Handle to a value recorded on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    id: usize,
}

impl std::fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Var#{} {:?}", self.id, self.value().shape())
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of recorded nodes.
    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A differentiable leaf.
    pub fn param(&self, value: Matrix) -> Var<'_> {
        self.push(value, Op::Leaf, true)
    }

    /// A leaf that receives no gradient.
    pub fn constant(&self, value: Matrix) -> Var<'_> {
        self.push(value, Op::Leaf, false)
    }

    fn push(&self, value: Matrix, op: Op, requires_grad: bool) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var {
            tape: self,
            id: nodes.len() - 1,
        }
    }

    fn record(&self, value: Matrix, op: Op) -> Var<'_> {
        let requires_grad = {
            let nodes = self.nodes.borrow();
            op.operands().iter().any(|&i| nodes[i].requires_grad)
        };
        self.push(value, op, requires_grad)
    }

    fn value_of(&self, id: usize) -> Ref<'_, Matrix> {
        Ref::map(self.nodes.borrow(), |n| &n[id].value)
    }

    /// Propagates the gradient of a 1x1 `loss` to every node that depends on a
    /// differentiable leaf.
    pub fn backward(&self, loss: Var<'_>) -> Result<Gradients> {
        assert!(std::ptr::eq(loss.tape, self), "loss belongs to another tape");
        let nodes = self.nodes.borrow();
        let shape = nodes[loss.id].value.shape();
        if shape != (1, 1) {
            return Err(Error::NonScalarLoss {
                rows: shape.0,
                cols: shape.1,
            });
        }
        let mut grads: Vec<Option<Matrix>> = vec![None; nodes.len()];
        grads[loss.id] = Some(Matrix::scalar(1.0));

        for id in (0..=loss.id).rev() {
            let node = &nodes[id];
            if !node.requires_grad {
                continue;
            }
            let Some(g) = grads[id].take() else {
                continue;
            };
            backprop(&nodes, id, &g, &mut grads);
            grads[id] = Some(g);
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(grads: &mut [Option<Matrix>], nodes: &[Node], id: usize, g: Matrix) {
    if !nodes[id].requires_grad {
        return;
    }
    match &mut grads[id] {
        Some(existing) => existing.add_assign(&g),
        slot @ None => *slot = Some(g),
    }
}

fn backprop(nodes: &[Node], id: usize, g: &Matrix, grads: &mut [Option<Matrix>]) {
    let out = &nodes[id].value;
    let val = |i: usize| &nodes[i].value;
    let wants = |i: usize| nodes[i].requires_grad;
    let mul = |a: &Matrix, b: &Matrix| a.zip_map(b, |x, y| x * y).expect("shape");

    match nodes[id].op {
        Op::Leaf => {}
        Op::MatMul(a, b) => {
            if wants(a) {
                accumulate(grads, nodes, a, g.matmul_t(val(b)).expect("shape"));
            }
            if wants(b) {
                accumulate(grads, nodes, b, val(a).t_matmul(g).expect("shape"));
            }
        }
        Op::Add(a, b) => {
            accumulate(grads, nodes, a, g.clone());
            accumulate(grads, nodes, b, g.clone());
        }
        Op::Sub(a, b) => {
            accumulate(grads, nodes, a, g.clone());
            accumulate(grads, nodes, b, g.map(|v| -v));
        }
        Op::Mul(a, b) => {
            if wants(a) {
                accumulate(grads, nodes, a, mul(g, val(b)));
            }
            if wants(b) {
                accumulate(grads, nodes, b, mul(g, val(a)));
            }
        }
        Op::Scale(a, k) => accumulate(grads, nodes, a, g.map(|v| v * k)),
        Op::AddScalar(a) => accumulate(grads, nodes, a, g.clone()),
        Op::Exp(a) => accumulate(grads, nodes, a, mul(g, out)),
        Op::Sigmoid(a) => {
            let d = g.zip_map(out, |g, s| g * s * (1.0 - s)).expect("shape");
            accumulate(grads, nodes, a, d);
        }
        Op::Relu(a) => {
            let d = g
                .zip_map(val(a), |g, x| if x > 0.0 { g } else { 0.0 })
                .expect("shape");
            accumulate(grads, nodes, a, d);
        }
        Op::Softplus(a) => {
            let d = g.zip_map(val(a), |g, x| g * sigmoid(x)).expect("shape");
            accumulate(grads, nodes, a, d);
        }
        Op::ClampedLn(a, eps) => {
            let d = g
                .zip_map(val(a), |g, x| if x > eps { g / x } else { 0.0 })
                .expect("shape");
            accumulate(grads, nodes, a, d);
        }
        Op::Transpose(a) => accumulate(grads, nodes, a, g.transpose()),
        Op::Sum(a) => {
            let (r, c) = val(a).shape();
            accumulate(grads, nodes, a, Matrix::filled(r, c, g.item()));
        }
        Op::ColSum(a) => {
            let (r, c) = val(a).shape();
            accumulate(grads, nodes, a, Matrix::from_fn(r, c, |_, j| g[(0, j)]));
        }
        Op::AddRow(a, row) => {
            accumulate(grads, nodes, a, g.clone());
            if wants(row) {
                let mut d = Matrix::zeros(1, g.cols());
                for i in 0..g.rows() {
                    for (acc, v) in d.row_mut(0).iter_mut().zip(g.row(i)) {
                        *acc += v;
                    }
                }
                accumulate(grads, nodes, row, d);
            }
        }
        Op::MulCol(col, m) => {
            let (c, mv) = (val(col), val(m));
            if wants(col) {
                let d = Matrix::from_fn(g.rows(), 1, |i, _| {
                    g.row(i).iter().zip(mv.row(i)).map(|(x, y)| x * y).sum()
                });
                accumulate(grads, nodes, col, d);
            }
            if wants(m) {
                let d = Matrix::from_fn(g.rows(), g.cols(), |i, j| g[(i, j)] * c[(i, 0)]);
                accumulate(grads, nodes, m, d);
            }
        }
        Op::ConcatCols(a, b) => {
            let ca = val(a).cols();
            if wants(a) {
                accumulate(grads, nodes, a, Matrix::from_fn(g.rows(), ca, |i, j| g[(i, j)]));
            }
            if wants(b) {
                let cb = val(b).cols();
                accumulate(
                    grads,
                    nodes,
                    b,
                    Matrix::from_fn(g.rows(), cb, |i, j| g[(i, ca + j)]),
                );
            }
        }
        Op::MaskedSoftmax(a) => {
            // Masked-out outputs are exactly zero, so they drop out of both terms.
            let mut d = Matrix::zeros(g.rows(), g.cols());
            for i in 0..g.rows() {
                let (gr, yr) = (g.row(i), out.row(i));
                let dot: f64 = gr.iter().zip(yr).map(|(x, y)| x * y).sum();
                for (dv, (gv, yv)) in d.row_mut(i).iter_mut().zip(gr.iter().zip(yr)) {
                    *dv = yv * (gv - dot);
                }
            }
            accumulate(grads, nodes, a, d);
        }
        Op::Gaussian {
            mu,
            sigma,
            ref dist,
            ref mask,
        } => {
            let (m, s) = (val(mu).item(), val(sigma).item());
            let (mut dmu, mut dsigma) = (0.0, 0.0);
            for k in 0..g.len() {
                if mask.data()[k] == 0.0 {
                    continue;
                }
                let w = out.data()[k];
                let diff = dist.data()[k] - m;
                let gw = g.data()[k] * w;
                dmu += gw * 2.0 * diff / s;
                dsigma += gw * diff * diff / (s * s);
            }
            accumulate(grads, nodes, mu, Matrix::scalar(dmu));
            accumulate(grads, nodes, sigma, Matrix::scalar(dsigma));
        }
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.max(0.0) + (-x.abs()).exp().ln_1p()
    }
}

/// Row-wise softmax restricted to entries where `mask` is nonzero.
///
/// Each row is shifted by the maximum over its masked-in entries before
/// exponentiation. Masked-out outputs are exactly zero.
pub fn masked_softmax(scores: &Matrix, mask: &Matrix) -> Result<Matrix> {
    if scores.shape() != mask.shape() {
        return Err(shape_err("masked_softmax", scores.shape(), mask.shape()));
    }
    let mut out = Matrix::zeros(scores.rows(), scores.cols());
    for i in 0..scores.rows() {
        let (s, m) = (scores.row(i), mask.row(i));
        if m.iter().all(|&v| v == 0.0) {
            return Err(Error::EmptyMaskRow { row: i });
        }
        let mut max = f64::NEG_INFINITY;
        for (&v, &m) in s.iter().zip(m) {
            if m != 0.0 {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("softmax score in row {i}")));
                }
                max = max.max(v);
            }
        }
        let o = out.row_mut(i);
        let mut total = 0.0;
        for ((o, &v), &m) in o.iter_mut().zip(s).zip(m) {
            if m != 0.0 {
                *o = (v - max).exp();
                total += *o;
            }
        }
        for o in o.iter_mut() {
            *o /= total;
        }
    }
    Ok(out)
}

impl<'t> Var<'t> {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn tape(&self) -> &'t Tape {
        self.tape
    }

    pub fn value(&self) -> Ref<'t, Matrix> {
        self.tape.value_of(self.id)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.value().shape()
    }

    pub fn requires_grad(&self) -> bool {
        self.tape.nodes.borrow()[self.id].requires_grad
    }

    fn same_tape(&self, other: Var<'t>) {
        assert!(
            std::ptr::eq(self.tape, other.tape),
            "operands recorded on different tapes"
        );
    }

    fn unary(self, op: Op, f: impl Fn(f64) -> f64) -> Var<'t> {
        let v = self.value().map(f);
        self.tape.record(v, op)
    }

    fn binary(
        self,
        other: Var<'t>,
        name: &'static str,
        op: Op,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Var<'t>> {
        self.same_tape(other);
        let v = {
            let (a, b) = (self.value(), other.value());
            if a.shape() != b.shape() {
                return Err(shape_err(name, a.shape(), b.shape()));
            }
            a.zip_map(&b, f)?
        };
        Ok(self.tape.record(v, op))
    }

    pub fn matmul(self, other: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(other);
        let v = self.value().matmul(&other.value())?;
        Ok(self.tape.record(v, Op::MatMul(self.id, other.id)))
    }

    pub fn add(self, other: Var<'t>) -> Result<Var<'t>> {
        self.binary(other, "add", Op::Add(self.id, other.id), |a, b| a + b)
    }

    pub fn sub(self, other: Var<'t>) -> Result<Var<'t>> {
        self.binary(other, "sub", Op::Sub(self.id, other.id), |a, b| a - b)
    }

    /// Element-wise (Hadamard) product.
    pub fn mul(self, other: Var<'t>) -> Result<Var<'t>> {
        self.binary(other, "mul", Op::Mul(self.id, other.id), |a, b| a * b)
    }

    pub fn scale(self, k: f64) -> Var<'t> {
        self.unary(Op::Scale(self.id, k), |v| v * k)
    }

    pub fn add_scalar(self, k: f64) -> Var<'t> {
        self.unary(Op::AddScalar(self.id), |v| v + k)
    }

    pub fn exp(self) -> Var<'t> {
        self.unary(Op::Exp(self.id), f64::exp)
    }

    pub fn sigmoid(self) -> Var<'t> {
        self.unary(Op::Sigmoid(self.id), sigmoid)
    }

    pub fn relu(self) -> Var<'t> {
        self.unary(Op::Relu(self.id), |v| v.max(0.0))
    }

    pub fn softplus(self) -> Var<'t> {
        self.unary(Op::Softplus(self.id), softplus)
    }

    /// `ln(max(x, eps))`; the gradient is zero where the clamp is active.
    pub fn clamped_ln(self, eps: f64) -> Var<'t> {
        self.unary(Op::ClampedLn(self.id, eps), move |v| v.max(eps).ln())
    }

    pub fn transpose(self) -> Var<'t> {
        let v = self.value().transpose();
        self.tape.record(v, Op::Transpose(self.id))
    }

    /// Sum of all entries as a 1x1 value.
    pub fn sum(self) -> Var<'t> {
        let v = Matrix::scalar(self.value().sum());
        self.tape.record(v, Op::Sum(self.id))
    }

    /// Column sums as a 1 x cols row.
    pub fn col_sum(self) -> Var<'t> {
        let v = {
            let m = self.value();
            let mut out = Matrix::zeros(1, m.cols());
            for i in 0..m.rows() {
                for (acc, v) in out.row_mut(0).iter_mut().zip(m.row(i)) {
                    *acc += v;
                }
            }
            out
        };
        self.tape.record(v, Op::ColSum(self.id))
    }

    /// Adds a 1 x cols row to every row of `self`.
    pub fn add_row(self, row: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(row);
        let v = {
            let (m, r) = (self.value(), row.value());
            if r.rows() != 1 || r.cols() != m.cols() {
                return Err(shape_err("add_row", m.shape(), r.shape()));
            }
            Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] + r[(0, j)])
        };
        Ok(self.tape.record(v, Op::AddRow(self.id, row.id)))
    }

    /// Scales row `i` of `m` by `self[i]`; `self` is an N x 1 column.
    pub fn mul_rows(self, m: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(m);
        let v = {
            let (c, mv) = (self.value(), m.value());
            if c.cols() != 1 || c.rows() != mv.rows() {
                return Err(shape_err("mul_rows", c.shape(), mv.shape()));
            }
            Matrix::from_fn(mv.rows(), mv.cols(), |i, j| c[(i, 0)] * mv[(i, j)])
        };
        Ok(self.tape.record(v, Op::MulCol(self.id, m.id)))
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn concat_cols(self, other: Var<'t>) -> Result<Var<'t>> {
        self.same_tape(other);
        let v = {
            let (a, b) = (self.value(), other.value());
            if a.rows() != b.rows() {
                return Err(shape_err("concat_cols", a.shape(), b.shape()));
            }
            let ca = a.cols();
            Matrix::from_fn(a.rows(), ca + b.cols(), |i, j| {
                if j < ca {
                    a[(i, j)]
                } else {
                    b[(i, j - ca)]
                }
            })
        };
        Ok(self.tape.record(v, Op::ConcatCols(self.id, other.id)))
    }

    /// See [`masked_softmax`]. The mask itself is not differentiated.
    pub fn masked_softmax(self, mask: &Matrix) -> Result<Var<'t>> {
        let v = masked_softmax(&self.value(), mask)?;
        Ok(self.tape.record(v, Op::MaskedSoftmax(self.id)))
    }
}

/// Gaussian contact weights: `base` where `mask` is zero and
/// `exp(-(dist - mu)^2 / sigma)` where it is one. `mu` and `sigma` are 1x1.
pub fn gaussian_contacts<'t>(
    base: &Matrix,
    dist: &Matrix,
    mask: &Matrix,
    mu: Var<'t>,
    sigma: Var<'t>,
) -> Result<Var<'t>> {
    mu.same_tape(sigma);
    if base.shape() != dist.shape() {
        return Err(shape_err("gaussian_contacts", base.shape(), dist.shape()));
    }
    if mask.shape() != dist.shape() {
        return Err(shape_err("gaussian_contacts", mask.shape(), dist.shape()));
    }
    if mu.shape() != (1, 1) || sigma.shape() != (1, 1) {
        return Err(shape_err("gaussian_contacts", mu.shape(), sigma.shape()));
    }
    let (m, s) = (mu.value().item(), sigma.value().item());
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {s}")));
    }
    let mut v = base.clone();
    for k in 0..v.len() {
        if mask.data()[k] != 0.0 {
            let diff = dist.data()[k] - m;
            v.data_mut()[k] = (-diff * diff / s).exp();
        }
    }
    let tape = mu.tape;
    Ok(tape.record(
        v,
        Op::Gaussian {
            mu: mu.id,
            sigma: sigma.id,
            dist: Rc::new(dist.clone()),
            mask: Rc::new(mask.clone()),
        },
    ))
}

/// Gradients produced by [`Tape::backward`], indexed by node.
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
}

impl Gradients {
    /// Gradient of the loss w.r.t. `var`; `None` if `var` does not influence
    /// the loss or is a constant.
    pub fn get(&self, var: Var<'_>) -> Option<&Matrix> {
        self.grads.get(var.id).and_then(Option::as_ref)
    }

    /// Like [`get`](Self::get) but returns zeros of `var`'s shape when absent.
    pub fn get_or_zeros(&self, var: Var<'_>) -> Matrix {
        self.get(var).cloned().unwrap_or_else(|| {
            let (r, c) = var.shape();
            Matrix::zeros(r, c)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_value_and_gradient_at_zero() {
        let tape = Tape::new();
        let x = tape.param(Matrix::scalar(0.0));
        let y = x.sigmoid();
        assert_eq!(y.value().item(), 0.5);
        let g = tape.backward(y).unwrap();
        assert_eq!(g.get(x).unwrap().item(), 0.25);
    }

    #[test]
    fn relu_negative_has_zero_gradient() {
        let tape = Tape::new();
        let x = tape.param(Matrix::scalar(-3.0));
        let y = x.relu();
        assert_eq!(y.value().item(), 0.0);
        let g = tape.backward(y).unwrap();
        assert_eq!(g.get(x).unwrap().item(), 0.0);
    }

    #[test]
    fn sum_gradient_is_ones() {
        let tape = Tape::new();
        let w = tape.param(Matrix::from_fn(3, 4, |i, j| i as f64 - j as f64));
        let g = tape.backward(w.sum()).unwrap();
        assert_eq!(g.get(w).unwrap(), &Matrix::filled(3, 4, 1.0));
    }

    #[test]
    fn half_sum_of_squares_gradient_is_w() {
        let tape = Tape::new();
        let w = tape.param(Matrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64 * 0.7 - 1.0));
        let loss = w.mul(w).unwrap().sum().scale(0.5);
        let g = tape.backward(loss).unwrap();
        assert_eq!(g.get(w).unwrap(), &*w.value());
    }

    #[test]
    fn non_scalar_loss_rejected() {
        let tape = Tape::new();
        let w = tape.param(Matrix::zeros(2, 2));
        assert!(matches!(
            tape.backward(w),
            Err(Error::NonScalarLoss { rows: 2, cols: 2 })
        ));
    }

    #[test]
    fn constants_get_no_gradient() {
        let tape = Tape::new();
        let c = tape.constant(Matrix::filled(2, 2, 3.0));
        let w = tape.param(Matrix::filled(2, 2, 1.0));
        let loss = c.mul(w).unwrap().sum();
        let g = tape.backward(loss).unwrap();
        assert!(g.get(c).is_none());
        assert_eq!(g.get(w).unwrap(), &Matrix::filled(2, 2, 3.0));
    }

    #[test]
    fn softmax_uniform_and_single_neighbor() {
        let scores = Matrix::from_rows(&[[0.3, 0.3, 0.3, 0.3, 9.0], [5.0, -2.0, 1.0, 0.0, 0.0]]);
        let mask = Matrix::from_rows(&[[1.0, 1.0, 1.0, 1.0, 0.0], [0.0, 1.0, 0.0, 0.0, 0.0]]);
        let y = masked_softmax(&scores, &mask).unwrap();
        for j in 0..4 {
            assert_eq!(y[(0, j)], 0.25);
        }
        assert_eq!(y[(0, 4)], 0.0);
        assert_eq!(y.row(1), &[0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn softmax_empty_row_rejected() {
        let scores = Matrix::zeros(2, 2);
        let mask = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]);
        assert!(matches!(
            masked_softmax(&scores, &mask),
            Err(Error::EmptyMaskRow { row: 1 })
        ));
    }

    #[test]
    fn binary_shape_mismatch_rejected() {
        let tape = Tape::new();
        let a = tape.param(Matrix::zeros(2, 2));
        let b = tape.param(Matrix::zeros(2, 3));
        assert!(a.add(b).is_err());
        assert!(a.mul(b).is_err());
        assert!(b.matmul(a).is_err());
    }

    #[test]
    fn gaussian_contacts_values() {
        let tape = Tape::new();
        let base = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]);
        let dist = Matrix::from_rows(&[[0.0, 3.0], [3.0, 0.0]]);
        let mask = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let mu = tape.param(Matrix::scalar(2.0));
        let sigma = tape.param(Matrix::scalar(4.0));
        let a = gaussian_contacts(&base, &dist, &mask, mu, sigma).unwrap();
        let v = a.value();
        assert_eq!(v[(0, 0)], 1.0);
        assert!((v[(0, 1)] - (-0.25f64).exp()).abs() < 1e-15);
        assert!((v[(0, 1)] - 0.7788).abs() < 1e-4);
    }
}
