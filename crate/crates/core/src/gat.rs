//! Gate-augmented, distance-aware graph attention layer.
//!
//! Node features are rows. For an `N x F` input `x` and an `N x N` adjacency
//! `A` with positive diagonal:
//!
//! ```text
//! x'   = x W
//! e_ij = x'_i E x'_j^T + x'_j E x'_i^T        (symmetric by construction)
//! a_ij = softmax_{j : A_ij > 0}(e_ij) * A_ij
//! x''  = a x'
//! z_i  = sigmoid([x_i | x'_i] U + b)
//! out  = z * x' + (1 - z) * x''
//! ```
//!
//! Everything is recorded on the tape, including the multiplication by `A`,
//! so gradients reach adjacency entries that depend on learnable quantities.

use rand::Rng;

use crate::error::{shape_err, Error, Result};
use crate::math::{Matrix, Tape, Var};

/// Learnable weights of one layer of width `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct GatParams {
    /// `F x F` feature transform.
    pub w: Matrix,
    /// `F x F` bilinear attention form.
    pub e: Matrix,
    /// `2F x 1` gate weights.
    pub u: Matrix,
    /// `1 x 1` gate bias.
    pub b: Matrix,
}

impl GatParams {
    /// Glorot-uniform matrices, zero bias.
    pub fn init<R: Rng>(dim: usize, rng: &mut R) -> Self {
        Self {
            w: glorot(dim, dim, rng),
            e: glorot(dim, dim, rng),
            u: glorot(2 * dim, 1, rng),
            b: Matrix::zeros(1, 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    pub fn bind<'t>(&self, tape: &'t Tape) -> BoundGat<'t> {
        BoundGat {
            w: tape.param(self.w.clone()),
            e: tape.param(self.e.clone()),
            u: tape.param(self.u.clone()),
            b: tape.param(self.b.clone()),
        }
    }
}

/// Uniform in `±sqrt(6 / (fan_in + fan_out))`.
pub fn glorot<R: Rng>(fan_in: usize, fan_out: usize, rng: &mut R) -> Matrix {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Matrix::from_fn(fan_in, fan_out, |_, _| rng.gen_range(-limit..limit))
}

/// Layer weights recorded as tape leaves.
#[derive(Debug, Clone, Copy)]
pub struct BoundGat<'t> {
    pub w: Var<'t>,
    pub e: Var<'t>,
    pub u: Var<'t>,
    pub b: Var<'t>,
}

impl<'t> BoundGat<'t> {
    pub fn vars(&self) -> [Var<'t>; 4] {
        [self.w, self.e, self.u, self.b]
    }
}

/// Intermediate values of one layer application.
#[derive(Debug, Clone, Copy)]
pub struct GatTrace<'t> {
    pub transformed: Var<'t>,
    /// Symmetric attention logits `e`.
    pub scores: Var<'t>,
    /// Softmax over neighbours, before the multiplication by `A`.
    pub attention: Var<'t>,
    /// Gate values, `N x 1`.
    pub gate: Var<'t>,
    pub output: Var<'t>,
}

/// Neighbourhood mask `A_ij > 0` after checking every diagonal entry.
pub fn neighbourhood(adj: &Matrix) -> Result<Matrix> {
    if adj.rows() != adj.cols() {
        return Err(shape_err("adjacency", adj.shape(), adj.shape()));
    }
    for i in 0..adj.rows() {
        if !(adj[(i, i)] > 0.0) {
            return Err(Error::MissingSelfLoop { row: i });
        }
    }
    Ok(adj.map(|v| if v > 0.0 { 1.0 } else { 0.0 }))
}

pub fn gat_forward<'t>(x: Var<'t>, adj: Var<'t>, p: &BoundGat<'t>) -> Result<Var<'t>> {
    Ok(gat_forward_traced(x, adj, p)?.output)
}

pub fn gat_forward_traced<'t>(x: Var<'t>, adj: Var<'t>, p: &BoundGat<'t>) -> Result<GatTrace<'t>> {
    let (n, f) = x.shape();
    if adj.shape() != (n, n) {
        return Err(shape_err("gat adjacency", x.shape(), adj.shape()));
    }
    if p.w.shape() != (f, f) || p.e.shape() != (f, f) {
        return Err(shape_err("gat weights", x.shape(), p.w.shape()));
    }
    if p.u.shape() != (2 * f, 1) || p.b.shape() != (1, 1) {
        return Err(shape_err("gat gate", (2 * f, 1), p.u.shape()));
    }
    let mask = neighbourhood(&adj.value())?;

    let transformed = x.matmul(p.w)?;
    let half = transformed.matmul(p.e)?.matmul(transformed.transpose())?;
    let scores = half.add(half.transpose())?;
    let attention = scores.masked_softmax(&mask)?;
    let weights = attention.mul(adj)?;
    let aggregated = weights.matmul(transformed)?;

    let gate = x
        .concat_cols(transformed)?
        .matmul(p.u)?
        .add_row(p.b)?
        .sigmoid();
    let keep = gate.mul_rows(transformed)?;
    let mix = gate.scale(-1.0).add_scalar(1.0).mul_rows(aggregated)?;
    let output = keep.add(mix)?;
    Ok(GatTrace {
        transformed,
        scores,
        attention,
        gate,
        output,
    })
}
