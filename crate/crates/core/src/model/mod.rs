//! The complex classifier: input embedding, a stack of gated attention layers
//! applied to both adjacencies with shared weights, sum pooling and an MLP
//! head.

mod checkpoint;

pub use checkpoint::{load_params, save_params, Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chem::FEATURE_DIM;
use crate::error::{Error, Result};
use crate::gat::{gat_forward_traced, glorot, BoundGat, GatParams, GatTrace};
use crate::graph::GraphSample;
use crate::math::{gaussian_contacts, Matrix, Tape, Var};

/// Lower bound added to the softplus so the Gaussian width never reaches 0.
pub const SIGMA_FLOOR: f64 = 1e-3;
pub const INIT_MU: f64 = 3.0;
pub const INIT_SIGMA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub num_gat_layers: usize,
    pub gat_dim: usize,
    /// Output widths of the fully connected layers; the last must be 1.
    pub fc_dims: Vec<usize>,
    pub dropout_rate: f64,
    /// Also apply dropout to each attention layer's output (not only the
    /// hidden fully connected layers).
    pub gat_dropout: bool,
    pub input_dim: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            num_gat_layers: 4,
            gat_dim: 140,
            fc_dims: vec![128, 128, 1],
            dropout_rate: 0.3,
            gat_dropout: true,
            input_dim: FEATURE_DIM,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("model config: {m}")));
        if self.num_gat_layers == 0 || self.gat_dim == 0 || self.input_dim == 0 {
            return bad("dimensions must be positive");
        }
        if self.fc_dims.is_empty() || self.fc_dims.contains(&0) {
            return bad("fc_dims must be non-empty and positive");
        }
        if *self.fc_dims.last().expect("non-empty") != 1 {
            return bad("last fully connected layer must have width 1");
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad("dropout_rate must be in [0, 1)");
        }
        Ok(())
    }

    /// Expected `(rows, cols)` of every tensor in [`ModelParams::tensors`] order.
    pub fn tensor_shapes(&self) -> Vec<(usize, usize)> {
        let f = self.gat_dim;
        let mut shapes = vec![(self.input_dim, f)];
        for _ in 0..self.num_gat_layers {
            shapes.extend([(f, f), (f, f), (2 * f, 1), (1, 1)]);
        }
        shapes.extend([(1, 1), (1, 1)]);
        let mut fan_in = f;
        for &d in &self.fc_dims {
            shapes.extend([(fan_in, d), (1, d)]);
            fan_in = d;
        }
        shapes
    }
}

/// One fully connected layer, `y = x W + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: Matrix,
    pub b: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// `input_dim x gat_dim` projection applied before the first layer.
    pub embed: Matrix,
    /// One parameter set per layer, shared by both adjacency branches.
    pub layers: Vec<GatParams>,
    /// Gaussian centre in Å, `1 x 1`.
    pub mu: Matrix,
    /// Unconstrained width; `sigma = softplus(sigma_raw) + SIGMA_FLOOR`.
    pub sigma_raw: Matrix,
    pub fc: Vec<Dense>,
}

fn inverse_softplus(y: f64) -> f64 {
    y + (-(-y).exp_m1()).ln()
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

impl ModelParams {
    pub fn init(config: &ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = config.gat_dim;
        let embed = glorot(config.input_dim, f, &mut rng);
        let layers = (0..config.num_gat_layers)
            .map(|_| GatParams::init(f, &mut rng))
            .collect();
        let mut fc = Vec::new();
        let mut fan_in = f;
        for &d in &config.fc_dims {
            fc.push(Dense {
                w: glorot(fan_in, d, &mut rng),
                b: Matrix::zeros(1, d),
            });
            fan_in = d;
        }
        Ok(Self {
            embed,
            layers,
            mu: Matrix::scalar(INIT_MU),
            sigma_raw: Matrix::scalar(inverse_softplus(INIT_SIGMA - SIGMA_FLOOR)),
            fc,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu.item()
    }

    pub fn sigma(&self) -> f64 {
        softplus(self.sigma_raw.item()) + SIGMA_FLOOR
    }

    /// All learnable tensors in a fixed order: embed, per layer `W E U b`,
    /// `mu`, `sigma_raw`, per dense layer `W b`.
    pub fn tensors(&self) -> Vec<&Matrix> {
        let mut out = vec![&self.embed];
        for l in &self.layers {
            out.extend([&l.w, &l.e, &l.u, &l.b]);
        }
        out.extend([&self.mu, &self.sigma_raw]);
        for d in &self.fc {
            out.extend([&d.w, &d.b]);
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = vec![&mut self.embed];
        for l in &mut self.layers {
            out.extend([&mut l.w, &mut l.e, &mut l.u, &mut l.b]);
        }
        out.extend([&mut self.mu, &mut self.sigma_raw]);
        for d in &mut self.fc {
            out.extend([&mut d.w, &mut d.b]);
        }
        out
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }

    /// Rebuilds parameters from tensors in [`tensors`](Self::tensors) order.
    pub fn from_tensors(config: &ModelConfig, tensors: Vec<Matrix>) -> Result<Self> {
        let shapes = config.tensor_shapes();
        if tensors.len() != shapes.len() {
            return Err(Error::Incompatible(format!(
                "expected {} tensors, found {}",
                shapes.len(),
                tensors.len()
            )));
        }
        for (k, (t, s)) in tensors.iter().zip(&shapes).enumerate() {
            if t.shape() != *s {
                return Err(Error::Incompatible(format!(
                    "tensor {k} has shape {:?}, expected {s:?}",
                    t.shape()
                )));
            }
        }
        let mut it = tensors.into_iter();
        let mut next = || it.next().expect("count checked");
        let embed = next();
        let layers = (0..config.num_gat_layers)
            .map(|_| GatParams {
                w: next(),
                e: next(),
                u: next(),
                b: next(),
            })
            .collect();
        let mu = next();
        let sigma_raw = next();
        let fc = config
            .fc_dims
            .iter()
            .map(|_| Dense {
                w: next(),
                b: next(),
            })
            .collect();
        Ok(Self {
            embed,
            layers,
            mu,
            sigma_raw,
            fc,
        })
    }

    /// Records every tensor as a differentiable leaf on `tape`.
    pub fn bind<'t>(&self, tape: &'t Tape) -> BoundParams<'t> {
        BoundParams {
            embed: tape.param(self.embed.clone()),
            layers: self.layers.iter().map(|l| l.bind(tape)).collect(),
            mu: tape.param(self.mu.clone()),
            sigma_raw: tape.param(self.sigma_raw.clone()),
            fc: self
                .fc
                .iter()
                .map(|d| (tape.param(d.w.clone()), tape.param(d.b.clone())))
                .collect(),
        }
    }
}

/// [`ModelParams`] recorded on a tape.
pub struct BoundParams<'t> {
    pub embed: Var<'t>,
    pub layers: Vec<BoundGat<'t>>,
    pub mu: Var<'t>,
    pub sigma_raw: Var<'t>,
    pub fc: Vec<(Var<'t>, Var<'t>)>,
}

impl<'t> BoundParams<'t> {
    /// Leaves in [`ModelParams::tensors`] order.
    pub fn vars(&self) -> Vec<Var<'t>> {
        let mut out = vec![self.embed];
        for l in &self.layers {
            out.extend(l.vars());
        }
        out.extend([self.mu, self.sigma_raw]);
        for &(w, b) in &self.fc {
            out.extend([w, b]);
        }
        out
    }

    /// `softplus(sigma_raw) + SIGMA_FLOOR`, on the tape.
    pub fn sigma(&self) -> Var<'t> {
        self.sigma_raw.softplus().add_scalar(SIGMA_FLOOR)
    }
}

/// Covalent-plus-contact adjacency: `a1` off the contact mask,
/// `exp(-(d - mu)^2 / sigma)` on it.
pub fn materialize_a2<'t>(
    sample: &GraphSample,
    mu: Var<'t>,
    sigma: Var<'t>,
) -> Result<Var<'t>> {
    gaussian_contacts(&sample.a1, &sample.dist, &sample.inter_mask, mu, sigma)
}

/// Inverted dropout: keeps each entry with probability `1 - rate` and scales
/// the survivors by `1 / (1 - rate)`.
fn dropout<'t, R: Rng>(x: Var<'t>, rate: f64, rng: &mut R) -> Result<Var<'t>> {
    if rate == 0.0 {
        return Ok(x);
    }
    let (r, c) = x.shape();
    let keep = 1.0 / (1.0 - rate);
    let mask = Matrix::from_fn(r, c, |_, _| if rng.gen::<f64>() < rate { 0.0 } else { keep });
    x.mul(x.tape().constant(mask))
}

/// Values recorded during one forward pass.
pub struct ForwardTrace<'t> {
    pub a2: Var<'t>,
    /// Per layer, the traces of the covalent and the contact branch.
    pub layers: Vec<(GatTrace<'t>, GatTrace<'t>)>,
    /// Pooled `1 x gat_dim` graph vector.
    pub pooled: Var<'t>,
    /// Pre-sigmoid score.
    pub logit: Var<'t>,
    pub probability: Var<'t>,
}

/// Runs the network on `tape`. Passing an RNG enables dropout.
pub fn forward<'t, R: Rng>(
    sample: &GraphSample,
    params: &BoundParams<'t>,
    config: &ModelConfig,
    mut dropout_rng: Option<&mut R>,
) -> Result<ForwardTrace<'t>> {
    let tape = params.embed.tape();
    if sample.features.cols() != config.input_dim {
        return Err(Error::Shape {
            op: "features",
            lhs: sample.features.shape(),
            rhs: (sample.num_atoms(), config.input_dim),
        });
    }
    let a1 = tape.constant(sample.a1.clone());
    let a2 = materialize_a2(sample, params.mu, params.sigma())?;

    let mut h = tape.constant(sample.features.clone()).matmul(params.embed)?;
    let mut layers = Vec::with_capacity(params.layers.len());
    for layer in &params.layers {
        let covalent = gat_forward_traced(h, a1, layer)?;
        let contact = gat_forward_traced(h, a2, layer)?;
        h = contact.output.sub(covalent.output)?;
        if config.gat_dropout {
            if let Some(rng) = dropout_rng.as_deref_mut() {
                h = dropout(h, config.dropout_rate, rng)?;
            }
        }
        layers.push((covalent, contact));
    }
    let pooled = h.col_sum();

    let mut z = pooled;
    let last = params.fc.len() - 1;
    for (k, &(w, b)) in params.fc.iter().enumerate() {
        z = z.matmul(w)?.add_row(b)?;
        if k < last {
            z = z.relu();
            if let Some(rng) = dropout_rng.as_deref_mut() {
                z = dropout(z, config.dropout_rate, rng)?;
            }
        }
    }
    Ok(ForwardTrace {
        a2,
        layers,
        pooled,
        logit: z,
        probability: z.sigmoid(),
    })
}

/// Inference-mode probability that the complex is active / near-native.
pub fn predict(sample: &GraphSample, params: &ModelParams, config: &ModelConfig) -> Result<f64> {
    let tape = Tape::new();
    let bound = params.bind(&tape);
    let out = forward::<ChaCha8Rng>(sample, &bound, config, None)?;
    let p = out.probability.value().item();
    Ok(p)
}
