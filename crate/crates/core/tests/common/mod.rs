#![allow(dead_code)]

use gnn_dti::chem::{Atom, Bond, BondOrder, Category, ComplexRecord, Element};
use gnn_dti::graph::{build_sample, GraphSample};
use gnn_dti::math::{Matrix, Tape, Var};
use gnn_dti::model::{ModelConfig, ModelParams};
use gnn_dti::train::{bce_loss, sample_gradients};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-4;
/// Below this magnitude a gradient is compared absolutely.
pub const FD_FLOOR: f64 = 1e-6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: usize, c: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.gen_range(lo..hi))
}

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FD_FLOOR)
}

/// Worst relative error of one comparison and where it happened.
#[derive(Debug, Clone, Default)]
pub struct FdReport {
    pub worst: f64,
    pub at: String,
    pub checked: usize,
}

impl FdReport {
    pub fn record(&mut self, analytic: f64, numeric: f64, at: impl FnOnce() -> String) {
        let e = rel_err(analytic, numeric);
        self.checked += 1;
        if e >= self.worst {
            self.worst = e;
            self.at = format!("{} (analytic {analytic:e}, numeric {numeric:e})", at());
        }
    }

    pub fn merge(&mut self, other: FdReport) {
        self.checked += other.checked;
        if other.worst >= self.worst {
            self.worst = other.worst;
            self.at = other.at;
        }
    }

    pub fn ok(&self) -> bool {
        self.checked > 0 && self.worst <= FD_REL_TOL
    }
}

/// Central-difference check of every entry of every input against the tape
/// gradient of the scalar built by `build`.
pub fn check_op<F>(name: &str, inputs: &[Matrix], build: F) -> FdReport
where
    F: for<'t> Fn(&'t Tape, &[Var<'t>]) -> Var<'t>,
{
    let eval = |ms: &[Matrix]| -> f64 {
        let tape = Tape::new();
        let vars: Vec<Var> = ms.iter().map(|m| tape.param(m.clone())).collect();
        let v = build(&tape, &vars).value().item();
        v
    };
    let tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|m| tape.param(m.clone())).collect();
    let loss = build(&tape, &vars);
    let grads = tape.backward(loss).expect("scalar loss");
    let mut report = FdReport::default();
    for (k, v) in vars.iter().enumerate() {
        let g = grads.get_or_zeros(*v);
        for e in 0..inputs[k].len() {
            let mut plus = inputs.to_vec();
            plus[k].data_mut()[e] += FD_STEP;
            let mut minus = inputs.to_vec();
            minus[k].data_mut()[e] -= FD_STEP;
            let numeric = (eval(&plus) - eval(&minus)) / (2.0 * FD_STEP);
            report.record(g.data()[e], numeric, || format!("{name} input {k} entry {e}"));
        }
    }
    report
}

/// Scalar projection `sum(x * R)` with a fixed random `R`, so every output
/// entry carries a distinct weight.
pub fn project<'t>(x: Var<'t>, seed: u64) -> Var<'t> {
    let (r, c) = x.shape();
    let w = random_matrix(r, c, -1.0, 1.0, &mut rng(seed));
    x.mul(x.tape().constant(w)).expect("same shape").sum()
}

pub fn atom(element: Element, position: [f64; 3], is_ligand: bool) -> Atom {
    Atom {
        element,
        position,
        is_ligand,
        degree: 1,
        num_hydrogens: 0,
        implicit_valence: 1,
        aromatic: false,
    }
}

pub fn bond(i: usize, j: usize) -> Bond {
    Bond {
        i,
        j,
        order: BondOrder::Single,
    }
}

pub fn record(id: &str, atoms: Vec<Atom>, bonds: Vec<Bond>) -> ComplexRecord {
    ComplexRecord {
        complex_id: id.into(),
        protein_id: "prot".into(),
        category: Category::DudeActive,
        label: Some(1),
        rmsd: None,
        pose_index: None,
        atoms,
        bonds,
    }
}

/// Eight atoms: a bonded 3-atom ligand and 5 protein atoms, 4 of them in
/// contact at assorted distances.
pub fn tiny_record() -> ComplexRecord {
    record(
        "tiny",
        vec![
            atom(Element::C, [0.0, 0.0, 0.0], true),
            atom(Element::N, [1.4, 0.2, 0.0], true),
            atom(Element::O, [2.1, 1.3, 0.3], true),
            atom(Element::O, [3.0, -2.1, 0.4], false),
            atom(Element::C, [4.1, -2.6, 1.1], false),
            atom(Element::N, [-1.2, 3.3, 0.9], false),
            atom(Element::S, [-2.8, -1.9, 2.2], false),
            atom(Element::C, [5.9, 2.2, -1.0], false),
        ],
        vec![bond(0, 1), bond(1, 2), bond(3, 4)],
    )
}

pub fn tiny_sample() -> GraphSample {
    build_sample(&tiny_record()).expect("valid fixture")
}

pub fn small_config() -> ModelConfig {
    ModelConfig {
        num_gat_layers: 2,
        gat_dim: 5,
        fc_dims: vec![4, 3, 1],
        dropout_rate: 0.0,
        ..ModelConfig::default()
    }
}

fn model_loss(sample: &GraphSample, params: &ModelParams, config: &ModelConfig) -> f64 {
    let p = gnn_dti::model::predict(sample, params, config).expect("forward");
    bce_loss(p, sample.label.expect("labelled")).expect("valid label")
}

/// Finite differences of the BCE loss with respect to model parameters.
/// `per_tensor` limits the number of entries checked per tensor (spread
/// evenly); `None` checks everything.
pub fn check_model(
    sample: &GraphSample,
    params: &ModelParams,
    config: &ModelConfig,
    per_tensor: Option<usize>,
) -> Vec<(usize, FdReport)> {
    let (_, grads) = sample_gradients(sample, params, config, None).expect("gradients");
    let n_tensors = params.tensors().len();
    let mut out = Vec::new();
    for k in 0..n_tensors {
        let len = params.tensors()[k].len();
        let entries: Vec<usize> = match per_tensor {
            Some(m) if m < len => (0..m).map(|i| i * len / m + (len / m) / 2).collect(),
            _ => (0..len).collect(),
        };
        let mut report = FdReport::default();
        for e in entries {
            let mut plus = params.clone();
            plus.tensors_mut()[k].data_mut()[e] += FD_STEP;
            let mut minus = params.clone();
            minus.tensors_mut()[k].data_mut()[e] -= FD_STEP;
            let numeric =
                (model_loss(sample, &plus, config) - model_loss(sample, &minus, config)) / (2.0 * FD_STEP);
            report.record(grads[k].data()[e], numeric, || format!("tensor {k} entry {e}"));
        }
        out.push((k, report));
    }
    out
}

/// Random proper rotation (via a normalised random quaternion).
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = [0, 1, 2, 3].map(|_| rng.gen_range(-1.0..1.0));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn rigid_motion(record: &ComplexRecord, rot: &[[f64; 3]; 3], shift: [f64; 3]) -> ComplexRecord {
    let mut r = record.clone();
    for a in &mut r.atoms {
        let p = a.position;
        a.position = [0, 1, 2].map(|i| rot[i][0] * p[0] + rot[i][1] * p[1] + rot[i][2] * p[2] + shift[i]);
    }
    r
}

/// Reorders atoms by `perm` (new position k holds old atom `perm[k]`) and
/// remaps bonds.
pub fn permute_atoms(record: &ComplexRecord, perm: &[usize]) -> ComplexRecord {
    let mut inverse = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let mut r = record.clone();
    r.atoms = perm.iter().map(|&old| record.atoms[old].clone()).collect();
    r.bonds = record
        .bonds
        .iter()
        .map(|b| Bond {
            i: inverse[b.i],
            j: inverse[b.j],
            order: b.order,
        })
        .collect();
    r
}

pub fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
