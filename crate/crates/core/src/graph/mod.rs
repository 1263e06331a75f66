//! From annotated complexes to model-ready graphs.

mod cache;
mod pose;

pub use cache::{read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use pose::{compute_rmsd, label_pose, PoseLabel, NEGATIVE_RMSD, POSITIVE_RMSD};

use crate::chem::{featurize, ligand_first_order, Category, ComplexRecord};
use crate::error::{Error, Result};
use crate::math::Matrix;

/// Protein atoms not strictly closer than this to some ligand atom are
/// pruned (Å).
pub const PRUNE_CUTOFF: f64 = 8.0;
/// Ligand-protein pairs closer than this are intermolecular contacts (Å).
pub const CONTACT_CUTOFF: f64 = 5.0;

/// Model-ready sample. Atoms are ordered ligand first.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    pub complex_id: String,
    pub protein_id: String,
    pub pose_index: Option<u32>,
    pub category: Category,
    pub label: Option<u8>,
    pub rmsd: Option<f64>,
    pub num_ligand: usize,
    /// `N x 56` binary features.
    pub features: Matrix,
    /// Covalent adjacency with unit diagonal.
    pub a1: Matrix,
    /// Pairwise distances in Å.
    pub dist: Matrix,
    /// 1 for ligand-protein pairs closer than [`CONTACT_CUTOFF`].
    pub inter_mask: Matrix,
}

impl GraphSample {
    pub fn num_atoms(&self) -> usize {
        self.features.rows()
    }

    pub fn num_contacts(&self) -> usize {
        self.inter_mask.data().iter().filter(|&&v| v != 0.0).count() / 2
    }

    pub fn key(&self) -> String {
        match self.pose_index {
            Some(p) => format!("{}#{}", self.complex_id, p),
            None => self.complex_id.clone(),
        }
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Keeps protein atoms strictly closer than `cutoff` to some ligand atom;
/// an atom exactly at the cutoff is removed. Bonds touching removed atoms are
/// dropped; degree annotations are left as they were.
pub fn prune_protein(record: &ComplexRecord, cutoff: f64) -> Result<ComplexRecord> {
    let ligand: Vec<[f64; 3]> = record
        .atoms
        .iter()
        .filter(|a| a.is_ligand)
        .map(|a| a.position)
        .collect();
    let keep: Vec<bool> = record
        .atoms
        .iter()
        .map(|a| {
            a.is_ligand
                || ligand
                    .iter()
                    .map(|l| distance(l, &a.position))
                    .fold(f64::INFINITY, f64::min)
                    < cutoff
        })
        .collect();
    let atoms: Vec<_> = record
        .atoms
        .iter()
        .zip(&keep)
        .map(|(a, &k)| k.then(|| a.clone()))
        .collect();
    let (atoms, bonds) = crate::chem::drop_atoms(atoms, record.bonds.clone());
    let pruned = ComplexRecord {
        atoms,
        bonds,
        ..record.clone()
    };
    if pruned.num_protein_atoms() == 0 {
        return Err(Error::InvalidRecord {
            id: record.key(),
            msg: format!("no protein atoms within {cutoff} Å of the ligand"),
        });
    }
    Ok(pruned)
}

/// Builds features, covalent adjacency, distances and the contact mask.
/// The record is expected to be pruned already.
pub fn build_sample(record: &ComplexRecord) -> Result<GraphSample> {
    record.validate()?;
    let order = ligand_first_order(record);
    let n = order.len();
    let mut rank = vec![0; n];
    for (r, &k) in order.iter().enumerate() {
        rank[k] = r;
    }
    let atoms: Vec<_> = order.iter().map(|&k| &record.atoms[k]).collect();

    let mut a1 = Matrix::identity(n);
    for b in &record.bonds {
        let (i, j) = (rank[b.i], rank[b.j]);
        a1[(i, j)] = 1.0;
        a1[(j, i)] = 1.0;
    }
    let mut dist = Matrix::zeros(n, n);
    let mut inter_mask = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = distance(&atoms[i].position, &atoms[j].position);
            dist[(i, j)] = d;
            dist[(j, i)] = d;
            if atoms[i].is_ligand != atoms[j].is_ligand && d < CONTACT_CUTOFF {
                inter_mask[(i, j)] = 1.0;
                inter_mask[(j, i)] = 1.0;
            }
        }
    }
    if !dist.is_finite() {
        return Err(Error::InvalidRecord {
            id: record.key(),
            msg: "non-finite distances".into(),
        });
    }
    Ok(GraphSample {
        complex_id: record.complex_id.clone(),
        protein_id: record.protein_id.clone(),
        pose_index: record.pose_index,
        category: record.category,
        label: record.label,
        rmsd: record.rmsd,
        num_ligand: record.num_ligand_atoms(),
        features: featurize(record).matrix,
        a1,
        dist,
        inter_mask,
    })
}

/// Why a record did not become a sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Skip {
    /// Pose RMSD between the positive and negative thresholds.
    OmittedPose,
    Rejected(String),
}

/// Full preprocessing chain: pose labelling (when an RMSD is present and the
/// record carries no label), pruning at [`PRUNE_CUTOFF`], and sample assembly.
/// A PDBbind category follows the pose label.
pub fn preprocess(record: &ComplexRecord) -> std::result::Result<GraphSample, Skip> {
    let mut record = record.clone();
    if let (Some(r), None) = (record.rmsd, record.label) {
        match label_pose(r).map_err(|e| Skip::Rejected(e.to_string()))? {
            PoseLabel::Positive => record.label = Some(1),
            PoseLabel::Negative => record.label = Some(0),
            PoseLabel::Omitted => return Err(Skip::OmittedPose),
        }
        if matches!(record.category, Category::PdbbindPositive | Category::PdbbindNegative) {
            record.category = if record.label == Some(1) {
                Category::PdbbindPositive
            } else {
                Category::PdbbindNegative
            };
        }
    }
    let pruned = prune_protein(&record, PRUNE_CUTOFF).map_err(|e| Skip::Rejected(e.to_string()))?;
    build_sample(&pruned).map_err(|e| Skip::Rejected(e.to_string()))
}
