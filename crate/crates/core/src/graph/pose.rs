use crate::error::{Error, Result};

/// Poses closer than this to the reference are near-native (Å).
pub const POSITIVE_RMSD: f64 = 2.0;
/// Poses farther than this are decoys (Å).
pub const NEGATIVE_RMSD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoseLabel {
    Positive,
    Negative,
    /// Ambiguous poses are left out of training and evaluation.
    Omitted,
}

/// Plain coordinate RMSD between two equally ordered ligand poses in the same
/// frame: no superposition, no symmetry correction. Callers pass heavy atoms
/// only.
pub fn compute_rmsd(pose: &[[f64; 3]], reference: &[[f64; 3]]) -> Result<f64> {
    if pose.len() != reference.len() {
        return Err(Error::InvalidArgument(format!(
            "pose has {} atoms, reference has {}",
            pose.len(),
            reference.len()
        )));
    }
    if pose.is_empty() {
        return Err(Error::InvalidArgument("empty pose".into()));
    }
    let sq: f64 = pose
        .iter()
        .zip(reference)
        .map(|(p, r)| (0..3).map(|k| (p[k] - r[k]).powi(2)).sum::<f64>())
        .sum();
    Ok((sq / pose.len() as f64).sqrt())
}

pub fn label_pose(rmsd: f64) -> Result<PoseLabel> {
    if !(rmsd >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rmsd must be non-negative, got {rmsd}"
        )));
    }
    Ok(if rmsd < POSITIVE_RMSD {
        PoseLabel::Positive
    } else if rmsd > NEGATIVE_RMSD {
        PoseLabel::Negative
    } else {
        PoseLabel::Omitted
    })
}
