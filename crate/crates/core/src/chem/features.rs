//! 56-column binary atom features.
//!
//! Each atom fills one 28-column block: ligand atoms use columns `0..28`,
//! protein atoms `28..56`, and the other block stays zero. Within a block:
//!
//! | offset | width | meaning |
//! |--------|-------|---------|
//! | 0      | 10    | element one-hot `C N O S F P Cl Br B H` |
//! | 10     | 6     | degree `0..=5` |
//! | 16     | 5     | attached hydrogens `0..=4` |
//! | 21     | 6     | implicit valence `0..=5` |
//! | 27     | 1     | aromatic flag |

use super::record::{Atom, ComplexRecord};
use crate::math::Matrix;

pub const BLOCK_WIDTH: usize = 28;
pub const FEATURE_DIM: usize = 2 * BLOCK_WIDTH;

const DEGREE_OFFSET: usize = 10;
const HYDROGEN_OFFSET: usize = 16;
const VALENCE_OFFSET: usize = 21;
const AROMATIC_OFFSET: usize = 27;

const MAX_DEGREE: u32 = 5;
const MAX_HYDROGENS: u32 = 4;
const MAX_VALENCE: u32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    /// `N x 56`, rows in ligand-first order.
    pub matrix: Matrix,
    /// Number of annotations that exceeded their last one-hot slot.
    pub clamped: usize,
}

/// Atom indices with ligand atoms first, each group in record order.
pub fn ligand_first_order(record: &ComplexRecord) -> Vec<usize> {
    let lig = (0..record.atoms.len()).filter(|&k| record.atoms[k].is_ligand);
    let prot = (0..record.atoms.len()).filter(|&k| !record.atoms[k].is_ligand);
    lig.chain(prot).collect()
}

/// Writes the 56-wide feature row of `atom` into `row`; returns how many
/// annotations were clamped.
pub fn encode_atom(atom: &Atom, row: &mut [f64]) -> usize {
    debug_assert_eq!(row.len(), FEATURE_DIM);
    row.fill(0.0);
    let base = if atom.is_ligand { 0 } else { BLOCK_WIDTH };
    let mut clamped = 0;
    let mut slot = |v: u32, max: u32| {
        if v > max {
            clamped += 1;
        }
        v.min(max) as usize
    };
    let degree = slot(atom.degree, MAX_DEGREE);
    let hydrogens = slot(atom.num_hydrogens, MAX_HYDROGENS);
    let valence = slot(atom.implicit_valence, MAX_VALENCE);
    row[base + atom.element.index()] = 1.0;
    row[base + DEGREE_OFFSET + degree] = 1.0;
    row[base + HYDROGEN_OFFSET + hydrogens] = 1.0;
    row[base + VALENCE_OFFSET + valence] = 1.0;
    if atom.aromatic {
        row[base + AROMATIC_OFFSET] = 1.0;
    }
    clamped
}

pub fn featurize(record: &ComplexRecord) -> FeatureMatrix {
    let order = ligand_first_order(record);
    let mut matrix = Matrix::zeros(order.len(), FEATURE_DIM);
    let mut clamped = 0;
    for (r, &k) in order.iter().enumerate() {
        clamped += encode_atom(&record.atoms[k], matrix.row_mut(r));
    }
    FeatureMatrix { matrix, clamped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::Element;

    fn atom(element: Element, is_ligand: bool) -> Atom {
        Atom {
            element,
            position: [0.0; 3],
            is_ligand,
            degree: 3,
            num_hydrogens: 1,
            implicit_valence: 0,
            aromatic: false,
        }
    }

    #[test]
    fn aromatic_ligand_carbon() {
        let mut a = atom(Element::C, true);
        a.aromatic = true;
        let mut row = vec![0.0; FEATURE_DIM];
        assert_eq!(encode_atom(&a, &mut row), 0);
        assert_eq!(row[0], 1.0);
        assert_eq!(row[27], 1.0);
        assert_eq!(row[10 + 3], 1.0);
        assert_eq!(row[16 + 1], 1.0);
        assert_eq!(row[21], 1.0);
        assert!(row[28..].iter().all(|&v| v == 0.0));
        assert_eq!(row.iter().sum::<f64>(), 5.0);
    }

    #[test]
    fn protein_block_is_offset() {
        let a = atom(Element::Br, false);
        let mut row = vec![0.0; FEATURE_DIM];
        encode_atom(&a, &mut row);
        assert!(row[..28].iter().all(|&v| v == 0.0));
        assert_eq!(row[28 + 7], 1.0);
        assert_eq!(row.iter().sum::<f64>(), 4.0);
    }

    #[test]
    fn out_of_range_annotations_clamp() {
        let mut a = atom(Element::N, true);
        a.degree = 7;
        a.num_hydrogens = 9;
        a.implicit_valence = 6;
        let mut row = vec![0.0; FEATURE_DIM];
        assert_eq!(encode_atom(&a, &mut row), 3);
        assert_eq!(row[10 + 5], 1.0);
        assert_eq!(row[16 + 4], 1.0);
        assert_eq!(row[21 + 5], 1.0);
    }
}
