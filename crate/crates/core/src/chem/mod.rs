//! Structure ingest: canonical JSON-lines records, SDF ligands, PDB proteins,
//! and the 56-column atom features.

mod element;
mod features;
pub mod pdb;
mod record;
pub mod sdf;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

pub use element::Element;
pub use features::{
    encode_atom, featurize, ligand_first_order, FeatureMatrix, BLOCK_WIDTH, FEATURE_DIM,
};
pub use record::{
    parse_json_line, read_jsonl, read_jsonl_file, write_jsonl, Atom, Bond, BondOrder, Category,
    ComplexRecord, ParsedLine, SCHEMA_VERSION,
};

pub(crate) use record::drop_atoms;

use crate::error::Result;

/// Where a batch of complexes comes from.
#[derive(Debug, Clone)]
pub enum ComplexSource {
    /// Canonical JSON-lines file, one record per line.
    Jsonl(PathBuf),
    /// Ligand pose(s) from an SDF file placed in a protein from a PDB file.
    SdfPdb {
        ligand: PathBuf,
        protein: PathBuf,
        /// Defaults to the PDB file stem.
        protein_id: Option<String>,
        category: Category,
    },
}

/// Records parsed from one source plus what was thrown away on the way.
#[derive(Debug, Default)]
pub struct Ingested {
    pub records: Vec<ComplexRecord>,
    /// `(record key, reason)` for records that failed validation.
    pub rejected: Vec<(String, String)>,
    /// Atoms dropped because their element has no feature slot.
    pub dropped_atoms: usize,
}

impl Ingested {
    fn push(&mut self, record: ComplexRecord) {
        match record.validate() {
            Ok(()) => self.records.push(record),
            Err(e) => self.rejected.push((record.key(), e.to_string())),
        }
    }
}

fn file_stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Parses a source into validated records. Malformed files fail as a whole;
/// individual records that fail validation are listed in
/// [`Ingested::rejected`].
pub fn parse_complex(source: &ComplexSource) -> Result<Ingested> {
    let mut out = Ingested::default();
    match source {
        ComplexSource::Jsonl(path) => {
            for parsed in read_jsonl_file(path)? {
                out.dropped_atoms += parsed.dropped_atoms;
                out.push(parsed.record);
            }
        }
        ComplexSource::SdfPdb {
            ligand,
            protein,
            protein_id,
            category,
        } => {
            let pdb_text = std::fs::read_to_string(protein)?;
            let prot = pdb::annotate_protein(&pdb::parse_pdb(
                &pdb_text,
                &protein.display().to_string(),
            )?);
            let sdf_text = std::fs::read_to_string(ligand)?;
            let mols = sdf::parse_sdf(&sdf_text, &ligand.display().to_string())?;
            let protein_id = protein_id.clone().unwrap_or_else(|| file_stem(protein));
            out.dropped_atoms += prot.dropped_atoms;

            let mut seen: HashMap<String, u32> = HashMap::new();
            let ids: Vec<String> = mols
                .iter()
                .map(|m| {
                    if m.title.is_empty() {
                        file_stem(ligand)
                    } else {
                        m.title.clone()
                    }
                })
                .collect();
            for id in &ids {
                *seen.entry(id.clone()).or_default() += 1;
            }
            let mut next_pose: HashMap<String, u32> = HashMap::new();
            for (mol, complex_id) in mols.iter().zip(ids) {
                let lig = sdf::annotate_ligand(mol);
                out.dropped_atoms += lig.dropped_atoms;
                let pose_index = (seen[&complex_id] > 1).then(|| {
                    let p = next_pose.entry(complex_id.clone()).or_default();
                    *p += 1;
                    *p - 1
                });
                let offset = lig.atoms.len();
                let mut atoms = lig.atoms;
                atoms.extend(prot.atoms.iter().cloned());
                let mut bonds = lig.bonds;
                bonds.extend(prot.bonds.iter().map(|b| Bond {
                    i: b.i + offset,
                    j: b.j + offset,
                    order: b.order,
                }));
                let rmsd = ["rmsd", "RMSD"]
                    .iter()
                    .find_map(|k| mol.data.get(*k))
                    .and_then(|v| v.trim().parse().ok());
                out.push(ComplexRecord {
                    complex_id,
                    protein_id: protein_id.clone(),
                    category: *category,
                    // Poses with an RMSD are labelled from it during preprocessing.
                    label: if rmsd.is_some() { None } else { category.implied_label() },
                    rmsd,
                    pose_index,
                    atoms,
                    bonds,
                });
            }
        }
    }
    Ok(out)
}
