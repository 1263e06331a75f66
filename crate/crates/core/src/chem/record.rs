//! Canonical complex records and the JSON-lines interchange format.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::element::Element;
use crate::error::{Error, Result};

/// Version written to (and required from) every JSON-lines record.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub element: Element,
    /// Cartesian coordinates in Å.
    pub position: [f64; 3],
    pub is_ligand: bool,
    pub degree: u32,
    pub num_hydrogens: u32,
    pub implicit_valence: u32,
    pub aromatic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to the explicit valence sum.
    pub fn valence(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub order: BondOrder,
}

/// Dataset category used for balanced batch construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    DudeActive,
    DudeInactive,
    PdbbindPositive,
    PdbbindNegative,
    Unlabeled,
}

impl Category {
    pub const TRAINING: [Category; 4] = [
        Category::DudeActive,
        Category::DudeInactive,
        Category::PdbbindPositive,
        Category::PdbbindNegative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::DudeActive => "dude_active",
            Category::DudeInactive => "dude_inactive",
            Category::PdbbindPositive => "pdbbind_positive",
            Category::PdbbindNegative => "pdbbind_negative",
            Category::Unlabeled => "unlabeled",
        }
    }

    pub fn from_name(s: &str) -> Option<Category> {
        [
            Category::DudeActive,
            Category::DudeInactive,
            Category::PdbbindPositive,
            Category::PdbbindNegative,
            Category::Unlabeled,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }

    /// The label implied by the category, if any.
    pub fn implied_label(self) -> Option<u8> {
        match self {
            Category::DudeActive | Category::PdbbindPositive => Some(1),
            Category::DudeInactive | Category::PdbbindNegative => Some(0),
            Category::Unlabeled => None,
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Option<Category> {
        [
            Category::DudeActive,
            Category::DudeInactive,
            Category::PdbbindPositive,
            Category::PdbbindNegative,
            Category::Unlabeled,
        ]
        .get(c as usize)
        .copied()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One protein-ligand complex (or one docking pose of a complex).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub complex_id: String,
    pub protein_id: String,
    pub category: Category,
    pub label: Option<u8>,
    /// Pose RMSD to the reference structure, Å.
    pub rmsd: Option<f64>,
    /// Distinguishes docking poses that share a `complex_id`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose_index: Option<u32>,
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
}

impl ComplexRecord {
    pub fn num_ligand_atoms(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_ligand).count()
    }

    pub fn num_protein_atoms(&self) -> usize {
        self.atoms.len() - self.num_ligand_atoms()
    }

    /// Display key including the pose index when present.
    pub fn key(&self) -> String {
        match self.pose_index {
            Some(p) => format!("{}#{}", self.complex_id, p),
            None => self.complex_id.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Error::InvalidRecord {
            id: self.key(),
            msg,
        };
        if self.num_ligand_atoms() == 0 {
            return Err(invalid("no ligand atoms".into()));
        }
        if self.num_protein_atoms() == 0 {
            return Err(invalid("no protein atoms".into()));
        }
        if let Some(l) = self.label {
            if l > 1 {
                return Err(invalid(format!("label {l} not in {{0,1}}")));
            }
        }
        if let Some(r) = self.rmsd {
            if !(r.is_finite() && r >= 0.0) {
                return Err(invalid(format!("rmsd {r} must be finite and non-negative")));
            }
        }
        for (k, a) in self.atoms.iter().enumerate() {
            if !a.position.iter().all(|v| v.is_finite()) {
                return Err(invalid(format!("atom {k} has non-finite coordinates")));
            }
        }
        let n = self.atoms.len();
        for b in &self.bonds {
            if b.i >= n || b.j >= n {
                return Err(invalid(format!("bond {}-{} out of range", b.i, b.j)));
            }
            if b.i == b.j {
                return Err(invalid(format!("self bond on atom {}", b.i)));
            }
            if self.atoms[b.i].is_ligand != self.atoms[b.j].is_ligand {
                return Err(invalid(format!(
                    "bond {}-{} crosses ligand/protein",
                    b.i, b.j
                )));
            }
        }
        Ok(())
    }

    /// Serializes as one canonical JSON line (no trailing newline).
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(&Versioned {
            schema_version: SCHEMA_VERSION,
            record: self,
        })?)
    }

    /// Ligand coordinates of heavy atoms, in record order.
    pub fn heavy_ligand_positions(&self) -> Vec<[f64; 3]> {
        self.atoms
            .iter()
            .filter(|a| a.is_ligand && !a.element.is_hydrogen())
            .map(|a| a.position)
            .collect()
    }
}

#[derive(Serialize)]
struct Versioned<'a> {
    schema_version: u32,
    #[serde(flatten)]
    record: &'a ComplexRecord,
}

#[derive(Deserialize)]
struct RawRecord {
    schema_version: u32,
    complex_id: String,
    protein_id: String,
    category: Category,
    label: Option<u8>,
    rmsd: Option<f64>,
    #[serde(default)]
    pose_index: Option<u32>,
    atoms: Vec<RawAtom>,
    bonds: Vec<Bond>,
}

#[derive(Deserialize)]
struct RawAtom {
    element: String,
    position: [f64; 3],
    is_ligand: bool,
    degree: u32,
    num_hydrogens: u32,
    implicit_valence: u32,
    aromatic: bool,
}

/// Removes atoms flagged `None` and renumbers the bonds; bonds touching a
/// removed atom are discarded. Returns the kept atoms and bonds.
pub(crate) fn drop_atoms(atoms: Vec<Option<Atom>>, bonds: Vec<Bond>) -> (Vec<Atom>, Vec<Bond>) {
    let mut remap = vec![usize::MAX; atoms.len()];
    let mut kept = Vec::with_capacity(atoms.len());
    for (k, a) in atoms.into_iter().enumerate() {
        if let Some(a) = a {
            remap[k] = kept.len();
            kept.push(a);
        }
    }
    let bonds = bonds
        .into_iter()
        .filter_map(|b| {
            let (i, j) = (*remap.get(b.i)?, *remap.get(b.j)?);
            (i != usize::MAX && j != usize::MAX).then_some(Bond { i, j, order: b.order })
        })
        .collect();
    (kept, bonds)
}

/// Outcome of parsing one JSON line.
#[derive(Debug)]
pub struct ParsedLine {
    pub record: ComplexRecord,
    pub dropped_atoms: usize,
}

/// Parses one canonical JSON line. Atoms with unsupported elements are
/// dropped and counted; the record is not validated here.
pub fn parse_json_line(line: &str) -> std::result::Result<ParsedLine, String> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "schema_version {} unsupported (expected {SCHEMA_VERSION})",
            raw.schema_version
        ));
    }
    let mut dropped = 0;
    let atoms = raw
        .atoms
        .into_iter()
        .map(|a| match Element::from_symbol(&a.element) {
            Some(element) => Some(Atom {
                element,
                position: a.position,
                is_ligand: a.is_ligand,
                degree: a.degree,
                num_hydrogens: a.num_hydrogens,
                implicit_valence: a.implicit_valence,
                aromatic: a.aromatic,
            }),
            None => {
                dropped += 1;
                None
            }
        })
        .collect();
    let (atoms, bonds) = drop_atoms(atoms, raw.bonds);
    Ok(ParsedLine {
        record: ComplexRecord {
            complex_id: raw.complex_id,
            protein_id: raw.protein_id,
            category: raw.category,
            label: raw.label,
            rmsd: raw.rmsd,
            pose_index: raw.pose_index,
            atoms,
            bonds,
        },
        dropped_atoms: dropped,
    })
}

/// Reads every record of a JSON-lines stream. Blank lines are skipped; a
/// malformed line aborts with its 1-based line number.
pub fn read_jsonl<R: BufRead>(reader: R, source: &str) -> Result<Vec<ParsedLine>> {
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_json_line(&line).map_err(|msg| Error::Parse {
            path: source.to_string(),
            line: k + 1,
            msg,
        })?;
        out.push(parsed);
    }
    Ok(out)
}

pub fn read_jsonl_file(path: &Path) -> Result<Vec<ParsedLine>> {
    let f = std::fs::File::open(path)?;
    read_jsonl(std::io::BufReader::new(f), &path.display().to_string())
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[ComplexRecord]) -> Result<()> {
    for r in records {
        writeln!(w, "{}", r.to_json_line()?)?;
    }
    Ok(())
}
