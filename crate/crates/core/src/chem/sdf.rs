//! Minimal MDL SDF / molfile V2000 reader.
//!
//! Columns consumed (1-based, fixed width):
//!
//! - counts line: atoms `1-3`, bonds `4-6`, version tag `V2000` anywhere on the line
//! - atom block: x `1-10`, y `11-20`, z `21-30`, symbol `32-34`
//! - bond block: first atom `1-3`, second atom `4-6`, type `7-9`
//!   (1 single, 2 double, 3 triple, 4 aromatic)
//!
//! Atom and bond lines that are not column aligned are accepted when their
//! whitespace-separated fields parse. Everything after `M  END` up to `$$$$`
//! is read as `> <name>` data items. Charges, isotopes, stereo and property
//! lines are ignored.

use std::collections::BTreeMap;

use super::element::Element;
use super::record::{drop_atoms, Atom, Bond, BondOrder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SdfAtom {
    pub symbol: String,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdfBond {
    /// Zero-based atom indices.
    pub i: usize,
    pub j: usize,
    pub bond_type: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdfMolecule {
    pub title: String,
    pub atoms: Vec<SdfAtom>,
    pub bonds: Vec<SdfBond>,
    pub data: BTreeMap<String, String>,
}

fn field(line: &str, start: usize, end: usize) -> Option<&str> {
    let end = end.min(line.len());
    line.get(start..end).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_counts(line: &str) -> Option<(usize, usize)> {
    let fixed = || -> Option<(usize, usize)> {
        Some((
            field(line, 0, 3)?.parse().ok()?,
            field(line, 3, 6)?.parse().ok()?,
        ))
    };
    fixed().or_else(|| {
        let mut it = line.split_whitespace();
        Some((it.next()?.parse().ok()?, it.next()?.parse().ok()?))
    })
}

fn parse_atom(line: &str) -> Option<SdfAtom> {
    let fixed = || -> Option<SdfAtom> {
        Some(SdfAtom {
            position: [
                field(line, 0, 10)?.parse().ok()?,
                field(line, 10, 20)?.parse().ok()?,
                field(line, 20, 30)?.parse().ok()?,
            ],
            symbol: field(line, 31, 34)?.to_string(),
        })
    };
    fixed().or_else(|| {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 4 {
            return None;
        }
        Some(SdfAtom {
            position: [f[0].parse().ok()?, f[1].parse().ok()?, f[2].parse().ok()?],
            symbol: f[3].to_string(),
        })
    })
}

fn parse_bond(line: &str) -> Option<(usize, usize, u8)> {
    let fixed = || -> Option<(usize, usize, u8)> {
        Some((
            field(line, 0, 3)?.parse().ok()?,
            field(line, 3, 6)?.parse().ok()?,
            field(line, 6, 9)?.parse().ok()?,
        ))
    };
    fixed().or_else(|| {
        let mut it = line.split_whitespace();
        Some((
            it.next()?.parse().ok()?,
            it.next()?.parse().ok()?,
            it.next()?.parse().ok()?,
        ))
    })
}

/// Parses every molecule in an SDF text. `source` names the input in errors.
pub fn parse_sdf(text: &str, source: &str) -> Result<Vec<SdfMolecule>> {
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, msg: String| Error::Parse {
        path: source.to_string(),
        line: line + 1,
        msg,
    };
    let mut mols = Vec::new();
    let mut k = 0;
    while k < lines.len() {
        if lines[k..].iter().all(|l| l.trim().is_empty()) {
            break;
        }
        if k + 3 >= lines.len() {
            return Err(err(k, "truncated molfile header".into()));
        }
        let title = lines[k].trim().to_string();
        let counts_at = k + 3;
        let counts = lines[counts_at];
        if counts.contains("V3000") {
            return Err(err(counts_at, "V3000 molfiles are not supported".into()));
        }
        let (na, nb) =
            parse_counts(counts).ok_or_else(|| err(counts_at, "bad counts line".into()))?;
        let mut atoms = Vec::with_capacity(na);
        for a in 0..na {
            let at = counts_at + 1 + a;
            let line = lines
                .get(at)
                .ok_or_else(|| err(at, "atom block truncated".into()))?;
            atoms.push(parse_atom(line).ok_or_else(|| err(at, "bad atom line".into()))?);
        }
        let mut bonds = Vec::with_capacity(nb);
        for b in 0..nb {
            let at = counts_at + 1 + na + b;
            let line = lines
                .get(at)
                .ok_or_else(|| err(at, "bond block truncated".into()))?;
            let (i, j, t) = parse_bond(line).ok_or_else(|| err(at, "bad bond line".into()))?;
            if i == 0 || j == 0 || i > na || j > na {
                return Err(err(at, format!("bond references atom out of range: {i}-{j}")));
            }
            if !(1..=4).contains(&t) {
                return Err(err(at, format!("unsupported bond type {t}")));
            }
            bonds.push(SdfBond {
                i: i - 1,
                j: j - 1,
                bond_type: t,
            });
        }
        k = counts_at + 1 + na + nb;
        // Property block, data items, terminator.
        let mut data = BTreeMap::new();
        let mut pending: Option<String> = None;
        let mut value = Vec::new();
        while k < lines.len() {
            let line = lines[k];
            k += 1;
            if line.starts_with("$$$$") {
                break;
            }
            if line.starts_with('>') {
                if let (Some(s), Some(e)) = (line.find('<'), line.rfind('>')) {
                    if e > s {
                        pending = Some(line[s + 1..e].to_string());
                        value.clear();
                        continue;
                    }
                }
            }
            if let Some(name) = &pending {
                if line.trim().is_empty() {
                    data.insert(name.clone(), value.join("\n"));
                    pending = None;
                } else {
                    value.push(line.trim().to_string());
                }
            }
        }
        if let Some(name) = pending {
            data.insert(name, value.join("\n"));
        }
        mols.push(SdfMolecule {
            title,
            atoms,
            bonds,
            data,
        });
    }
    Ok(mols)
}

/// Ligand atoms and bonds annotated from the bond block.
#[derive(Debug, Clone)]
pub struct AnnotatedLigand {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    pub dropped_atoms: usize,
}

/// Derives degree, attached hydrogens, implicit valence and aromaticity from
/// the explicit bonds, then drops atoms whose element has no feature slot.
///
/// Annotations are computed on the full molecule before dropping, so they
/// describe the parent molecule.
pub fn annotate_ligand(mol: &SdfMolecule) -> AnnotatedLigand {
    let n = mol.atoms.len();
    let elements: Vec<Option<Element>> = mol
        .atoms
        .iter()
        .map(|a| Element::from_symbol(&a.symbol))
        .collect();
    let mut degree = vec![0u32; n];
    let mut hydrogens = vec![0u32; n];
    let mut order_sum = vec![0f64; n];
    let mut aromatic = vec![false; n];
    let mut bonds = Vec::with_capacity(mol.bonds.len());
    for b in &mol.bonds {
        let order = match b.bond_type {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            _ => BondOrder::Aromatic,
        };
        for (a, other) in [(b.i, b.j), (b.j, b.i)] {
            degree[a] += 1;
            order_sum[a] += order.valence();
            if elements[other] == Some(Element::H) {
                hydrogens[a] += 1;
            }
            if order == BondOrder::Aromatic {
                aromatic[a] = true;
            }
        }
        bonds.push(Bond {
            i: b.i,
            j: b.j,
            order,
        });
    }
    let mut dropped = 0;
    let atoms = mol
        .atoms
        .iter()
        .enumerate()
        .map(|(k, a)| match elements[k] {
            Some(element) => Some(Atom {
                element,
                position: a.position,
                is_ligand: true,
                degree: degree[k],
                num_hydrogens: hydrogens[k],
                implicit_valence: (element.standard_valence() as f64 - order_sum[k])
                    .max(0.0)
                    .floor() as u32,
                aromatic: aromatic[k],
            }),
            None => {
                dropped += 1;
                None
            }
        })
        .collect();
    let (atoms, bonds) = drop_atoms(atoms, bonds);
    AnnotatedLigand {
        atoms,
        bonds,
        dropped_atoms: dropped,
    }
}
