//! Minimal PDB reader for `ATOM`/`HETATM` records.
//!
//! Columns consumed (1-based, fixed width, per the wwPDB format):
//!
//! | columns | field |
//! |---------|-------|
//! | 1-6     | record name (`ATOM  ` or `HETATM`) |
//! | 13-16   | atom name |
//! | 17      | alternate location (only blank or `A` kept) |
//! | 18-20   | residue name |
//! | 22      | chain id |
//! | 23-26   | residue sequence number |
//! | 31-38, 39-46, 47-54 | x, y, z |
//! | 77-78   | element symbol (falls back to the atom name when blank) |
//!
//! Reading stops at the first `ENDMDL`. `CONECT` records are ignored; covalent
//! bonds are inferred from distances by [`infer_bonds`].

use super::element::Element;
use super::record::{Atom, Bond, BondOrder};
use crate::error::{Error, Result};

/// Bond when `d < BOND_TOLERANCE * (r_i + r_j)` with single-bond covalent radii.
pub const BOND_TOLERANCE: f64 = 1.3;

#[derive(Debug, Clone, PartialEq)]
pub struct PdbAtom {
    pub name: String,
    pub res_name: String,
    pub chain: char,
    pub res_seq: i32,
    pub element: String,
    pub position: [f64; 3],
    pub hetero: bool,
}

fn cols(line: &str, start: usize, end: usize) -> &str {
    let end = end.min(line.len());
    line.get(start.min(end)..end).unwrap_or("").trim()
}

fn element_from_name(name_field: &str) -> String {
    // Columns 13-14 hold the right-justified element symbol for standard names.
    let letters: String = name_field.chars().take(2).filter(|c| c.is_ascii_alphabetic()).collect();
    if name_field.starts_with(' ') || letters.len() < 2 {
        name_field
            .trim()
            .chars()
            .find(|c| c.is_ascii_alphabetic())
            .map(|c| c.to_string())
            .unwrap_or_default()
    } else {
        letters
    }
}

pub fn parse_pdb(text: &str, source: &str) -> Result<Vec<PdbAtom>> {
    let mut atoms = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.starts_with("ENDMDL") {
            break;
        }
        let hetero = line.starts_with("HETATM");
        if !(hetero || line.starts_with("ATOM")) {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            path: source.to_string(),
            line: k + 1,
            msg: msg.to_string(),
        };
        if line.len() < 54 {
            return Err(err("coordinate record shorter than 54 columns"));
        }
        let alt = line.as_bytes()[16] as char;
        if alt != ' ' && alt != 'A' {
            continue;
        }
        let coord = |s, e| -> Result<f64> {
            cols(line, s, e)
                .parse()
                .map_err(|_| err("unparseable coordinate"))
        };
        let position = [coord(30, 38)?, coord(38, 46)?, coord(46, 54)?];
        let name_field = line.get(12..16).unwrap_or("");
        let element = match cols(line, 76, 78) {
            "" => element_from_name(name_field),
            e => e.to_string(),
        };
        atoms.push(PdbAtom {
            name: name_field.trim().to_string(),
            res_name: cols(line, 17, 20).to_string(),
            chain: line.as_bytes().get(21).map_or(' ', |&b| b as char),
            res_seq: cols(line, 22, 26).parse().unwrap_or(0),
            element,
            position,
            hetero,
        });
    }
    Ok(atoms)
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Distance-based covalent bond inference. Returns pairs `(i, j)` with `i < j`
/// in lexicographic order.
pub fn infer_bonds(elements: &[Element], positions: &[[f64; 3]]) -> Vec<(usize, usize)> {
    let max_r = elements
        .iter()
        .map(|e| e.covalent_radius())
        .fold(0.0, f64::max);
    let reach = 2.0 * max_r * BOND_TOLERANCE;
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&a, &b| positions[a][0].total_cmp(&positions[b][0]));
    let mut pairs = Vec::new();
    for (s, &i) in order.iter().enumerate() {
        for &j in &order[s + 1..] {
            if positions[j][0] - positions[i][0] > reach {
                break;
            }
            let cutoff =
                BOND_TOLERANCE * (elements[i].covalent_radius() + elements[j].covalent_radius());
            if dist(&positions[i], &positions[j]) < cutoff {
                pairs.push((i.min(j), i.max(j)));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

#[derive(Debug, Clone)]
pub struct AnnotatedProtein {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    pub dropped_atoms: usize,
}

/// Filters unsupported elements, infers bonds (all treated as single) and
/// annotates degree, attached hydrogens and implicit valence.
pub fn annotate_protein(atoms: &[PdbAtom]) -> AnnotatedProtein {
    let mut kept = Vec::with_capacity(atoms.len());
    let mut dropped = 0;
    for a in atoms {
        match Element::from_symbol(&a.element) {
            Some(e) => kept.push((e, a.position)),
            None => dropped += 1,
        }
    }
    let elements: Vec<Element> = kept.iter().map(|k| k.0).collect();
    let positions: Vec<[f64; 3]> = kept.iter().map(|k| k.1).collect();
    let pairs = infer_bonds(&elements, &positions);
    let mut degree = vec![0u32; kept.len()];
    let mut hydrogens = vec![0u32; kept.len()];
    for &(i, j) in &pairs {
        degree[i] += 1;
        degree[j] += 1;
        if elements[j].is_hydrogen() {
            hydrogens[i] += 1;
        }
        if elements[i].is_hydrogen() {
            hydrogens[j] += 1;
        }
    }
    let atoms = kept
        .iter()
        .enumerate()
        .map(|(k, &(element, position))| Atom {
            element,
            position,
            is_ligand: false,
            degree: degree[k],
            num_hydrogens: hydrogens[k],
            implicit_valence: element.standard_valence().saturating_sub(degree[k]),
            aromatic: false,
        })
        .collect();
    let bonds = pairs
        .into_iter()
        .map(|(i, j)| Bond {
            i,
            j,
            order: BondOrder::Single,
        })
        .collect();
    AnnotatedProtein {
        atoms,
        bonds,
        dropped_atoms: dropped,
    }
}
