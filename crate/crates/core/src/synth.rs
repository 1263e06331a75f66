//! Synthetic complexes with a planted, geometry-defined label.
//!
//! A complex is active when some ligand N or O sits within
//! [`SynthConfig::contact`] Å of a protein atom of the other kind (O or N).
//! Both classes carry decoys: a near-miss N–O pair a little outside the cutoff
//! and close contacts between other element pairs, so neither element
//! composition nor contact counts give the label away.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chem::{Atom, Bond, BondOrder, Category, ComplexRecord, Element};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    /// `dude_active` / `dude_inactive` categories.
    Screening,
    /// Screening categories for even complexes, `pdbbind_positive` /
    /// `pdbbind_negative` for odd ones.
    Mixed,
    /// Every complex becomes several docking poses of one ligand with an RMSD
    /// annotation and no label.
    Poses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_complexes: usize,
    pub num_proteins: usize,
    pub ligand_atoms: (usize, usize),
    pub protein_atoms: (usize, usize),
    /// N–O distance below which a complex is active (Å).
    pub contact: f64,
    /// Fraction of active complexes.
    pub positive_fraction: f64,
    pub poses_per_complex: usize,
    pub mode: SynthMode,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_complexes: 100,
            num_proteins: 10,
            ligand_atoms: (5, 15),
            protein_atoms: (20, 40),
            contact: 3.5,
            positive_fraction: 0.5,
            poses_per_complex: 4,
            mode: SynthMode::Screening,
            seed: 0,
        }
    }
}

// Geometry margins around the cutoff.
const PLANT_MIN: f64 = 2.7;
const NEAR_MISS_MIN: f64 = 4.0;
const NEAR_MISS_MAX: f64 = 4.8;
const CLASH: f64 = 3.0;
const PROTEIN_SPACING: f64 = 2.2;
const PROTEIN_SHELL: f64 = 7.5;
const BOND_LENGTH: f64 = 1.5;

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn offset(p: &[f64; 3], dir: &[f64; 3], r: f64) -> [f64; 3] {
    [p[0] + dir[0] * r, p[1] + dir[1] * r, p[2] + dir[2] * r]
}

/// True for ligand-N/protein-O and ligand-O/protein-N pairs.
pub fn is_donor_acceptor(ligand: Element, protein: Element) -> bool {
    matches!(
        (ligand, protein),
        (Element::N, Element::O) | (Element::O, Element::N)
    )
}

/// Ground-truth label: some intermolecular N–O pair closer than `contact`.
pub fn planted_label(record: &ComplexRecord, contact: f64) -> u8 {
    let (lig, prot): (Vec<&Atom>, Vec<&Atom>) = record.atoms.iter().partition(|a| a.is_ligand);
    let hit = lig.iter().any(|l| {
        prot.iter().any(|p| {
            is_donor_acceptor(l.element, p.element) && dist(&l.position, &p.position) < contact
        })
    });
    u8::from(hit)
}

struct Ligand {
    elements: Vec<Element>,
    positions: Vec<[f64; 3]>,
    bonds: Vec<(usize, usize)>,
}

fn ligand<R: Rng>(rng: &mut R, n: usize) -> Ligand {
    let mut elements = Vec::with_capacity(n);
    let mut positions: Vec<[f64; 3]> = vec![[0.0; 3]];
    let mut bonds = Vec::new();
    while positions.len() < n {
        let parent = rng.gen_range(0..positions.len());
        let p = offset(&positions[parent], &unit(rng), BOND_LENGTH);
        if positions.iter().all(|q| dist(&p, q) > 1.3) {
            bonds.push((parent, positions.len()));
            positions.push(p);
        }
    }
    // One N and one O in every ligand so composition is uninformative.
    for k in 0..n {
        elements.push(match k {
            0 => Element::N,
            1 => Element::O,
            _ => match rng.gen_range(0..20) {
                0..=11 => Element::C,
                12..=14 => Element::N,
                15..=17 => Element::O,
                18 => Element::S,
                _ => Element::F,
            },
        });
    }
    let centre = centroid(&positions);
    for p in &mut positions {
        for d in 0..3 {
            p[d] -= centre[d];
        }
    }
    Ligand {
        elements,
        positions,
        bonds,
    }
}

fn centroid(ps: &[[f64; 3]]) -> [f64; 3] {
    let mut c = [0.0; 3];
    for p in ps {
        for d in 0..3 {
            c[d] += p[d] / ps.len() as f64;
        }
    }
    c
}

/// Whether a protein atom of `element` at `p` keeps the geometry rules:
/// no clash with the ligand (except the planted partner), no N–O pair under
/// the near-miss floor (except the planted one) and protein atoms spaced out.
fn admissible(
    lig: &Ligand,
    protein: &[(Element, [f64; 3])],
    element: Element,
    p: &[f64; 3],
    exempt: Option<usize>,
) -> bool {
    for (k, (le, lp)) in lig.elements.iter().zip(&lig.positions).enumerate() {
        if Some(k) == exempt {
            continue;
        }
        let d = dist(p, lp);
        if d < CLASH || (is_donor_acceptor(*le, element) && d < NEAR_MISS_MIN) {
            return false;
        }
    }
    protein.iter().all(|(_, q)| dist(p, q) >= PROTEIN_SPACING)
}

fn partner(e: Element) -> Element {
    if e == Element::N {
        Element::O
    } else {
        Element::N
    }
}

/// Places a protein atom of `element` at a distance in `range` from ligand
/// atom `anchor`, pointing away from the ligand.
fn place<R: Rng>(
    rng: &mut R,
    lig: &Ligand,
    protein: &[(Element, [f64; 3])],
    anchor: usize,
    element: Element,
    range: (f64, f64),
    exempt: bool,
) -> Option<[f64; 3]> {
    let a = lig.positions[anchor];
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt().max(1e-6);
    let out = [a[0] / norm, a[1] / norm, a[2] / norm];
    for _ in 0..200 {
        let jitter = unit(rng);
        let mut dir = [out[0] + 0.8 * jitter[0], out[1] + 0.8 * jitter[1], out[2] + 0.8 * jitter[2]];
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        if n < 1e-6 {
            continue;
        }
        dir.iter_mut().for_each(|v| *v /= n);
        let p = offset(&a, &dir, rng.gen_range(range.0..range.1));
        if admissible(lig, protein, element, &p, exempt.then_some(anchor)) {
            return Some(p);
        }
    }
    None
}

fn protein_element<R: Rng>(rng: &mut R) -> Element {
    match rng.gen_range(0..10) {
        0..=4 => Element::C,
        5..=6 => Element::N,
        7..=8 => Element::O,
        _ => Element::S,
    }
}

fn complex<R: Rng>(
    rng: &mut R,
    cfg: &SynthConfig,
    positive: bool,
) -> Option<(Ligand, Vec<(Element, [f64; 3])>)> {
    let n_lig = rng.gen_range(cfg.ligand_atoms.0..=cfg.ligand_atoms.1);
    let n_prot = rng.gen_range(cfg.protein_atoms.0..=cfg.protein_atoms.1);
    let lig = ligand(rng, n_lig);
    let polar: Vec<usize> = (0..n_lig)
        .filter(|&k| matches!(lig.elements[k], Element::N | Element::O))
        .collect();
    let mut protein: Vec<(Element, [f64; 3])> = Vec::with_capacity(n_prot);

    if positive {
        let anchor = polar[rng.gen_range(0..polar.len())];
        let e = partner(lig.elements[anchor]);
        let p = place(rng, &lig, &protein, anchor, e, (PLANT_MIN, cfg.contact - 0.2), true)?;
        protein.push((e, p));
    }
    let anchor = polar[rng.gen_range(0..polar.len())];
    let e = partner(lig.elements[anchor]);
    let p = place(rng, &lig, &protein, anchor, e, (NEAR_MISS_MIN, NEAR_MISS_MAX), false)?;
    protein.push((e, p));
    // Close non-polar contacts.
    for _ in 0..2 {
        let anchor = rng.gen_range(0..n_lig);
        let p = place(rng, &lig, &protein, anchor, Element::C, (CLASH, cfg.contact), false)?;
        protein.push((Element::C, p));
    }
    let mut attempts = 0;
    while protein.len() < n_prot {
        attempts += 1;
        if attempts > 5000 {
            return None;
        }
        let e = protein_element(rng);
        let anchor = rng.gen_range(0..n_lig);
        if let Some(p) = place(rng, &lig, &protein, anchor, e, (CLASH, PROTEIN_SHELL), false) {
            protein.push((e, p));
        }
    }
    Some((lig, protein))
}

fn atom(element: Element, position: [f64; 3], is_ligand: bool, degree: u32) -> Atom {
    Atom {
        element,
        position,
        is_ligand,
        degree,
        num_hydrogens: 0,
        implicit_valence: element.standard_valence().saturating_sub(degree),
        aromatic: false,
    }
}

fn rotate(p: &[f64; 3], axis: &[f64; 3], angle: f64) -> [f64; 3] {
    // Rodrigues' formula.
    let (s, c) = angle.sin_cos();
    let dot = axis[0] * p[0] + axis[1] * p[1] + axis[2] * p[2];
    let cross = [
        axis[1] * p[2] - axis[2] * p[1],
        axis[2] * p[0] - axis[0] * p[2],
        axis[0] * p[1] - axis[1] * p[0],
    ];
    [0, 1, 2].map(|d| p[d] * c + cross[d] * s + axis[d] * dot * (1.0 - c))
}

fn record(
    id: String,
    protein_id: String,
    category: Category,
    lig: &Ligand,
    positions: &[[f64; 3]],
    protein: &[(Element, [f64; 3])],
) -> ComplexRecord {
    let mut degree = vec![0u32; lig.elements.len()];
    for &(i, j) in &lig.bonds {
        degree[i] += 1;
        degree[j] += 1;
    }
    let mut atoms: Vec<Atom> = lig
        .elements
        .iter()
        .zip(positions)
        .zip(&degree)
        .map(|((e, p), d)| atom(*e, *p, true, *d))
        .collect();
    atoms.extend(protein.iter().map(|(e, p)| atom(*e, *p, false, 0)));
    ComplexRecord {
        complex_id: id,
        protein_id,
        category,
        label: None,
        rmsd: None,
        pose_index: None,
        atoms,
        bonds: lig
            .bonds
            .iter()
            .map(|&(i, j)| Bond {
                i,
                j,
                order: BondOrder::Single,
            })
            .collect(),
    }
}

/// Generates the corpus. Labels are recomputed from the final geometry with
/// [`planted_label`], so they hold by construction rather than by intent.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<ComplexRecord>> {
    if cfg.num_proteins == 0
        || cfg.ligand_atoms.0 < 2
        || cfg.ligand_atoms.0 > cfg.ligand_atoms.1
        || cfg.protein_atoms.0 < 4
        || cfg.protein_atoms.0 > cfg.protein_atoms.1
        || !(0.0..=1.0).contains(&cfg.positive_fraction)
        || cfg.contact <= PLANT_MIN + 0.2
        || (cfg.mode == SynthMode::Poses && cfg.poses_per_complex == 0)
    {
        return Err(Error::InvalidArgument("invalid synthetic corpus settings".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    for k in 0..cfg.num_complexes {
        let positive = rng.gen_bool(cfg.positive_fraction);
        let (lig, protein) = loop {
            if let Some(c) = complex(&mut rng, cfg, positive) {
                break c;
            }
        };
        let protein_id = format!("synp{:02}", k % cfg.num_proteins);
        let id = format!("syn{k:05}");
        match cfg.mode {
            SynthMode::Screening | SynthMode::Mixed => {
                let pdbbind = cfg.mode == SynthMode::Mixed && k % 2 == 1;
                let mut r = record(id, protein_id, Category::Unlabeled, &lig, &lig.positions, &protein);
                let label = planted_label(&r, cfg.contact);
                debug_assert_eq!(label, u8::from(positive));
                r.category = match (pdbbind, label) {
                    (false, 1) => Category::DudeActive,
                    (false, _) => Category::DudeInactive,
                    (true, 1) => Category::PdbbindPositive,
                    (true, _) => Category::PdbbindNegative,
                };
                r.label = Some(label);
                out.push(r);
            }
            SynthMode::Poses => {
                // Each pose is a rigid move of the native placement: a small
                // rotation plus a shift that is either near (< 2 Å) or far
                // (> 4 Å).
                for pose in 0..cfg.poses_per_complex {
                    let axis = unit(&mut rng);
                    let angle = rng.gen_range(0.0..0.3);
                    let shift = if rng.gen_bool(0.35) {
                        rng.gen_range(0.2..1.6)
                    } else {
                        rng.gen_range(4.5..7.0)
                    };
                    let dir = unit(&mut rng);
                    let positions: Vec<[f64; 3]> = lig
                        .positions
                        .iter()
                        .map(|p| offset(&rotate(p, &axis, angle), &dir, shift))
                        .collect();
                    let mut r = record(
                        id.clone(),
                        protein_id.clone(),
                        Category::Unlabeled,
                        &lig,
                        &positions,
                        &protein,
                    );
                    let rmsd = crate::graph::compute_rmsd(&lig.positions, &positions)?;
                    r.rmsd = Some(rmsd);
                    r.pose_index = Some(pose as u32);
                    r.category = if rmsd < crate::graph::POSITIVE_RMSD {
                        Category::PdbbindPositive
                    } else {
                        Category::PdbbindNegative
                    };
                    out.push(r);
                }
            }
        }
    }
    Ok(out)
}
