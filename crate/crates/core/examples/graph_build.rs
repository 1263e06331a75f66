//! Prunes a synthetic complex and prints its covalent and contact structure.

use gnn_dti::graph::{build_sample, prune_protein, PRUNE_CUTOFF};
use gnn_dti::synth::{generate, SynthConfig};

fn main() {
    let records = generate(&SynthConfig {
        num_complexes: 1,
        seed: 11,
        ..SynthConfig::default()
    })
    .unwrap();
    let rec = &records[0];
    let pruned = prune_protein(rec, PRUNE_CUTOFF).unwrap();
    println!(
        "{}: {} protein atoms, {} left after pruning",
        rec.key(),
        rec.num_protein_atoms(),
        pruned.num_protein_atoms()
    );
    let s = build_sample(&pruned).unwrap();
    let n = s.num_atoms();
    let bonds = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| s.a1[(i, j)] > 0.0).count();
    println!("{n} nodes, {bonds} covalent edges, {} contacts", s.num_contacts());
    for i in 0..s.num_ligand {
        for j in s.num_ligand..n {
            if s.inter_mask[(i, j)] > 0.0 {
                println!("  contact {i} - {j} at {:.2} A", s.dist[(i, j)]);
            }
        }
    }
}
