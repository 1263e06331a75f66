//! Reads a ligand SDF and a protein PDB, then prints the 56-wide feature rows
//! of the first pose.
//!
//! ```text
//! cargo run --example parse_featurize -- [ligand.sdf] [protein.pdb]
//! ```

use std::path::PathBuf;

use gnn_dti::chem::{featurize, parse_complex, Category, ComplexSource, BLOCK_WIDTH};

fn main() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let ligand = args.next().unwrap_or_else(|| fixtures.join("lig1_poses.sdf"));
    let protein = args.next().unwrap_or_else(|| fixtures.join("gly_ala_gly.pdb"));

    let ingested = parse_complex(&ComplexSource::SdfPdb {
        ligand,
        protein,
        protein_id: None,
        category: Category::Unlabeled,
    })
    .expect("readable inputs");
    println!(
        "{} records, {} rejected, {} atoms dropped",
        ingested.records.len(),
        ingested.rejected.len(),
        ingested.dropped_atoms
    );
    let Some(rec) = ingested.records.first() else {
        return;
    };
    let f = featurize(rec);
    println!("{}: {} ligand + {} protein atoms", rec.key(), rec.num_ligand_atoms(), rec.num_protein_atoms());
    for i in 0..f.matrix.rows() {
        let hot: Vec<usize> = (0..f.matrix.cols()).filter(|&c| f.matrix[(i, c)] == 1.0).collect();
        let block = if hot[0] < BLOCK_WIDTH { "ligand " } else { "protein" };
        println!("row {i:2} {block} hot slots {hot:?}");
    }
    println!("clamped annotations: {}", f.clamped);
}
