//! Labels docking poses by RMSD and reports top-N success of a score that
//! prefers near-native poses.

use gnn_dti::graph::{label_pose, PoseLabel};
use gnn_dti::metrics::{topn_success, ScoredItem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut items = Vec::new();
    let (mut pos, mut neg, mut omitted) = (0, 0, 0);
    for c in 0..50 {
        for _ in 0..10 {
            let rmsd: f64 = rng.gen_range(0.3..9.0);
            match label_pose(rmsd).unwrap() {
                PoseLabel::Positive => pos += 1,
                PoseLabel::Negative => neg += 1,
                PoseLabel::Omitted => {
                    omitted += 1;
                    continue;
                }
            }
            let score = -rmsd + rng.gen_range(-3.0..3.0);
            items.push(ScoredItem {
                complex_id: format!("c{c}"),
                rmsd: Some(rmsd),
                ..ScoredItem::new(score, u8::from(rmsd < 2.0))
            });
        }
    }
    println!("{pos} near-native, {neg} decoy, {omitted} omitted poses");
    for n in [1, 2, 3, 5, 10] {
        println!("top-{n:<2} {:.1}%", 100.0 * topn_success(&items, n).unwrap());
    }
}
