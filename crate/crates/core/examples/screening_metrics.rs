//! Virtual screening metrics on a simulated ranking: 20 targets, each with
//! a few actives among many decoys.

use gnn_dti::metrics::{evaluate, MetricKind, ScoredItem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut items = Vec::new();
    for p in 0..20 {
        for k in 0..400 {
            let active = k < 8;
            // Actives score higher on average.
            let score: f64 = rng.gen::<f64>() + if active { 0.6 } else { 0.0 };
            items.push(ScoredItem {
                protein_id: format!("target{p:02}"),
                complex_id: format!("t{p}-{k}"),
                ..ScoredItem::new(score, u8::from(active))
            });
        }
    }
    let report = evaluate(&items, &MetricKind::all()).unwrap();
    for m in &report.metrics {
        println!("{m:>16}  {:.4}", report.aggregate_value(m).unwrap_or(f64::NAN));
    }
}
