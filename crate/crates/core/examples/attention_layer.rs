//! One gated attention layer on a 4-node graph, with its attention
//! coefficients and gate values.

use gnn_dti::gat::{gat_forward_traced, GatParams};
use gnn_dti::math::{Matrix, Tape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let params = GatParams::init(3, &mut ChaCha8Rng::seed_from_u64(1));
    let x = Matrix::from_rows(&[[1.0, 0.0, 0.5], [0.0, 1.0, -0.5], [0.3, 0.3, 0.3], [-1.0, 0.2, 0.0]]);
    // A path 0-1-2 plus a weighted contact 2-3.
    let a = Matrix::from_rows(&[
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 1.0, 0.0],
        [0.0, 1.0, 1.0, 0.4],
        [0.0, 0.0, 0.4, 1.0],
    ]);
    let tape = Tape::new();
    let t = gat_forward_traced(tape.constant(x), tape.constant(a), &params.bind(&tape)).unwrap();
    let (att, gate, out) = (t.attention.value(), t.gate.value(), t.output.value());
    for i in 0..4 {
        let row: Vec<String> = att.row(i).iter().map(|v| format!("{v:.3}")).collect();
        println!("node {i}: attention [{}]  gate {:.3}", row.join(", "), gate[(i, 0)]);
    }
    for i in 0..4 {
        println!("out {i}: {:?}", out.row(i).iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    }
}
