//! Scores complexes with a checkpoint, or with fresh weights when none is
//! given.
//!
//! ```text
//! cargo run --example predict -- [complexes.jsonl] [model.ckpt]
//! ```

use std::path::PathBuf;

use gnn_dti::chem::{parse_complex, ComplexSource};
use gnn_dti::graph::preprocess;
use gnn_dti::model::{load_params, predict, ModelConfig, ModelParams};

fn main() {
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let input = args
        .next()
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/screen20.jsonl"));
    let (params, config) = match args.next() {
        Some(p) => {
            let ck = load_params(&p).expect("readable checkpoint");
            (ck.params, ck.config)
        }
        None => {
            let config = ModelConfig::default();
            (ModelParams::init(&config, 0).unwrap(), config)
        }
    };
    let ingested = parse_complex(&ComplexSource::Jsonl(input)).expect("readable input");
    for rec in &ingested.records {
        match preprocess(rec) {
            Ok(s) => println!("{}\t{:.6}", s.key(), predict(&s, &params, &config).unwrap()),
            Err(e) => println!("{}\tskipped: {e:?}", rec.key()),
        }
    }
}
