//! Saves a model, reloads it, and shows that a different architecture is
//! refused.

use gnn_dti::model::{load_params, save_params, ModelConfig, ModelParams};

fn main() {
    let config = ModelConfig {
        num_gat_layers: 2,
        gat_dim: 16,
        fc_dims: vec![16, 1],
        ..ModelConfig::default()
    };
    let params = ModelParams::init(&config, 42).unwrap();
    let dir = std::env::temp_dir().join("gnn_dti_checkpoint_example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("model.ckpt");
    save_params(&path, &params, &config, 500).unwrap();
    println!("saved {} scalars to {}", params.num_scalars(), path.display());

    let ck = load_params(&path).unwrap();
    println!("reloaded iteration {}, identical: {}", ck.iteration, ck.params == params);
    println!("mu {:.3}  sigma {:.3}", ck.params.mu(), ck.params.sigma());

    let deeper = ModelConfig {
        num_gat_layers: 4,
        ..config
    };
    match ck.ensure_compatible(&deeper) {
        Ok(()) => println!("unexpectedly compatible"),
        Err(e) => println!("4-layer config refused: {e}"),
    }
}
