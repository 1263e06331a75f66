//! Graph attention models for scoring protein-ligand complexes.
//!
//! The crate covers the full pipeline: reading complexes from JSONL or
//! SDF/PDB, building the two-adjacency interaction graph, the gated attention
//! network with its distance-aware contact kernel, training with balanced
//! batches, and the virtual screening and pose ranking metrics.
//!
//! ```
//! use gnn_dti::math::{Matrix, Tape};
//!
//! let tape = Tape::new();
//! let w = tape.param(Matrix::from_rows(&[[1.0, 2.0]]));
//! let loss = w.mul(w).unwrap().sum();
//! let grads = tape.backward(loss).unwrap();
//! assert_eq!(grads.get(w).unwrap().data(), &[2.0, 4.0]);
//! ```

pub mod chem;
pub mod cli;
pub mod error;
pub mod gat;
pub mod graph;
pub mod io;
pub mod math;
pub mod metrics;
pub mod model;
pub mod synth;
pub mod train;

pub use error::{Error, Result};
