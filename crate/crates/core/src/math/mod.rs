//! Dense matrices and the reverse-mode differentiation tape.

mod matrix;
mod tape;

pub use matrix::Matrix;
pub use tape::{gaussian_contacts, masked_softmax, Gradients, Tape, Var};
