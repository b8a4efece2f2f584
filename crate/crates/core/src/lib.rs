pub mod certify;
pub mod decompose;
pub mod digits;
pub mod error;
pub mod experiments;
pub mod prox;
pub mod solver;
pub mod sparsity;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use types::{CoefMatrix, DirtyPair, MultiTaskProblem, RegPair, SignSupport};
