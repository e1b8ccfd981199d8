pub mod diagnostics;
pub mod error;
pub mod export;
pub mod forward;
pub mod harness;
pub mod linalg;
pub mod objective;
pub mod phantoms;
pub mod prox;
pub mod realfield;
pub mod solver;

pub use error::{Error, Phase, Result};
