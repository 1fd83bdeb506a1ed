pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod linalg;
pub mod instance;
pub mod linear;
pub mod models;
pub mod neural;
pub mod stats;
pub mod synth;
pub mod trees;

pub use error::{ConvergenceWarning, Error, Result};
pub use linalg::Matrix;
