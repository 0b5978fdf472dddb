pub mod analysis;
pub mod components;
pub mod configspace;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod landmarking;
pub mod metabase;
pub mod optimizer;

pub use error::{Error, Result};
