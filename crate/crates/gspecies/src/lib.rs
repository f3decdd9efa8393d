pub mod counterexample;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod gsp;
pub mod json;
pub mod linalg;
pub mod mutation;
pub mod oracle;
pub mod poly;
pub mod reduce;
pub mod reps;
pub mod seed;
pub mod species;
pub mod verify;

pub use error::{GspError, Result};
pub use exec::Exec;
