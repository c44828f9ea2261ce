pub mod classify;
pub mod error;
pub mod experiments;
pub mod graphgen;
pub mod io;
pub mod lapdl;
pub mod linalg;
pub mod rng;
pub mod sbo;
pub mod sepdl;
pub mod sparse;

pub use error::{Error, Result};
