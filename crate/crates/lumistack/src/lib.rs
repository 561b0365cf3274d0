pub mod colorbands;
pub mod error;
pub mod imgcore;
pub mod intrinsic;
pub mod synth;

pub use error::{Error, Result};
