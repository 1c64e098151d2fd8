//! Cost-optimal quantum channels.

pub mod choi;
pub mod cost;
pub mod diagnostics;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod sdp;

pub use error::{Error, Result};
