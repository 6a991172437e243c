//! Multi-dimensional block reduction on an emulated 16×16 matrix
//! multiply-accumulate unit, compared against a warp-shuffle/atomic baseline
//! and exercised inside a small gradient-based docking search.

pub mod docking;
pub mod error;
pub mod half;
pub mod io;
pub mod mma;
pub mod reduction;
pub mod simblock;

pub use error::{Error, Result};
pub use half::Half;
pub use mma::AccumMode;
pub use reduction::{Method, SyncStats, Vec4};
