//! Pairwise comparison matrices as a Lie group under the Hadamard product.
//!
//! - [`matrix`]: the [`PcMatrix`] type, group operations and triad-based
//!   consistency measurement.
//! - [`liealg`]: entrywise `log`/`exp` between PC matrices and
//!   skew-symmetric matrices.
//! - [`decomp`]: the 3x3 split `M = A_H . A_L` into an orthogonal and a
//!   consistent factor.
//! - [`weights`]: geometric-mean priority weights.
//! - [`extend`]: the submatrix reconstruction step for `n > 3`.
//! - [`io`] and [`report`]: file formats and the JSON analysis block shared
//!   by the CLI and the HTTP service.

pub mod decomp;
pub mod error;
pub mod extend;
pub mod io;
pub mod liealg;
pub mod matrix;
pub mod report;
pub mod tolerance;
pub mod weights;

pub use decomp::{decompose, DecompositionResult};
pub use error::{PcError, Result};
pub use liealg::{exp_map, log_map, SkewMatrix};
pub use matrix::{PcMatrix, Triad};
pub use tolerance::Tolerance;
pub use weights::{geometric_mean_weights, WeightVector};
