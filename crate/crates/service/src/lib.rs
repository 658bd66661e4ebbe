//! HTTP/JSON service that keeps pairwise comparison sessions on disk and
//! returns weights, inconsistency and decompositions after every edit.

pub mod api;
pub mod session;

pub use api::router;
pub use session::{Session, SessionStore};

/// Environment variable naming the session directory.
pub const STORE_DIR_ENV: &str = "PCDECOMP_STORE_DIR";
