//! Worst-case optimal value of transportation problems with interval costs,
//! supplies and demands.
//!
//! [`instance`] holds the data model and file formats, [`transport`] the
//! scenario LP kernel, [`encoding`] the sign-vector search space, [`exact`]
//! the full enumeration and [`heuristics`] the approximate solvers.

pub mod encoding;
pub mod error;
pub mod exact;
pub mod heuristics;
pub mod instance;
pub mod transport;

pub use error::{Error, Result};
