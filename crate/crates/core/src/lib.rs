//! Numerics for the profile function M_n, the higher-dimensional exponential
//! transform of bounded densities, and runnable checks of the associated
//! sharp inequalities and sub/harmonicity statements.

pub mod error;
pub mod moments;
pub mod potential;
pub mod profile;
pub mod quad;
pub mod report;
pub mod special;
pub mod suites;
pub mod subharmonic;
pub mod variational;

pub use error::{Error, Result};
pub use report::{CheckKind, VerificationReport};
