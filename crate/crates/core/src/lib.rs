//! Dobrushin ergodicity coefficients of row-stochastic matrices, and what they
//! certify: upper bounds on the second-largest eigenvalue modulus, its exact
//! value for damped Google-type matrices, and error bounds for power
//! iteration towards the stationary distribution.
//!
//! Modules:
//!
//! - [`stochastic_core`]: matrix and vector types, ingestion, implicit Google
//!   matrices.
//! - [`dobrushin`]: exact `q(B)` in both of its equivalent forms.
//! - [`spectral_bound`]: `q(A^k)^(1/k)` certificates, mixture bounds, closed
//!   classes and the exact second eigenvalue.
//! - [`stationary`]: contraction-certified power iteration.
//! - [`oracle`]: dense eigenvalues and fixed spaces used for verification.
//! - [`cli`]: the `ergogap` command-line front end.

pub mod cli;
pub mod dobrushin;
pub mod error;
pub mod oracle;
pub mod spectral_bound;
pub mod stationary;
pub mod stochastic_core;

pub use error::{Error, Result};
