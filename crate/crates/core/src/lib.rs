//! Krein resolvent identities for singular Sturm–Liouville operators.

pub mod acceptance;
pub mod bessel;
pub mod error;
pub mod extrap;
pub mod krein;
pub mod oracle;
pub mod ode;
pub mod quad;
pub mod slcore;
pub mod specialfn;
pub mod ssf;

pub use error::{Error, Result};
