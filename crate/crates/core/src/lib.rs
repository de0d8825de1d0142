//! Spectral toolkit for k-local qubit Hamiltonians.
//!
//! The crate certifies exponentially large low-energy eigenvalue counts from
//! families of bit-flipped product states, checks every certificate against a
//! dense exact-diagonalization oracle, simulates low-energy filtering from the
//! maximally entangled state, and evaluates the closed-form runtime exponents
//! that follow from those counts.
//!
//! Module map:
//! - [`hamiltonian`]: weighted local terms, norms, site statistics, dense assembly
//!   and light-cone conjugation.
//! - [`spectrum`]: exact eigenvalues, cumulative counts `N(E)` and projector overlaps.
//! - [`density`]: quiet sets, flip families and interlacing certificates.
//! - [`depthd`]: brickwork circuits and the variational depth-d energy bound.
//! - [`filtersim`]: extended system, exact and polynomial filters, sampling estimator.
//! - [`bounds`]: binary entropy and exponent calculators.

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod density;
pub mod depthd;
pub mod error;
pub mod filtersim;
pub mod hamiltonian;
mod kernel;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Environment variable that overrides the default oracle cap.
pub const ORACLE_CAP_ENV: &str = "HAMLOW_ORACLE_CAP";

/// Largest qubit count for which dense `2^n x 2^n` matrices are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OracleCap(pub usize);

impl OracleCap {
    pub const DEFAULT: OracleCap = OracleCap(14);

    /// Reads `HAMLOW_ORACLE_CAP`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ORACLE_CAP_ENV) {
            Ok(raw) => raw
                .trim()
                .parse::<usize>()
                .map(OracleCap)
                .map_err(|_| Error::InvalidParameter(format!("{ORACLE_CAP_ENV}={raw:?} is not an integer"))),
            Err(_) => Ok(Self::DEFAULT),
        }
    }

    pub fn check(self, n: usize) -> Result<()> {
        if n > self.0 {
            Err(Error::ScaleExceeded { n, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for OracleCap {
    fn default() -> Self {
        Self::DEFAULT
    }
}
