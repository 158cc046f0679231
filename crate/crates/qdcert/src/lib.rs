//! Desk-scale numerical certificates of quasidiagonality for the operators
//! that a central character of the unitriangular group `U_d` induces on
//! `ℓ²(G/Z)`.
//!
//! The pipeline: exact arithmetic in `U_d` ([`unitri`]), the quotient `G/Z`
//! with box coset representatives and a verified Følner set ([`quotient`]),
//! continued-fraction selection of the congruence level `n` ([`diophantine`]),
//! the twisted translation operators with high-precision phase weights
//! ([`gns`]), the finite-rank projections and commutator norms ([`orfanos`]),
//! and report orchestration ([`certifier`]).

pub mod certifier;
pub mod diophantine;
mod error;
pub mod gns;
pub mod orfanos;
pub mod quotient;
pub mod unitri;

pub use error::{Error, Result};
