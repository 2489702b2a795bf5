//! Analysis of finite-dimensional discrete-time linear systems with the
//! scattering supply rate `‖u‖² - ‖y‖²`.
//!
//! The crate decides membership of a storage operator `H` in the solution
//! sets of the Riccati equality, the Riccati inequality and the KYP
//! inequality, builds the associated `H`-passive system, computes the
//! minimal and maximal storage operators, and certifies uniqueness for
//! inner and co-inner transfer functions.
//!
//! Modules, bottom-up:
//!
//! - [`opcore`]: square roots, pseudo-inverses, minimal contractions, Schur
//!   complements and the Loewner order.
//! - [`sysmodel`]: realizations, transfer functions, minimality, passivity,
//!   simulation.
//! - [`riccati`]: `alpha`/`beta`/`delta`, the KYP form and LMI, membership.
//! - [`solver`]: Riccati-equality solutions and extremal storage operators.
//! - [`analysis`]: boundary behaviour on the unit circle and uniqueness.
//! - [`cli`]: JSON documents and reports behind the `riccati-kyp` binary.

// Negated float comparisons are used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod opcore;
pub mod riccati;
pub mod solver;
pub mod sysmodel;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use opcore::{HermitianOperator, LoewnerOrder};
pub use riccati::{MembershipVerdict, StorageOperator, Tolerances};
pub use sysmodel::SystemRealization;
