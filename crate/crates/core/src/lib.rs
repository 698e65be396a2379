//! Exact computation of both sides of the tame local Langlands correspondence
//! for `GL(l, F)`, `l` prime and `E/F` unramified of degree `l`.
//!
//! Characters are finite-order and their values are [`scalar::RootOfUnity`].
//! The crate builds the Langlands parameter `Ind(chi)` of an admissible pair,
//! runs the twisted-norm construction of the torus character `chi_phi`, and
//! checks `chi_phi = chi * Delta_chi` by exhaustive enumeration.

pub mod abelian;
pub mod characters;
pub mod conjugation;
pub mod dl;
pub mod error;
pub mod field;
pub mod local;
pub mod scalar;
pub mod torus;
pub mod util;
pub mod weil;
pub mod workbench;

pub use error::{Error, Result};
