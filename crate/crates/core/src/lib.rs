//! Spectra of random density matrices `rho = X X^* / Tr(X X^*)`.
//!
//! The crate samples complex matrices with independent entries, computes
//! Hermitian eigenvalues, and compares the empirical spectra with the
//! Marchenko-Pastur law, the Tracy-Widom `F2` distribution at the soft edges,
//! and the large-`n` limit of the von Neumann entropy.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiment;
pub mod laws;
pub mod linalg;
pub mod output;
pub mod quadrature;
pub mod sampling;
pub mod spectra;
pub mod tracywidom;

pub use error::{Error, Result};
