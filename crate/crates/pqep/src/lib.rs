//! Palindromic quadratic eigenvalue problems: spectral decomposition through
//! a standard pair and a parameter matrix, structured inverse eigenvalue
//! problems, and no-spill-over eigenvalue embedding, for all four
//! `(star, eps)`-palindromic structures.
//!
//! The library is organized around one identity: a pair (X, J) with
//! nonsingular [X; XJ] solves `A X J^2 + Q X J + eps A^* X = 0` exactly when
//! a nonsingular parameter matrix Gamma exists with `Gamma^* = -eps Gamma`,
//! `J Gamma = Gamma J^{-*}` and `X Gamma X^* = 0`, in which case
//! `A = (X J Gamma X^*)^{-1}` and `Q = -A X J^2 Gamma X^* A`. Everything else
//! (classification, canonical Gamma structure, inverse problems, embedding)
//! is layered on that.
//!
//! See the book under `book/` for a guided tour, and the `pqep` binary for
//! the file-based command line interface.

pub mod decomposition;
pub mod eep;
pub mod error;
pub mod flavor;
pub mod gamma;
pub mod io;
pub(crate) mod layout;
pub mod linalg;
pub mod mat;
pub mod oracle;
pub mod poly;
pub mod qiep;
pub mod spectrum;

pub use error::{PqepError, Result};
pub use flavor::{Flavor, Star};
pub use poly::{residual, PalindromicPolynomial, StandardPair};
pub use spectrum::{
    build_spectral_matrix, classify_spectrum, EigGroup, GroupCategory, SpectrumSpec,
};

/// Default relative tolerance for eigenvalue pairing.
pub const TOL_PAIR: f64 = 1e-8;
/// Default tolerance for modulus-one tests `||lambda| - 1|`.
pub const TOL_UNIMODULAR: f64 = 1e-8;
/// Default relative tolerance for structural identities such as Q^* = eps Q.
pub const TOL_STRUCT: f64 = 1e-12;
/// Rank cutoff: sigma_min / sigma_max at or below this is treated as singular.
pub const TOL_RANK: f64 = 1e-12;
/// Default relative residual gate for verification reports.
pub const TOL_RESIDUAL: f64 = 1e-9;
