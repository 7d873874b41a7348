//! Analysis of matrix pencils whose coefficients have positive semidefinite
//! Hermitian parts, and of matrix polynomials with PSD Hermitian coefficients.
//!
//! The crate is organized around a few entry points:
//!
//! * [`pencil`] holds the pencil types, the posH validation and the
//!   generalized eigenvalue solver ([`qz`]).
//! * [`kcf`] extracts Kronecker structure with a rank-revealing staircase.
//! * [`dh`] decides equivalence to dissipative Hamiltonian pencils and builds
//!   explicit realizations.
//! * [`numrange`] and [`localization`] sample numerical ranges and produce
//!   left-half-plane certificates.
//! * [`matpoly`] linearizes matrix polynomials and checks cubic stability.
//! * [`oracles`] provides independent references and instance generators.

pub mod cli;
pub mod dh;
pub mod error;
pub mod io;
pub mod kcf;
pub mod localization;
pub mod matpoly;
pub mod matrix;
pub mod numrange;
pub mod oracles;
pub mod pencil;
pub mod qz;

pub use error::{Error, Result};
pub use matrix::{hermitian_split, ComplexMatrix, HermitianSplit, C64};
pub use pencil::{
    generalized_eigenvalues, validate_posh, Convention, DhPencil, Eigenvalue, Pencil, PoshPencil,
};
pub use kcf::{kronecker_structure, KroneckerStructure, RankPolicy};
pub use dh::{check_dh_equivalence, realize_dh, DhVariant, DhVerdict};
pub use matpoly::MatrixPolynomial;
