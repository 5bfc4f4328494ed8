//! Exact arithmetic for even integral lattices and their discriminant forms.
//!
//! The crate covers
//!
//! * [`lattice`]: Gram matrices, determinants, signatures, Smith normal form
//!   and the discriminant group `L^v / L`;
//! * [`finite_qf`]: finite quadratic forms (discriminant forms) with direct
//!   sums, negation, CRT normalisation and exhaustive isomorphism testing;
//! * [`binary`]: positive definite even binary forms `(2a c; c 2b)`, Gauss
//!   reduction, enumeration by discriminant, genera and CM moduli;
//! * [`transcendental`]: rank-3 candidate verification and the rank-2
//!   transcendental lattice determination from a Neron-Severi discriminant form;
//! * [`ternary`]: isotropy of ternary forms with witnesses or local obstructions;
//! * [`ns_verify`]: divisibility and generator checks on user supplied curve data;
//! * [`catalog`]: the bundled dataset of K3 families and its reproduction reports;
//! * [`cli`]: the `k3lat` command line front end.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod binary;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod finite_qf;
pub mod lattice;
pub mod ns_verify;
pub mod ternary;
pub mod text;
pub mod transcendental;

pub use error::{Error, Result};
