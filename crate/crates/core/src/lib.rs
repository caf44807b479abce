//! Exact-arithmetic library for deciding transitivity and local
//! controllability of linear control systems on matrix Lie supergroups:
//! Grassmann and supermatrix arithmetic, Lie superalgebras over exact
//! rationals, bracket closures and ad-invariant hulls, rank conditions,
//! matrix-level flow checks, and a built-in catalog of worked systems.

pub mod catalog;
pub mod closure;
pub mod error;
pub mod flows;
pub mod grassmann;
pub mod linalg;
pub mod lsa;
pub mod rank;
pub mod report;
pub mod ring;
pub mod specfile;
pub mod supermatrix;

pub use error::{Error, Result};
