//! Exact certification of constraint qualifications and optimality
//! conditions for programs with disjunctive constraints
//! `min f(x) s.t. F(x) ∈ D₁ ∪ … ∪ D_r`, each `D_i` a polyhedron.
//!
//! All verdicts are computed in exact rational arithmetic. Floating point
//! appears only in the sampling oracles, which never decide a verdict.

pub mod analysis;
pub mod disjunctive;
pub mod error;
pub mod exactla;
pub mod expr;
pub mod frontends;
pub mod oracle;
pub mod polycone;

pub use error::{Error, Result};
