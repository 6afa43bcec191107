//! Quadratic-curve-lifted Reed-Solomon codes over GF(2^m).
//!
//! A codeword is a function on the affine plane over `F_q`, `q = 2^ell`,
//! whose restriction to every curve `y = alpha x^2 + beta x + gamma` is a
//! polynomial of degree below `d`. The crate classifies good monomials,
//! counts bad ones, builds the codes, and simulates local recovery from
//! erasures alongside the line-lifted codes for comparison.

pub mod cli;
pub mod code;
pub mod counting;
pub mod error;
pub mod gf;
pub mod monomial;
pub mod poly;
pub mod recovery;

pub use code::{build_code, CodeInstance, CodeSpec, Codeword, Family};
pub use error::{Error, Result};
pub use gf::{FieldContext, FieldElement};
pub use monomial::{Curve, Line, Monomial};
pub use recovery::{SimConfig, SimEstimate};
