//! Exact symmetric matrix pencils for products and quotients of real
//! multivariate polynomials, their ambiguity spaces, and sum-of-squares
//! certificates for partial Wronskians.

pub mod ambiguity;
pub mod artin;
pub mod basis;
pub mod cli;
pub mod error;
pub mod json;
pub mod matrix;
pub mod parse;
pub mod pencil;
pub mod polarize;
pub mod poly;
pub mod rational;
pub mod resolvent;
pub mod sampling;
pub mod sos;

pub use error::{Error, Result};
