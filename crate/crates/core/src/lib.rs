//! Approximate degree, factorization norms and dual-witness constructions for
//! Boolean functions and sign matrices.

pub mod approx_lp;
pub mod boolean_core;
pub mod cli;
pub mod error;
pub mod factor_norms;
pub mod lp;
pub mod rational;
pub mod sdp;
pub mod theorem_bench;
pub mod witness_forge;

pub use error::{Error, Result};
pub use rational::Rational;
