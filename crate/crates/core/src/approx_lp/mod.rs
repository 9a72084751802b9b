//! Exact LP machinery for approximate degree, amplification and parity approximants.

pub mod amplify;
pub mod approximant;
pub mod degree;
pub mod parity;
pub mod univariate;

pub use amplify::{amplification_poly, hadamard_reduction_poly, AmplificationKind, AmplificationPolynomial, IntervalMap};
pub use approximant::{achieved_sigma, approximant_degree_oracle, indicator_system, verify_system, ApproximantSpec, ApproximantSystem};
pub use degree::{
    approx_degree, best_error, dual_witness_at, threshold_degree, verify_approximant, verify_dual_witness,
    verify_sign_witness, ApproxDegreeResult, DualWitnessReport, ThresholdDegreeResult,
};
pub use parity::{parity_approximant, symmetrize_to_cube, ParityApproximant, ParityMethod, SymmetrizedPolynomial};
pub use univariate::UnivariatePolynomial;
