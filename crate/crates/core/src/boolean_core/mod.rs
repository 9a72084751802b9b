//! Boolean functions, sign matrices, multilinear polynomials and product
//! distributions.

mod distribution;
mod function;
pub mod io;
pub mod linalg;
mod multilinear;
mod sign_matrix;
mod witness;

pub use distribution::{eval_symmetric, eval_symmetric_f64, ProductDistribution};
pub use function::{compose, join_point, split_point, tensor_xor, PartialBooleanFunction, MAX_VARS};
pub use linalg::{classic_matrix_norms, ClassicNorms};
pub use multilinear::{character, fourier_transform, inner, walsh_hadamard, MultilinearPolynomial};
pub use sign_matrix::{rational_rank, PartialSignMatrix};
pub use witness::{DualWitness, TableEntry};

/// Multilinear extension evaluated at a point of `[-1,1]^n`.
pub fn multilinear_eval(
    p: &MultilinearPolynomial,
    z: &[crate::rational::Rational],
) -> crate::error::Result<crate::rational::Rational> {
    p.eval(z)
}

/// `H^{(x)k}`.
pub fn sylvester_hadamard(k: usize) -> PartialSignMatrix {
    PartialSignMatrix::hadamard(k)
}
