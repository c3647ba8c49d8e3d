//! Self-contained dense linear-algebra kernels.
//!
//! Everything the rest of the toolkit needs — Cholesky factorization,
//! pivoted linear solves, a cyclic Jacobi eigensolver, and rank / null-space
//! extraction — lives here, with every tolerance collected in [`tol`].

pub mod tol;

mod eigen;
mod factor;
mod matrix;

pub use eigen::{rank_and_nullspace, sym_eig, EigenDecomposition};
pub use factor::{
    back_substitute_transposed, cholesky, cholesky_solve, forward_substitute, solve_linear,
};
pub use matrix::{
    dot, norm2, quadratic_form, vec_add, vec_scale, vec_sub, Matrix,
};
