//! Central record of every numerical tolerance used by the toolkit.
//!
//! Tests and the command-line front end read the same constants, so changing
//! a threshold here changes it everywhere at once.

/// Relative symmetry tolerance: `|s_ij - s_ji| <= SYMMETRY_REL * max|s|`.
pub const SYMMETRY_REL: f64 = 1e-12;

/// Cholesky pivot threshold, relative to the largest diagonal entry.
pub const CHOLESKY_PIVOT_REL: f64 = 1e-14;

/// Gaussian-elimination pivot threshold, relative to the largest initial
/// row norm.
pub const SOLVE_PIVOT_REL: f64 = 1e-14;

/// Jacobi stopping target: every off-diagonal magnitude below this times the
/// Frobenius norm of the input.
pub const JACOBI_OFF_DIAG_REL: f64 = 1e-12;

/// Hard cap on Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 200;

/// Default rank cutoff: singular values above `RANK_REL * sigma_max` count
/// toward the rank.
pub const RANK_REL: f64 = 1e-10;

/// An eigenvalue of the discrepancy matrix below this fraction of the largest
/// eigenvalue seen across all shifts is treated as zero (fully private).
pub const FULLY_PRIVATE_REL: f64 = 1e-10;

/// Stability margin: a model counts as stable when the spectral radius of the
/// state matrix is below `1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Exponents above this map the candidate bound to exact zero instead of
/// evaluating `exp` near the IEEE overflow edge.
pub const EXPONENT_OVERFLOW: f64 = 700.0;

/// Exponents below this (including zero and rounding-noise negatives) map the
/// candidate bound to infinity.
pub const EXPONENT_UNDERFLOW: f64 = 1e-300;

/// Maximum-likelihood grid search: two candidate scores within this relative
/// distance of the minimum count as tied.
pub const SCORE_TIE_REL: f64 = 1e-12;

/// Default residual tolerance when verifying a supplied zero direction.
pub const ZERO_DIRECTION_TOL: f64 = 1e-8;

/// Below this discrepancy energy the regularization budget divides by zero,
/// i.e. the input is already fully private.
pub const BUDGET_EXPONENT_MIN: f64 = 1e-14;
