use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::numerics::tol;

/// Spectral decomposition of a symmetric matrix.
///
/// Eigenvalues are sorted ascending; eigenvector columns are unit norm and
/// mutually orthogonal, matching the eigenvalue order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    /// Smallest eigenvalue with its eigenvector.
    pub fn smallest(&self) -> (f64, Vec<f64>) {
        (self.eigenvalues[0], self.eigenvectors.column(0))
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps run until every off-diagonal magnitude is below
/// `JACOBI_OFF_DIAG_REL` times the Frobenius norm of the input.
pub fn sym_eig(s: &Matrix) -> Result<EigenDecomposition> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.is_symmetric(tol::SYMMETRY_REL) {
        return Err(Error::NotSymmetric);
    }
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut v = Matrix::identity(n);
    let off_target = tol::JACOBI_OFF_DIAG_REL * s.frobenius_norm();

    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= off_target {
                    continue;
                }
                rotated = true;

                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;

                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    let new_p = c * aip - sn * aiq;
                    let new_q = sn * aip + c * aiq;
                    a[(i, p)] = new_p;
                    a[(p, i)] = new_p;
                    a[(i, q)] = new_q;
                    a[(q, i)] = new_q;
                }
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - sn * viq;
                    v[(i, q)] = sn * vip + c * viq;
                }
            }
        }
        if !rotated {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
            let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
            let mut eigenvectors = Matrix::zeros(n, n);
            for (dst, &src) in order.iter().enumerate() {
                eigenvectors.set_column(dst, &v.column(src));
            }
            return Ok(EigenDecomposition {
                eigenvalues,
                eigenvectors,
            });
        }
    }
    Err(Error::NoConvergence)
}

/// Rank and an orthonormal right null-space basis of `m`.
///
/// Singular values come from the eigen-decomposition of `m^T m`, which is
/// adequate at the small input dimensions this toolkit targets but squares
/// the condition number: singular values below roughly `1e-8 * sigma_max`
/// are at the noise floor of this route.  Exactly dependent columns still
/// produce exact zeros.  `rank` counts singular values above
/// `rel_tol * sigma_max`; the returned basis spans the complement.
pub fn rank_and_nullspace(m: &Matrix, rel_tol: f64) -> Result<(usize, Matrix)> {
    assert!(
        rel_tol > 0.0 && rel_tol < 1.0,
        "rank tolerance must lie in (0, 1)"
    );
    let eig = sym_eig(&m.gram())?;
    let p = m.cols();
    let singular: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    let sigma_max = singular.last().copied().unwrap_or(0.0);
    let cutoff = rel_tol * sigma_max;

    let rank = singular.iter().filter(|&&s| s > cutoff).count();
    let nullity = p - rank;
    let mut basis = Matrix::zeros(p, nullity);
    for j in 0..nullity {
        // Ascending eigenvalue order puts null directions first.
        basis.set_column(j, &eig.eigenvectors.column(j));
    }
    Ok((rank, basis))
}
