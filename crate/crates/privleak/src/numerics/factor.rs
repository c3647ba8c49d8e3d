use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::numerics::tol;

/// Cholesky factor `L` of a symmetric positive definite `S`, with `L L^T = S`.
///
/// Fails with [`Error::NotPositiveDefinite`] when a pivot drops to
/// `CHOLESKY_PIVOT_REL` times the largest diagonal entry, which for a noise
/// covariance means it is not a valid covariance.
pub fn cholesky(s: &Matrix) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cholesky needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.is_symmetric(tol::SYMMETRY_REL) {
        return Err(Error::NotSymmetric);
    }
    let n = s.rows();
    let max_diag = (0..n).fold(0.0_f64, |m, i| m.max(s[(i, i)]));
    let pivot_floor = tol::CHOLESKY_PIVOT_REL * max_diag;

    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= pivot_floor || d <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_substitute(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    debug_assert_eq!(b.len(), n);
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[(i, k)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}

/// Solves `L^T x = b` for lower-triangular `L`.
pub fn back_substitute_transposed(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    debug_assert_eq!(b.len(), n);
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in (i + 1)..n {
            v -= l[(k, i)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}

/// Solves `S x = b` given the Cholesky factor `L` of `S`.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    back_substitute_transposed(l, &forward_substitute(l, b))
}

/// Solves `A x = b` by Gaussian elimination with row pivoting.
///
/// Reports [`Error::Singular`] when a pivot magnitude falls below
/// `SOLVE_PIVOT_REL` times the largest initial row norm.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix is {}x{}",
            b.len(),
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut x = b.to_vec();

    let max_row_norm = (0..n).fold(0.0_f64, |acc, i| {
        acc.max(m.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
    });
    let pivot_floor = tol::SOLVE_PIVOT_REL * max_row_norm;

    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                m[(perm[i], col)]
                    .abs()
                    .total_cmp(&m[(perm[j], col)].abs())
            })
            .unwrap();
        perm.swap(col, pivot_row);
        let p = perm[col];
        let pivot = m[(p, col)];
        if pivot.abs() <= pivot_floor {
            return Err(Error::Singular);
        }
        for r in (col + 1)..n {
            let row = perm[r];
            let factor = m[(row, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[(row, col)] = 0.0;
            for c in (col + 1)..n {
                let v = m[(p, c)];
                m[(row, c)] -= factor * v;
            }
            x[row] -= factor * x[p];
        }
    }

    let mut out = vec![0.0; n];
    for col in (0..n).rev() {
        let p = perm[col];
        let mut v = x[p];
        for c in (col + 1)..n {
            v -= m[(p, c)] * out[c];
        }
        out[col] = v / m[(p, col)];
    }
    Ok(out)
}
