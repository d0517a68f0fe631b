//! Floating-point spectral routines: cyclic Jacobi for symmetric matrices and
//! singular values derived from it.

use crate::error::{Error, Result};
use crate::exactnum::mat::FMat;

/// Default tolerance for spectral paths.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: FMat,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> FMat {
        let n = self.values.len();
        let mut m = FMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (0..n).map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)]).sum();
            }
        }
        m
    }
}

fn off_diagonal_mass(a: &FMat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix. Rotations sweep until the
/// off-diagonal Frobenius mass drops below `tol·max(1, ‖m‖)`.
pub fn eig_sym(m: &FMat, tol: f64) -> Result<SymEigen> {
    if !m.is_square() {
        return Err(Error::Dimension("eig_sym needs a square matrix".into()));
    }
    let n = m.rows();
    let scale = m.frobenius().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > tol * scale {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let mut a = m.clone();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = FMat::identity(n);
    let threshold = tol * scale * 1e-3;
    for _sweep in 0..100 {
        if off_diagonal_mass(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = FMat::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new)] = v[(i, old)];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Singular values in descending order, via the eigenvalues of `mᵀm`.
pub fn svd(m: &FMat, tol: f64) -> Result<Vec<f64>> {
    Ok(svd_full(m, tol)?.values)
}

#[derive(Clone, Debug)]
pub struct SvdParts {
    /// Descending.
    pub values: Vec<f64>,
    /// Right singular vectors, one per value (columns of V).
    pub right: Vec<Vec<f64>>,
}

pub fn svd_full(m: &FMat, tol: f64) -> Result<SvdParts> {
    if m.data().iter().any(|x| !x.is_finite()) {
        return Err(Error::Dimension("svd input has non-finite entries".into()));
    }
    let mtm = m.transpose().matmul(m)?;
    let eig = eig_sym(&mtm, tol)?;
    let n = eig.values.len();
    let mut values = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for k in (0..n).rev() {
        values.push(eig.values[k].max(0.0).sqrt());
        right.push(eig.vectors.col(k));
    }
    Ok(SvdParts { values, right })
}

pub fn trace_norm(m: &FMat, tol: f64) -> Result<f64> {
    Ok(svd(m, tol)?.iter().sum())
}

pub fn operator_norm(m: &FMat, tol: f64) -> Result<f64> {
    Ok(svd(m, tol)?.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: &[&[f64]]) -> FMat {
        FMat::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let e = eig_sym(&FMat::identity(3), DEFAULT_TOL).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn diagonal_spectrum() {
        let e = eig_sym(&fm(&[&[2.0, 0.0], &[0.0, -1.0]]), DEFAULT_TOL).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = fm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eig_sym(&m, DEFAULT_TOL).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
        assert!(e.reconstruct().max_abs_diff(&m) <= 10.0 * DEFAULT_TOL * m.frobenius());
    }

    #[test]
    fn rejects_non_symmetric() {
        assert!(matches!(eig_sym(&fm(&[&[0.0, 1.0], &[0.0, 0.0]]), DEFAULT_TOL), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn svd_examples() {
        let s = svd(&FMat::identity(4), DEFAULT_TOL).unwrap();
        assert!((s.iter().sum::<f64>() - 4.0).abs() < 1e-12);
        let h = fm(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let s = svd(&h, DEFAULT_TOL).unwrap();
        assert!((s[0] - 2f64.sqrt()).abs() < 1e-12 && (s[1] - 2f64.sqrt()).abs() < 1e-12);
        assert!((trace_norm(&h, DEFAULT_TOL).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let u = [0.6, 0.8];
        let v = [0.0, 1.0, 0.0];
        let r1 = FMat::outer(&u, &v);
        let s = svd(&r1, DEFAULT_TOL).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && s[1].abs() < 1e-6 && s[2].abs() < 1e-6);
    }
}
