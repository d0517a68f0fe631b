//! Real coordinates for complex Hermitian matrices.
//!
//! An `n×n` Hermitian matrix `A` is stored as `n²` reals: the diagonal
//! `a₀₀,…,a₍ₙ₋₁₎₍ₙ₋₁₎` first, then for each `j < k` in row-major order the pair
//! `Re a_jk, Im a_jk`. Spectral questions go through the real symmetric
//! embedding `[[Re A, −Im A], [Im A, Re A]]`, whose spectrum is that of `A`
//! with every eigenvalue doubled in multiplicity.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::mat::{FMat, QMat};
use crate::exactnum::rational::{int, rat, QVec, Rational};
use crate::exactnum::spectral::eig_sym;

/// Complex matrix as a pair of real parts.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub re: QMat,
    pub im: QMat,
}

impl CMat {
    pub fn real(re: QMat) -> Self {
        let (r, c) = re.shape();
        CMat { re, im: QMat::zeros(r, c) }
    }

    pub fn identity(n: usize) -> Self {
        CMat::real(QMat::identity(n))
    }

    pub fn n(&self) -> usize {
        self.re.rows()
    }

    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        let re = self.re.matmul(&other.re)?.sub(&self.im.matmul(&other.im)?)?;
        let im = self.re.matmul(&other.im)?.add(&self.im.matmul(&other.re)?)?;
        Ok(CMat { re, im })
    }

    pub fn add(&self, other: &CMat) -> Result<CMat> {
        Ok(CMat { re: self.re.add(&other.re)?, im: self.im.add(&other.im)? })
    }

    pub fn scale(&self, s: &Rational) -> CMat {
        CMat { re: self.re.scale(s), im: self.im.scale(s) }
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let re = self.re.kron(&other.re).sub(&self.im.kron(&other.im)).expect("same shape");
        let im = self.re.kron(&other.im).add(&self.im.kron(&other.re)).expect("same shape");
        CMat { re, im }
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> Rational {
        (0..self.n()).fold(Rational::zero(), |acc, i| acc + &self.re[(i, i)])
    }

    pub fn trace_im(&self) -> Rational {
        (0..self.n()).fold(Rational::zero(), |acc, i| acc + &self.im[(i, i)])
    }

    pub fn is_hermitian(&self) -> bool {
        self.re == self.re.transpose() && self.im == -&self.im.transpose()
    }

    /// `[[Re, −Im], [Im, Re]]`.
    pub fn real_embedding(&self) -> QMat {
        let n = self.n();
        let mut m = QMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.re[(i, j)].clone();
                m[(i + n, j + n)] = self.re[(i, j)].clone();
                m[(i, j + n)] = -self.im[(i, j)].clone();
                m[(i + n, j)] = self.im[(i, j)].clone();
            }
        }
        m
    }

    /// Recovers a complex matrix from its real embedding.
    pub fn from_real_embedding(m: &QMat) -> Result<CMat> {
        if !m.is_square() || !m.rows().is_multiple_of(2) {
            return Err(Error::Dimension("real embedding must be square of even size".into()));
        }
        let n = m.rows() / 2;
        let mut re = QMat::zeros(n, n);
        let mut im = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                re[(i, j)] = m[(i, j)].clone();
                im[(i, j)] = m[(i + n, j)].clone();
            }
        }
        Ok(CMat { re, im })
    }
}

pub fn coord_len(n: usize) -> usize {
    n * n
}

/// Recovers `n` from a coordinate vector length, if it is a perfect square.
pub fn size_from_len(len: usize) -> Option<usize> {
    let n = (len as f64).sqrt().round() as usize;
    (n * n == len).then_some(n)
}

/// Index pairs `j < k` in coordinate order.
fn off_diagonal_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |j| (j + 1..n).map(move |k| (j, k)))
}

pub fn to_coords(a: &CMat) -> Result<QVec> {
    if !a.is_hermitian() {
        return Err(Error::InvalidInput("matrix is not Hermitian".into()));
    }
    let n = a.n();
    let mut v: QVec = (0..n).map(|i| a.re[(i, i)].clone()).collect();
    for (j, k) in off_diagonal_pairs(n) {
        v.push(a.re[(j, k)].clone());
        v.push(a.im[(j, k)].clone());
    }
    Ok(v)
}

pub fn from_coords(coords: &[Rational], n: usize) -> Result<CMat> {
    if coords.len() != coord_len(n) {
        return Err(Error::Dimension(format!("{} Hermitian coordinates for a {n}x{n} matrix", coords.len())));
    }
    let mut re = QMat::zeros(n, n);
    let mut im = QMat::zeros(n, n);
    for i in 0..n {
        re[(i, i)] = coords[i].clone();
    }
    for (idx, (j, k)) in off_diagonal_pairs(n).enumerate() {
        let (x, y) = (&coords[n + 2 * idx], &coords[n + 2 * idx + 1]);
        re[(j, k)] = x.clone();
        re[(k, j)] = x.clone();
        im[(j, k)] = y.clone();
        im[(k, j)] = -y.clone();
    }
    Ok(CMat { re, im })
}

/// Coefficients `c` with `c · coords(A) = tr(A U)` for every Hermitian `A`.
pub fn trace_functional(u: &CMat) -> Result<QVec> {
    let n = u.n();
    let mut c: QVec = (0..n).map(|i| u.re[(i, i)].clone()).collect();
    for (j, k) in off_diagonal_pairs(n) {
        c.push(int(2) * &u.re[(j, k)]);
        c.push(int(2) * &u.im[(j, k)]);
    }
    if !u.is_hermitian() {
        return Err(Error::InvalidInput("trace functional needs a Hermitian matrix".into()));
    }
    Ok(c)
}

/// The Hermitian `B` with `tr(A B) = w · coords(A)`; inverse of [`trace_functional`].
pub fn functional_matrix(w: &[Rational], n: usize) -> Result<CMat> {
    if w.len() != coord_len(n) {
        return Err(Error::Dimension(format!("functional of length {} on {n}x{n} Hermitian matrices", w.len())));
    }
    let half = rat(1, 2);
    let mut scaled: QVec = w[..n].to_vec();
    scaled.extend(w[n..].iter().map(|x| x * &half));
    from_coords(&scaled, n)
}

pub fn is_psd_exact(a: &CMat) -> bool {
    a.real_embedding().is_psd_exact()
}

/// Smallest eigenvalue of the Hermitian matrix with the given coordinates.
pub fn min_eigenvalue(coords: &[f64], n: usize, tol: f64) -> Result<f64> {
    let m = real_embedding_f64(coords, n)?;
    Ok(eig_sym(&m, tol)?.min())
}

pub fn real_embedding_f64(coords: &[f64], n: usize) -> Result<FMat> {
    if coords.len() != coord_len(n) {
        return Err(Error::Dimension(format!("{} Hermitian coordinates for a {n}x{n} matrix", coords.len())));
    }
    let mut re = FMat::zeros(n, n);
    let mut im = FMat::zeros(n, n);
    for i in 0..n {
        re[(i, i)] = coords[i];
    }
    for (idx, (j, k)) in off_diagonal_pairs(n).enumerate() {
        let (x, y) = (coords[n + 2 * idx], coords[n + 2 * idx + 1]);
        re[(j, k)] = x;
        re[(k, j)] = x;
        im[(j, k)] = y;
        im[(k, j)] = -y;
    }
    let mut m = FMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = re[(i, j)];
            m[(i + n, j + n)] = re[(i, j)];
            m[(i, j + n)] = -im[(i, j)];
            m[(i + n, j)] = im[(i, j)];
        }
    }
    Ok(m)
}

/// Coordinates of the rank-one projector `v v†` for a complex vector given as
/// real and imaginary parts (floats, for spot checks).
pub fn projector_coords_f64(re: &[f64], im: &[f64]) -> Vec<f64> {
    let n = re.len();
    let mut c: Vec<f64> = (0..n).map(|i| re[i] * re[i] + im[i] * im[i]).collect();
    for (j, k) in off_diagonal_pairs(n) {
        // (v v†)_jk = v_j conj(v_k)
        c.push(re[j] * re[k] + im[j] * im[k]);
        c.push(im[j] * re[k] - re[j] * im[k]);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::qvec;

    #[test]
    fn coordinate_round_trip() {
        let c = qvec(&[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let a = from_coords(&c, 3).unwrap();
        assert!(a.is_hermitian());
        assert_eq!(to_coords(&a).unwrap(), c);
    }

    #[test]
    fn trace_functional_matches_trace() {
        let a = from_coords(&qvec(&[1, -2, 3, 5]), 2).unwrap();
        let u = from_coords(&qvec(&[2, 7, -1, 4]), 2).unwrap();
        let prod = a.matmul(&u).unwrap();
        let c = trace_functional(&u).unwrap();
        let lhs: Rational = c.iter().zip(to_coords(&a).unwrap()).map(|(x, y)| x * y).sum();
        assert_eq!(lhs, prod.trace_re());
        assert!(prod.trace_im().is_zero());
        assert_eq!(functional_matrix(&c, 2).unwrap(), u);
    }

    #[test]
    fn psd_checks() {
        // [[1,2],[2,1]] has eigenvalue -1.
        let a = from_coords(&qvec(&[1, 1, 2, 0]), 2).unwrap();
        assert!(!is_psd_exact(&a));
        assert!((min_eigenvalue(&[1.0, 1.0, 2.0, 0.0], 2, 1e-9).unwrap() + 1.0).abs() < 1e-9);
        // [[1, i],[-i, 1]] is PSD and singular.
        let b = from_coords(&qvec(&[1, 1, 0, 1]), 2).unwrap();
        assert!(is_psd_exact(&b));
        let p = projector_coords_f64(&[0.6, 0.0], &[0.0, 0.8]);
        assert!(min_eigenvalue(&p, 2, 1e-9).unwrap().abs() < 1e-9);
    }
}
