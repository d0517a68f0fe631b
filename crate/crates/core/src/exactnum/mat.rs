//! Dense row-major matrices over exact rationals or `f64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::rational::{format_rational, parse_rational, Rational};

pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
}

impl Scalar for f64 {
    fn zero_elem() -> Self {
        0.0
    }
    fn one_elem() -> Self {
        1.0
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMat = Mat<Rational>;
pub type FMat = Mat<f64>;

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero_elem(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one_elem();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_cols(cols: &[Vec<T>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::Dimension("ragged matrix columns".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl<T: Scalar> Mat<T>
where
    for<'a> &'a T: Mul<&'a T, Output = T> + Add<&'a T, Output = T> + Sub<&'a T, Output = T>,
{
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if *a == T::zero_elem() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] = &out[(i, j)] + &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!("{}x{} matrix applied to length-{} vector", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero_elem(), |acc, (a, b)| &acc + &(a * b)))
            .collect())
    }

    /// `vᵀ·M`
    pub fn vec_mul(&self, v: &[T]) -> Result<Vec<T>> {
        self.transpose().mul_vec(v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!("shape {:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Entrywise (Frobenius / trace) pairing `Σᵢⱼ AᵢⱼBᵢⱼ`.
    pub fn pairing(&self, other: &Self) -> Result<T> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!("pairing {:?} with {:?}", self.shape(), other.shape())));
        }
        Ok(self.data.iter().zip(&other.data).fold(T::zero_elem(), |acc, (a, b)| &acc + &(a * b)))
    }

    /// Outer product `x yᵀ`.
    pub fn outer(x: &[T], y: &[T]) -> Self {
        let mut m = Self::zeros(x.len(), y.len());
        for (i, a) in x.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                m[(i, j)] = a * b;
            }
        }
        m
    }

    /// `A·M·Bᵀ`, the action of `A ⊗ B` on a coefficient matrix.
    pub fn sandwich(a: &Self, m: &Self, b: &Self) -> Result<Self> {
        a.matmul(m)?.matmul(&b.transpose())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl QMat {
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&v| crate::exactnum::rational::int(v)).collect()).collect();
        Self::from_rows(rows).expect("rectangular integer literal")
    }

    pub fn to_f64(&self) -> FMat {
        self.map(crate::exactnum::rational::to_f64)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in 0..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let delta = &f * &m[(r, j)];
                        m[(i, j)] = &m[(i, j)] - &delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::from_integer(1.into());
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &pivot;
                for j in c..n {
                    let delta = &f * &m[(c, j)];
                    m[(i, j)] = &m[(i, j)] - &delta;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<QMat> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::from_integer(1.into());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        let mut inv = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::from_integer(1.into());
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = -r[(row, f)].clone();
                }
                x
            })
            .collect()
    }

    /// Solves `M x = b`, returning one solution if the system is consistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        if b.len() != self.rows {
            return None;
        }
        let mut aug = QMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Exact positive-semidefiniteness test for a symmetric rational matrix
    /// by symmetric Gaussian elimination.
    pub fn is_psd_exact(&self) -> bool {
        if !self.is_square() || *self != self.transpose() {
            return false;
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut active: Vec<usize> = (0..n).collect();
        while let Some(&k) = active.first() {
            let d = m[(k, k)].clone();
            if d.is_negative() {
                return false;
            }
            if d.is_zero() {
                if active.iter().any(|&j| !m[(k, j)].is_zero()) {
                    return false;
                }
                active.remove(0);
                continue;
            }
            active.remove(0);
            for &i in &active {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let f = &m[(i, k)] / &d;
                for &j in &active {
                    let delta = &f * &m[(k, j)];
                    m[(i, j)] = &m[(i, j)] - &delta;
                }
            }
        }
        true
    }

    pub fn kron(&self, other: &QMat) -> QMat {
        let mut out = QMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = &self[(i, j)] * &other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Flattens row-major into a vector (`vec(M)[i·cols + j] = Mᵢⱼ`).
    pub fn flatten(&self) -> Vec<Rational> {
        self.data.clone()
    }
}

impl Neg for &QMat {
    type Output = QMat;
    fn neg(self) -> QMat {
        self.map(|a| -a.clone())
    }
}

impl FMat {
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &FMat) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Serialize for QMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let parsed: std::result::Result<Vec<Vec<Rational>>, _> =
            rows.iter().map(|r| r.iter().map(|t| parse_rational(t)).collect()).collect();
        let parsed = parsed.map_err(serde::de::Error::custom)?;
        QMat::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|r| r.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn inverse_of_h() {
        let h = QMat::from_ints(&[&[1, 1, 0], &[1, -1, 0], &[0, 0, 1]]);
        let inv = h.inverse().unwrap();
        assert_eq!(inv[(0, 0)], rat(1, 2));
        assert_eq!(inv[(1, 1)], rat(-1, 2));
        assert_eq!(h.matmul(&inv).unwrap(), QMat::identity(3));
        assert_eq!(h.determinant().unwrap(), int(-2));
    }

    #[test]
    fn singular_inverse_fails() {
        let m = QMat::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(matches!(m.inverse(), Err(Error::Singular)));
        assert_eq!(m.rank(), 1);
        assert_eq!(m.nullspace().len(), 1);
    }

    #[test]
    fn solve_and_nullspace() {
        let m = QMat::from_ints(&[&[1, 1, 1]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).unwrap()[0].is_zero());
        }
        let x = m.solve(&[int(3)]).unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![int(3)]);
    }

    #[test]
    fn exact_psd() {
        assert!(QMat::from_ints(&[&[2, 1], &[1, 2]]).is_psd_exact());
        assert!(QMat::from_ints(&[&[1, 1], &[1, 1]]).is_psd_exact());
        assert!(!QMat::from_ints(&[&[1, 2], &[2, 1]]).is_psd_exact());
        assert!(!QMat::from_ints(&[&[0, 1], &[1, 0]]).is_psd_exact());
        assert!(QMat::from_ints(&[&[0, 0], &[0, 3]]).is_psd_exact());
    }

    #[test]
    fn shape_errors() {
        let a = QMat::zeros(2, 3);
        assert!(a.matmul(&QMat::zeros(2, 3)).is_err());
        assert!(QMat::from_vec(2, 2, vec![int(1)]).is_err());
    }
}
