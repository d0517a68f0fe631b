use num_traits::{One, Zero};
use serde::Serialize;

use crate::cones::hermitian::{self, CMat};
use crate::cones::{Cone, Radius};
use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{int, Rational};
use crate::retractlab::{verify_retract, Positivity, RetractPair, DEFAULT_POSITIVITY_SAMPLES};

pub const MAX_CLIFFORD_N: usize = 4;

/// Anticommuting Hermitian unitaries `U₁,…,U₂ₙ` of size `2ⁿ`, with the maps
/// `Φ(A) = (tr AU₁, …, tr AU₂ₙ, tr A)` and `Ψ(x) = Σ xᵢUᵢ + x₂ₙ₊₁·Id` in
/// Hermitian coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordFamily {
    pub n: usize,
    pub generators: Vec<CMat>,
    /// `(2n+1) × 4ⁿ`.
    pub phi: QMat,
    /// `4ⁿ × (2n+1)`.
    pub psi: QMat,
}

#[derive(Serialize)]
struct CliffordJson {
    kind: &'static str,
    n: usize,
    /// Real embeddings `[[Re, −Im], [Im, Re]]`.
    generators: Vec<QMat>,
}

impl Serialize for CliffordFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CliffordJson { kind: "clifford", n: self.n, generators: self.real_embedded() }.serialize(s)
    }
}

impl CliffordFamily {
    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn real_embedded(&self) -> Vec<QMat> {
        self.generators.iter().map(CMat::real_embedding).collect()
    }

    /// Exact check of `UᵢUⱼ + UⱼUᵢ = 2δᵢⱼ·Id`, `tr Uᵢ = 0`, `tr UᵢUⱼ = 2ⁿδᵢⱼ`
    /// and `Φ∘Ψ = 2ⁿ·Id`.
    pub fn check_invariants(&self) -> Result<bool> {
        let size = self.size();
        let id = CMat::identity(size);
        let zero = CMat::real(QMat::zeros(size, size));
        let dim = int(size as i64);
        for (i, u) in self.generators.iter().enumerate() {
            if !u.is_hermitian() || !u.trace_re().is_zero() || !u.trace_im().is_zero() {
                return Ok(false);
            }
            for (j, v) in self.generators.iter().enumerate() {
                let uv = u.matmul(v)?;
                let anti = uv.add(&v.matmul(u)?)?;
                let expected = if i == j { id.scale(&int(2)) } else { zero.clone() };
                if anti != expected {
                    return Ok(false);
                }
                let tr = uv.trace_re();
                if (i == j && tr != dim) || (i != j && !tr.is_zero()) || !uv.trace_im().is_zero() {
                    return Ok(false);
                }
            }
        }
        let k = self.generators.len() + 1;
        Ok(self.phi.matmul(&self.psi)? == QMat::identity(k).scale(&dim))
    }
}

fn pauli_x() -> CMat {
    CMat::real(QMat::from_ints(&[&[0, 1], &[1, 0]]))
}

fn pauli_y() -> CMat {
    CMat { re: QMat::zeros(2, 2), im: QMat::from_ints(&[&[0, -1], &[1, 0]]) }
}

fn pauli_z() -> CMat {
    CMat::real(QMat::from_ints(&[&[1, 0], &[0, -1]]))
}

fn kron_all(factors: &[CMat]) -> CMat {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc.kron(f))
}

/// Jordan–Wigner family: `U₂ₖ₋₁ = Z^{⊗k−1}⊗X⊗Id^{⊗n−k}` and
/// `U₂ₖ = Z^{⊗k−1}⊗Y⊗Id^{⊗n−k}`.
pub fn clifford_family(n: usize) -> Result<CliffordFamily> {
    if !(1..=MAX_CLIFFORD_N).contains(&n) {
        return Err(Error::InvalidInput(format!("Clifford family needs 1 <= n <= {MAX_CLIFFORD_N}, got {n}")));
    }
    let mut generators = Vec::with_capacity(2 * n);
    for k in 0..n {
        for middle in [pauli_x(), pauli_y()] {
            let factors: Vec<CMat> = (0..n)
                .map(|j| match j.cmp(&k) {
                    std::cmp::Ordering::Less => pauli_z(),
                    std::cmp::Ordering::Equal => middle.clone(),
                    std::cmp::Ordering::Greater => CMat::identity(2),
                })
                .collect();
            generators.push(kron_all(&factors));
        }
    }
    let id = CMat::identity(1 << n);
    let mut phi_rows = Vec::with_capacity(2 * n + 1);
    let mut psi_cols = Vec::with_capacity(2 * n + 1);
    for u in generators.iter().chain(std::iter::once(&id)) {
        phi_rows.push(hermitian::trace_functional(u)?);
        psi_cols.push(hermitian::to_coords(u)?);
    }
    let family = CliffordFamily { n, generators, phi: QMat::from_rows(phi_rows)?, psi: QMat::from_cols(&psi_cols)? };
    if !family.check_invariants()? {
        return Err(Error::Internal("Clifford invariants failed".into()));
    }
    Ok(family)
}

fn sampled(argument: &str, seed: u64) -> Positivity {
    Positivity::Sampled { samples: DEFAULT_POSITIVITY_SAMPLES, seed, argument: argument.into() }
}

/// `Lorentz(2n, 1)` as a retract of `Psd(2ⁿ)` via `Φ/2ⁿ` and `Ψ`.
///
/// `Ψ(L) ⊂ PSD` because `(Σ xᵢUᵢ)² = ‖x‖²·Id`, so the spectrum of `Ψ(x)` is
/// `x₂ₙ₊₁ ± ‖x‖`. `Φ(PSD) ⊂ L` because for a unit vector `v` the numbers
/// `⟨v, Uᵢv⟩` are the coordinates of `v` against anticommuting reflections,
/// whose squares sum to at most 1.
pub fn lorentz_psd_retract(n: usize, seed: u64) -> Result<RetractPair> {
    let family = clifford_family(n)?;
    let scale = Rational::one() / int(family.size() as i64);
    let r = RetractPair {
        source: Cone::Psd { n: family.size() },
        target: Cone::Lorentz { n: 2 * n, r: Radius::Exact(Rational::one()) },
        phi: family.phi.scale(&scale),
        psi: family.psi.clone(),
        positivity: sampled("anticommuting generators: (sum x_i U_i)^2 = |x|^2 Id", seed),
    };
    if !verify_retract(&r)? {
        return Err(Error::Verification("Clifford retract does not verify".into()));
    }
    Ok(r)
}

/// Top-left `k×k` block of an `n×n` matrix.
fn corner(a: &CMat, k: usize) -> CMat {
    let pick = |m: &QMat| {
        QMat::from_vec(k, k, (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|ij| m[ij].clone()).collect())
            .expect("k x k")
    };
    CMat { re: pick(&a.re), im: pick(&a.im) }
}

fn embed(a: &CMat, n: usize) -> CMat {
    let k = a.n();
    let mut re = QMat::zeros(n, n);
    let mut im = QMat::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            re[(i, j)] = a.re[(i, j)].clone();
            im[(i, j)] = a.im[(i, j)].clone();
        }
    }
    CMat { re, im }
}

/// Matrix of a linear map on Hermitian coordinates, built column by column.
fn coordinate_matrix(from: usize, to: usize, f: impl Fn(&CMat) -> CMat) -> Result<QMat> {
    let len = hermitian::coord_len(from);
    let mut cols = Vec::with_capacity(len);
    for j in 0..len {
        let mut e = vec![Rational::zero(); len];
        e[j] = Rational::one();
        let image = f(&hermitian::from_coords(&e, from)?);
        if image.n() != to {
            return Err(Error::Internal("coordinate map has the wrong size".into()));
        }
        cols.push(hermitian::to_coords(&image)?);
    }
    QMat::from_cols(&cols)
}

/// `Psd(k)` as a retract of `Psd(n)`: compression to the top-left corner and
/// embedding into it.
pub fn psd_pinching_retract(k: usize, n: usize, seed: u64) -> Result<RetractPair> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("pinching needs 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let r = RetractPair {
        source: Cone::Psd { n },
        target: Cone::Psd { n: k },
        phi: coordinate_matrix(n, k, |a| corner(a, k))?,
        psi: coordinate_matrix(k, n, |a| embed(a, n))?,
        positivity: sampled("compression and corner embedding are congruences", seed),
    };
    if !verify_retract(&r)? {
        return Err(Error::Verification("pinching retract does not verify".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::qvec;

    #[test]
    fn families_satisfy_invariants() {
        for n in 1..=3 {
            let f = clifford_family(n).unwrap();
            assert_eq!(f.generators.len(), 2 * n);
            assert!(f.check_invariants().unwrap());
        }
        assert!(clifford_family(0).is_err());
        assert!(clifford_family(5).is_err());
    }

    #[test]
    fn qubit_retract_closed_form() {
        let r = lorentz_psd_retract(1, 3).unwrap();
        // Ψ(0,0,1) = Id.
        let id = r.psi.mul_vec(&qvec(&[0, 0, 1])).unwrap();
        assert_eq!(id, qvec(&[1, 1, 0, 0]));
        // Ψ(1,0,0) = X, Ψ(0,1,0) = Y.
        assert_eq!(r.psi.mul_vec(&qvec(&[1, 0, 0])).unwrap(), qvec(&[0, 0, 1, 0]));
        assert_eq!(r.psi.mul_vec(&qvec(&[0, 1, 0])).unwrap(), qvec(&[0, 0, 0, -1]));
        assert_eq!(r.phi.matmul(&r.psi).unwrap(), QMat::identity(3));
    }

    #[test]
    fn pinching_diagonal() {
        let r = psd_pinching_retract(2, 3, 1).unwrap();
        let diag = qvec(&[1, 2, 3, 0, 0, 0, 0, 0, 0]);
        assert_eq!(r.phi.mul_vec(&diag).unwrap(), qvec(&[1, 2, 0, 0]));
        assert!(psd_pinching_retract(3, 2, 1).is_err());
        let same = psd_pinching_retract(3, 3, 1).unwrap();
        assert_eq!(same.phi, QMat::identity(9));
    }
}
