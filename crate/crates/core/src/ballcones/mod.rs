//! Lorentz and PSD cones: exact criteria for centered tensors, the Clifford
//! retract of a PSD cone onto a Lorentz cone, pinching retracts, certificates
//! for polyhedral cones against PSD cones, and simplex asphericity.

mod clifford;
mod semiquantum;

pub use clifford::{clifford_family, lorentz_psd_retract, psd_pinching_retract, CliffordFamily, MAX_CLIFFORD_N};
pub use semiquantum::{
    certify_entangleable_semiquantum, spot_check_semiquantum, verify_semiquantum, PsdEvidence, SemiquantumCertificate,
    SpotCheck, DEFAULT_SPOT_CHECKS,
};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::mat::{FMat, QMat};
use crate::exactnum::rational::{dot, serde_rational, to_f64, QVec, Rational};
use crate::exactnum::spectral::{operator_norm, svd_full, trace_norm};

/// `z = Σᵢⱼ Bᵢⱼ eᵢ⊗eⱼ + t·e₀⊗e₀` over `Rⁿ⁺¹⊗Rⁿ⁺¹`, with `e₀` the apex
/// coordinate (stored last) and no mixed entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredTensor {
    pub block: FMat,
    pub apex: f64,
}

impl CenteredTensor {
    pub fn new(block: FMat, apex: f64) -> Result<Self> {
        if !block.is_square() {
            return Err(Error::Dimension("centered tensor block must be square".into()));
        }
        if !(apex.is_finite() && apex >= 0.0) {
            return Err(Error::InvalidInput("apex coefficient must be nonnegative".into()));
        }
        Ok(CenteredTensor { block, apex })
    }

    pub fn from_exact(block: &QMat, apex: &Rational) -> Result<Self> {
        Self::new(block.to_f64(), to_f64(apex))
    }

    /// `B = Id_n`, `t = 1`.
    pub fn identity(n: usize) -> Self {
        CenteredTensor { block: FMat::identity(n), apex: 1.0 }
    }

    pub fn n(&self) -> usize {
        self.block.rows()
    }

    /// The full `(n+1)×(n+1)` tensor matrix.
    pub fn to_matrix(&self) -> FMat {
        let n = self.n();
        let mut m = FMat::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.block[(i, j)];
            }
        }
        m[(n, n)] = self.apex;
        m
    }
}

/// Membership in `Lₙ(1) ⊛ Lₙ(1)`: the minimum of `⟨Ba, b⟩` over unit vectors
/// is `−σ₁(B)`, so the tensor is nonnegative on all products iff `σ₁(B) ≤ t`.
pub fn lorentz_max_membership_centered(z: &CenteredTensor, tol: f64) -> Result<bool> {
    Ok(operator_norm(&z.block, tol * 1e-3)? <= z.apex + tol)
}

/// Membership in `Lₙ(1) ⊙ Lₙ(r)`: iff `‖B‖₁ ≤ r·t`.
pub fn lorentz_min_membership_centered(z: &CenteredTensor, r: f64, tol: f64) -> Result<bool> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidInput("Lorentz radius must be positive".into()));
    }
    Ok(trace_norm(&z.block, tol * 1e-3)? <= r * z.apex + tol)
}

/// `coefficient · left ⊗ right` with `left ∈ Lₙ(1)` and `right ∈ Lₙ(r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductTerm {
    pub coefficient: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// An explicit decomposition of a centered tensor in `Lₙ(1) ⊙ Lₙ(r)`, or
/// `None` when the trace-norm criterion fails.
///
/// Each singular triple `(σ, u, v)` contributes
/// `σ/2·[(u,1)⊗(v,1/r) + (−u,1)⊗(−v,1/r)]`, which is `σ·uvᵀ + σ/r·e₀⊗e₀`
/// with the mixed terms cancelling; the remaining apex mass is `(0,1)⊗(0,1)`.
pub fn lorentz_min_decomposition(z: &CenteredTensor, r: f64, tol: f64) -> Result<Option<Vec<ProductTerm>>> {
    if !lorentz_min_membership_centered(z, r, tol)? {
        return Ok(None);
    }
    let n = z.n();
    let parts = svd_full(&z.block, tol * 1e-3)?;
    let mut terms = Vec::new();
    let mut used = 0.0;
    for (sigma, v) in parts.values.iter().zip(&parts.right) {
        if *sigma <= tol * 1e-3 {
            continue;
        }
        let u: Vec<f64> = z.block.mul_vec(v)?.iter().map(|x| x / sigma).collect();
        for sign in [1.0, -1.0] {
            let mut left: Vec<f64> = u.iter().map(|x| sign * x).collect();
            left.push(1.0);
            let mut right: Vec<f64> = v.iter().map(|x| sign * x).collect();
            right.push(1.0 / r);
            terms.push(ProductTerm { coefficient: sigma / 2.0, left, right });
        }
        used += sigma / r;
    }
    let rest = (z.apex - used).max(0.0);
    if rest > 0.0 {
        let mut apex = vec![0.0; n + 1];
        apex[n] = 1.0;
        terms.push(ProductTerm { coefficient: rest, left: apex.clone(), right: apex });
    }
    Ok(Some(terms))
}

/// `Σ cₖ·leftₖ⊗rightₖ`.
pub fn reconstruct(terms: &[ProductTerm], dim: usize) -> FMat {
    let mut m = FMat::zeros(dim, dim);
    for t in terms {
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += t.coefficient * t.left[i] * t.right[j];
            }
        }
    }
    m
}

/// Whether `x ∈ Lₙ(r)` up to `tol`.
pub fn in_lorentz_f64(x: &[f64], r: f64, tol: f64) -> bool {
    let (space, t) = x.split_at(x.len() - 1);
    let norm = space.iter().map(|v| v * v).sum::<f64>().sqrt();
    norm <= r * t[0] + tol
}

pub const MIN_ASPHERICITY_DIM: usize = 2;
pub const MAX_ASPHERICITY_DIM: usize = 6;

/// Circumradius and inradius of the regular `d`-simplex about its centroid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsphericityValue {
    pub dim: usize,
    #[serde(with = "serde_rational")]
    pub circumradius_sq: Rational,
    #[serde(with = "serde_rational")]
    pub inradius_sq: Rational,
    /// `(R/r)²`.
    #[serde(with = "serde_rational")]
    pub squared_ratio: Rational,
    pub ratio: f64,
}

fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Squared distance from `p` to the affine hull of `points`, solving the
/// normal equations of the least-squares projection exactly.
fn affine_distance_sq(p: &[Rational], points: &[QVec]) -> Result<Rational> {
    let base = &points[0];
    let dirs: Vec<QVec> = points[1..].iter().map(|q| sub(q, base)).collect();
    let target = sub(p, base);
    if dirs.is_empty() {
        return Ok(dot(&target, &target));
    }
    let k = dirs.len();
    let gram = QMat::from_vec(k, k, dirs.iter().flat_map(|a| dirs.iter().map(move |b| dot(a, b))).collect())?;
    let rhs: QVec = dirs.iter().map(|a| dot(a, &target)).collect();
    let coeffs = gram.solve(&rhs).ok_or(Error::Singular)?;
    let mut residual = target;
    for (c, d) in coeffs.iter().zip(&dirs) {
        for (r, x) in residual.iter_mut().zip(d) {
            *r -= c * x;
        }
    }
    Ok(dot(&residual, &residual))
}

/// Asphericity of the regular `d`-simplex, realised as the standard basis of
/// `R^{d+1}`: circumradius over inradius about the centroid, which equals `d`.
pub fn simplex_asphericity_value(d: usize) -> Result<AsphericityValue> {
    if !(MIN_ASPHERICITY_DIM..=MAX_ASPHERICITY_DIM).contains(&d) {
        return Err(Error::InvalidInput(format!(
            "simplex dimension {d} outside {MIN_ASPHERICITY_DIM}..={MAX_ASPHERICITY_DIM}"
        )));
    }
    let m = d + 1;
    let vertices: Vec<QVec> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let centroid: QVec = vec![Rational::new(1.into(), (m as i64).into()); m];
    let circumradius_sq = vertices
        .iter()
        .map(|v| {
            let w = sub(v, &centroid);
            dot(&w, &w)
        })
        .max()
        .expect("nonempty");
    let mut inradius_sq: Option<Rational> = None;
    for skip in 0..m {
        let facet: Vec<QVec> = vertices.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| v.clone()).collect();
        let dist = affine_distance_sq(&centroid, &facet)?;
        if inradius_sq.as_ref().is_none_or(|r| dist < *r) {
            inradius_sq = Some(dist);
        }
    }
    let inradius_sq = inradius_sq.expect("nonempty");
    let squared_ratio = &circumradius_sq / &inradius_sq;
    let ratio = to_f64(&squared_ratio).sqrt();
    Ok(AsphericityValue { dim: d, circumradius_sq, inradius_sq, squared_ratio, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    const TOL: f64 = 1e-9;

    #[test]
    fn identity_block_criteria() {
        for n in 2..=6 {
            let z = CenteredTensor::identity(n);
            assert!(lorentz_max_membership_centered(&z, TOL).unwrap());
            assert!(lorentz_min_membership_centered(&z, n as f64, TOL).unwrap());
            assert!(!lorentz_min_membership_centered(&z, n as f64 - 0.5, TOL).unwrap());
        }
    }

    #[test]
    fn scaled_identity_is_outside_max() {
        let z = CenteredTensor::new(FMat::identity(2).scale(&2.0), 1.0).unwrap();
        assert!(!lorentz_max_membership_centered(&z, TOL).unwrap());
        let zero = CenteredTensor::new(FMat::zeros(3, 3), 0.0).unwrap();
        assert!(lorentz_max_membership_centered(&zero, TOL).unwrap());
        assert!(CenteredTensor::new(FMat::zeros(2, 2), -1.0).is_err());
    }

    #[test]
    fn rank_one_unit_is_a_product() {
        let mut b = FMat::zeros(3, 3);
        b[(0, 1)] = 1.0;
        let z = CenteredTensor::new(b, 1.0).unwrap();
        assert!(lorentz_min_membership_centered(&z, 1.0, TOL).unwrap());
    }

    #[test]
    fn decomposition_reconstructs() {
        let b = FMat::from_rows(vec![vec![0.5, 0.2, 0.0], vec![-0.1, 0.3, 0.1], vec![0.0, 0.0, 0.2]]).unwrap();
        let z = CenteredTensor::new(b, 2.0).unwrap();
        let r = 1.5;
        let terms = lorentz_min_decomposition(&z, r, TOL).unwrap().unwrap();
        assert!(reconstruct(&terms, 4).max_abs_diff(&z.to_matrix()) < 1e-8);
        for t in &terms {
            assert!(t.coefficient >= 0.0);
            assert!(in_lorentz_f64(&t.left, 1.0, 1e-9));
            assert!(in_lorentz_f64(&t.right, r, 1e-9));
        }
    }

    #[test]
    fn asphericity_of_simplices() {
        for d in 2..=6 {
            let v = simplex_asphericity_value(d).unwrap();
            assert_eq!(v.squared_ratio, int((d * d) as i64));
            assert!((v.ratio - d as f64).abs() < 1e-9);
        }
        assert!(simplex_asphericity_value(7).is_err());
    }
}
