//! Minimal and maximal tensor products of polyhedral cones.
//!
//! A tensor `z ∈ V₁⊗V₂` is a `d₁×d₂` matrix with `(x⊗y)[i][j] = xᵢyⱼ`, and a
//! functional `F` acts by `⟨F, Z⟩ = Σᵢⱼ FᵢⱼZᵢⱼ`, so `⟨a⊗b, Z⟩ = aᵀZb`.

mod certificate;

pub use certificate::{verify_certificate, ChainStep, EvidenceEntry, SeparationCertificate};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cones::dd::extreme_rays_of_dual;
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::exactnum::lp::conic_combination;
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{QVec, Rational};

/// Default cap on `d₁·d₂` for facet enumeration of a min cone.
pub const NUCLEARITY_CAP: usize = 36;

pub fn product(x: &[Rational], y: &[Rational]) -> QMat {
    QMat::outer(x, y)
}

/// `aᵀ Z b`, the value of the product functional `a⊗b` at `z`.
pub fn pair_value(a: &[Rational], z: &QMat, b: &[Rational]) -> Result<Rational> {
    let zb = z.mul_vec(b)?;
    if a.len() != zb.len() {
        return Err(Error::Dimension(format!("functional of length {} on a {}x{} tensor", a.len(), z.rows(), z.cols())));
    }
    Ok(a.iter().zip(&zb).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
}

fn check_shape(c1: &PolyhedralCone, c2: &PolyhedralCone, z: &QMat) -> Result<()> {
    if z.shape() != (c1.dim(), c2.dim()) {
        return Err(Error::Dimension(format!(
            "{}x{} tensor for cones of dimensions {} and {}",
            z.rows(),
            z.cols(),
            c1.dim(),
            c2.dim()
        )));
    }
    Ok(())
}

/// Products of extreme rays, row-major over the first cone's rays.
pub fn min_tensor_generators(c1: &PolyhedralCone, c2: &PolyhedralCone) -> Result<Vec<QMat>> {
    let (r1, r2) = (c1.extreme_rays()?, c2.extreme_rays()?);
    Ok(r1.iter().flat_map(|x| r2.iter().map(move |y| product(x, y))).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxMembership {
    pub member: bool,
    /// One entry per pair of dual extreme rays.
    pub evidence: Vec<EvidenceEntry>,
}

/// Decides `z ∈ C₁⊛C₂` by evaluating every pair of dual extreme rays.
pub fn max_membership(c1: &PolyhedralCone, c2: &PolyhedralCone, z: &QMat) -> Result<MaxMembership> {
    check_shape(c1, c2, z)?;
    let (d1, d2) = (c1.dual_rays()?, c2.dual_rays()?);
    let mut evidence = Vec::with_capacity(d1.len() * d2.len());
    for a in &d1 {
        for b in &d2 {
            let value = pair_value(a, z, b)?;
            evidence.push(EvidenceEntry { left: a.clone(), right: b.clone(), value });
        }
    }
    let member = evidence.iter().all(|e| !e.value.is_negative());
    Ok(MaxMembership { member, evidence })
}

#[derive(Clone, Debug, PartialEq)]
pub enum MinMembership {
    /// Nonnegative coefficients over [`min_tensor_generators`].
    Inside(QVec),
    /// Functional nonnegative on every product generator, scaled to take the
    /// value −1 at `z`.
    Outside(QMat),
}

impl MinMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, MinMembership::Inside(_))
    }
}

/// Decides `z ∈ C₁⊙C₂` by LP over the product generators.
pub fn min_membership(c1: &PolyhedralCone, c2: &PolyhedralCone, z: &QMat) -> Result<MinMembership> {
    check_shape(c1, c2, z)?;
    let gens: Vec<QVec> = min_tensor_generators(c1, c2)?.into_iter().map(|g| g.flatten()).collect();
    match conic_combination(&gens, &z.flatten())? {
        Ok(coeffs) => Ok(MinMembership::Inside(coeffs)),
        Err(sep) => {
            let f = QMat::from_vec(c1.dim(), c2.dim(), sep)?;
            // Normalize so that the separation value is exactly -1.
            let value = f.pairing(z)?;
            if !value.is_negative() {
                return Err(Error::Internal("separator does not separate".into()));
            }
            let f = f.scale(&(-(Rational::one() / value)));
            // conic_combination already replayed the LP; re-check the claim itself.
            for g in min_tensor_generators(c1, c2)? {
                if f.pairing(&g)?.is_negative() {
                    return Err(Error::Internal("separator negative on a product generator".into()));
                }
            }
            Ok(MinMembership::Outside(f))
        }
    }
}

#[derive(Clone, Debug)]
pub enum Nuclearity {
    Nuclear,
    Entangleable(Box<SeparationCertificate>),
}

impl Nuclearity {
    pub fn is_nuclear(&self) -> bool {
        matches!(self, Nuclearity::Nuclear)
    }
}

/// Decides whether `C₁⊙C₂ = C₁⊛C₂` by enumerating the facets of the min cone.
///
/// Every facet functional `F` lies in `(C₁⊙C₂)*`. The pair is nuclear iff each
/// such `F` is a product functional, which for a functional already
/// nonnegative on all products means `F` has rank one. A facet of higher rank
/// is not in `C₁*⊙C₂*`, and the LP separating it from the dual product
/// generators yields a witness in `C₁⊛C₂` on which `F` is negative.
pub fn nuclearity_bruteforce(c1: &PolyhedralCone, c2: &PolyhedralCone) -> Result<Nuclearity> {
    nuclearity_bruteforce_capped(c1, c2, NUCLEARITY_CAP)
}

pub fn nuclearity_bruteforce_capped(c1: &PolyhedralCone, c2: &PolyhedralCone, cap: usize) -> Result<Nuclearity> {
    let (d1, d2) = (c1.dim(), c2.dim());
    if d1 * d2 > cap {
        return Err(Error::CapExceeded(format!("product dimension {} exceeds the cap {cap}", d1 * d2)));
    }
    let gens: Vec<QVec> = min_tensor_generators(c1, c2)?.into_iter().map(|g| g.flatten()).collect();
    let facets = extreme_rays_of_dual(&gens, d1 * d2)?;
    let (dual1, dual2) = (c1.dual_rays()?, c2.dual_rays()?);
    let dual_products: Vec<QVec> =
        dual1.iter().flat_map(|a| dual2.iter().map(move |b| product(a, b).flatten())).collect();
    for f in facets {
        let fm = QMat::from_vec(d1, d2, f.clone())?;
        if fm.rank() <= 1 {
            continue;
        }
        let witness = match conic_combination(&dual_products, &f)? {
            Ok(_) => continue,
            Err(sep) => QMat::from_vec(d1, d2, sep)?,
        };
        let chain = vec![ChainStep::note("facet-enumeration", "rank > 1 facet of the min cone separated from the dual product cone")];
        let cert = SeparationCertificate::assemble(c1, c2, witness, fm, chain)?;
        return Ok(Nuclearity::Entangleable(Box::new(cert)));
    }
    Ok(Nuclearity::Nuclear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Polygon;
    use crate::exactnum::rational::{int, rat};

    fn poly(p: Polygon) -> PolyhedralCone {
        PolyhedralCone::new(p.lifted()).unwrap()
    }

    fn h_inverse() -> QMat {
        QMat::from_rows(vec![
            vec![rat(1, 2), rat(1, 2), int(0)],
            vec![rat(1, 2), rat(-1, 2), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap()
    }

    #[test]
    fn generator_counts() {
        let o2 = PolyhedralCone::orthant(2);
        assert_eq!(min_tensor_generators(&o2, &o2).unwrap().len(), 4);
        let d = poly(Polygon::diamond());
        assert_eq!(min_tensor_generators(&d, &d).unwrap().len(), 16);
        assert_eq!(min_tensor_generators(&poly(Polygon::triangle()), &poly(Polygon::square())).unwrap().len(), 12);
    }

    #[test]
    fn h_inverse_in_max_not_min() {
        let d = poly(Polygon::diamond());
        let m = max_membership(&d, &d, &h_inverse()).unwrap();
        assert!(m.member);
        assert_eq!(m.evidence.len(), 16);
        let MinMembership::Outside(f) = min_membership(&d, &d, &h_inverse()).unwrap() else { panic!("expected Outside") };
        assert_eq!(f.pairing(&h_inverse()).unwrap(), int(-1));
    }

    #[test]
    fn chsh_functional_is_valid_on_diamond_products() {
        let d = poly(Polygon::diamond());
        let f = QMat::from_ints(&[&[-1, -1, 0], &[-1, 1, 0], &[0, 0, 1]]);
        for g in min_tensor_generators(&d, &d).unwrap() {
            assert!(!f.pairing(&g).unwrap().is_negative());
        }
        assert_eq!(f.pairing(&h_inverse()).unwrap(), int(-1));
    }

    #[test]
    fn difference_of_products_is_not_in_max() {
        let o2 = PolyhedralCone::orthant(2);
        let z = QMat::from_ints(&[&[1, 0], &[0, -1]]);
        let m = max_membership(&o2, &o2, &z).unwrap();
        assert!(!m.member);
        assert!(m.evidence.iter().any(|e| e.value == int(-1)));
    }

    #[test]
    fn nuclearity_examples() {
        let sq = poly(Polygon::square());
        assert!(nuclearity_bruteforce(&PolyhedralCone::orthant(3), &sq).unwrap().is_nuclear());
        assert!(nuclearity_bruteforce(&PolyhedralCone::orthant(2), &PolyhedralCone::orthant(2)).unwrap().is_nuclear());
        let Nuclearity::Entangleable(cert) = nuclearity_bruteforce(&sq, &sq).unwrap() else { panic!("expected entangleable") };
        assert!(verify_certificate(&cert, &sq, &sq).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let big = PolyhedralCone::orthant(7);
        assert!(matches!(nuclearity_bruteforce(&big, &big), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn sum_of_generators_is_inside_min() {
        let sq = poly(Polygon::square());
        let d = poly(Polygon::diamond());
        let mut z = QMat::zeros(3, 3);
        for g in min_tensor_generators(&sq, &d).unwrap() {
            z = z.add(&g).unwrap();
        }
        assert!(min_membership(&sq, &d, &z).unwrap().is_inside());
    }
}
