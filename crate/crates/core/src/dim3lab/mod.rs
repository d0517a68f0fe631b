//! Entangleability certificates for pairs of 3-dimensional cones over polygons.
//!
//! Each polygon is squeezed by an affine map between a kite `T_{a,b}` and the
//! square `[−1,1]²` with its corners cut off. For two kites the tensor
//! `M_{a₁,b₁}H⁻¹M_{a₂,b₂}` lies in the maximal tensor product, while the CHSH
//! expression stays strictly below `2·ω₃₃` on the minimal product of the
//! blunt squares, which gives an exact separating functional.

pub mod sandwich;

use num_traits::{One, Signed, Zero};
use serde_json::json;

pub use sandwich::{max_area_quadrilateral, sandwich, CornerExclusion, Kite, Quadrilateral, SandwichResult};

use crate::cones::{Polygon, PolyhedralCone};
use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{format_rational, int, Rational};
use crate::tensorcone::{ChainStep, SeparationCertificate};

/// `[[1, ab, a], [ab, 1, b], [a, b, 1]]`, which maps the cone over the
/// diamond onto the cone over `T_{a,b}`.
pub fn kite_matrix(a: &Rational, b: &Rational) -> QMat {
    let ab = a * b;
    QMat::from_rows(vec![
        vec![Rational::one(), ab.clone(), a.clone()],
        vec![ab, Rational::one(), b.clone()],
        vec![a.clone(), b.clone(), Rational::one()],
    ])
    .expect("3x3")
}

/// `[[1, 1, 0], [1, −1, 0], [0, 0, 1]]`, mapping the cone over the diamond
/// onto the cone over the square.
pub fn hadamard_matrix() -> QMat {
    QMat::from_ints(&[&[1, 1, 0], &[1, -1, 0], &[0, 0, 1]])
}

fn check_open_interval(values: &[&Rational]) -> Result<()> {
    if values.iter().any(|v| v.abs() >= Rational::one()) {
        return Err(Error::InvalidInput("parameters must lie in (-1, 1)".into()));
    }
    Ok(())
}

/// `Ω = M_{a₂,b₂} H⁻¹ M_{a₁,b₁}`, read as a linear map from the first dual
/// cone to the second cone.
pub fn build_omega(a1: &Rational, b1: &Rational, a2: &Rational, b2: &Rational) -> Result<QMat> {
    check_open_interval(&[a1, b1, a2, b2])?;
    let h_inv = hadamard_matrix().inverse()?;
    kite_matrix(a2, b2).matmul(&h_inv)?.matmul(&kite_matrix(a1, b1))
}

/// The same element as [`build_omega`] in this crate's tensor convention
/// (`Z[i][j]` pairs the first factor's `i` with the second factor's `j`),
/// which is the transpose.
pub fn omega_tensor(a1: &Rational, b1: &Rational, a2: &Rational, b2: &Rational) -> Result<QMat> {
    Ok(build_omega(a1, b1, a2, b2)?.transpose())
}

/// `ω₁₁ + ω₁₂ + ω₂₁ − ω₂₂`.
pub fn chsh_combination(m: &QMat) -> Rational {
    &m[(0, 0)] + &m[(0, 1)] + &m[(1, 0)] - &m[(1, 1)]
}

/// `x₁x₂ + x₁y₂ + y₁x₂ − y₁y₂`.
pub fn chsh_value(p1: &[Rational], p2: &[Rational]) -> Rational {
    let (x1, y1, x2, y2) = (&p1[0], &p1[1], &p2[0], &p2[1]);
    x1 * x2 + x1 * y2 + y1 * x2 - y1 * y2
}

fn in_blunt_square(p: &[Rational]) -> bool {
    let one = Rational::one();
    let (x, y) = (p[0].abs(), p[1].abs());
    x <= one && y <= one && !(x == one && y == one)
}

/// Largest CHSH value over vertex pairs, which is strictly below 2 when both
/// polygons avoid the square's corners.
pub fn strict_separation_margin(p1: &Polygon, p2: &Polygon) -> Result<Rational> {
    for v in p1.vertices().iter().chain(p2.vertices()) {
        if !in_blunt_square(v) {
            return Err(Error::InvalidInput(format!(
                "vertex ({}, {}) is not in the square with its corners removed",
                format_rational(&v[0]),
                format_rational(&v[1])
            )));
        }
    }
    let mut best: Option<Rational> = None;
    for v in p1.vertices() {
        for w in p2.vertices() {
            let c = chsh_value(v, w);
            if best.as_ref().is_none_or(|b| c > *b) {
                best = Some(c);
            }
        }
    }
    let best = best.expect("polygons are nonempty");
    if best >= int(2) {
        return Err(Error::Internal("CHSH margin reached 2 on the blunt square".into()));
    }
    Ok(best)
}

/// `λ·(e₃⊗e₃) − CHSH` as a coefficient matrix.
pub fn chsh_functional(lambda: &Rational) -> QMat {
    let mut f = QMat::from_ints(&[&[-1, -1, 0], &[-1, 1, 0], &[0, 0, 0]]);
    f[(2, 2)] = lambda.clone();
    f
}

fn classical_error(which: &str, p: &Polygon) -> Error {
    Error::Classical { which: which.into(), basis: p.lifted() }
}

/// Certificate that the cones over two non-triangular polygons form an
/// entangleable pair.
pub fn entangle_3d(p1: &Polygon, p2: &Polygon) -> Result<SeparationCertificate> {
    if p1.is_triangle() {
        return Err(classical_error("first", p1));
    }
    if p2.is_triangle() {
        return Err(classical_error("second", p2));
    }
    let s1 = sandwich(p1)?;
    let s2 = sandwich(p2)?;
    let lambda = strict_separation_margin(&s1.image, &s2.image)?;
    let z = omega_tensor(&s1.kite.a, &s1.kite.b, &s2.kite.a, &s2.kite.b)?;
    let f = chsh_functional(&lambda);
    if !z[(2, 2)].is_positive() || f.pairing(&z)? >= Rational::zero() {
        return Err(Error::Internal("kite witness is not separated".into()));
    }
    // Pull back through the sandwich maps G₁, G₂:
    // z ↦ G₁⁻¹ z G₂⁻ᵀ and F ↦ G₁ᵀ F G₂ keep ⟨F, z⟩ unchanged.
    let (g1, g2) = (s1.lifted(), s2.lifted());
    let witness = QMat::sandwich(&g1.inverse()?, &z, &g2.inverse()?)?;
    let functional = QMat::sandwich(&g1.transpose(), &f, &g2.transpose())?;
    let chain = vec![
        ChainStep::with("sandwich", json!({ "cone": 1, "result": s1 })),
        ChainStep::with("sandwich", json!({ "cone": 2, "result": s2 })),
        ChainStep::with("chsh-margin", json!({ "lambda": format_rational(&lambda) })),
    ];
    let c1 = PolyhedralCone::from_trusted(3, p1.lifted());
    let c2 = PolyhedralCone::from_trusted(3, p2.lifted());
    SeparationCertificate::assemble(&c1, &c2, witness, functional, chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{qvec, rat};
    use crate::tensorcone::{max_membership, verify_certificate};

    fn zero() -> Rational {
        Rational::zero()
    }

    #[test]
    fn omega_at_origin_is_h_inverse() {
        let o = build_omega(&zero(), &zero(), &zero(), &zero()).unwrap();
        let expected = QMat::from_rows(vec![
            vec![rat(1, 2), rat(1, 2), int(0)],
            vec![rat(1, 2), rat(-1, 2), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        assert_eq!(o, expected);
    }

    #[test]
    fn omega_corner_entry() {
        let o = build_omega(&rat(1, 2), &zero(), &zero(), &zero()).unwrap();
        assert_eq!(o[(2, 2)], int(1));
        assert_eq!(chsh_combination(&o), int(2) * &o[(2, 2)]);
        assert!(build_omega(&int(1), &zero(), &zero(), &zero()).is_err());
    }

    #[test]
    fn kite_matrix_maps_diamond_vertices() {
        let (a, b) = (rat(1, 3), rat(-2, 5));
        let m = kite_matrix(&a, &b);
        let img = m.mul_vec(&qvec(&[1, 0, 1])).unwrap();
        let scale = Rational::one() + &a;
        assert_eq!(img, vec![scale.clone(), &scale * &b, scale]);
    }

    #[test]
    fn chsh_examples() {
        assert_eq!(chsh_value(&qvec(&[1, 1]), &qvec(&[1, 1])), int(2));
        assert_eq!(chsh_value(&qvec(&[1, -1]), &qvec(&[1, -1])), int(-2));
    }

    #[test]
    fn margins() {
        let d = Polygon::diamond();
        assert_eq!(strict_separation_margin(&d, &d).unwrap(), int(1));
        assert!(strict_separation_margin(&Polygon::square(), &d).is_err());
    }

    #[test]
    fn diamond_pair_certificate() {
        let d = Polygon::diamond();
        let cert = entangle_3d(&d, &d).unwrap();
        assert_eq!(cert.separation_value, int(-1));
        assert_eq!(cert.functional, chsh_functional(&int(1)));
        assert_eq!(cert.witness, build_omega(&zero(), &zero(), &zero(), &zero()).unwrap());
    }

    #[test]
    fn square_pair_certificate() {
        let s = Polygon::square();
        let cert = entangle_3d(&s, &s).unwrap();
        let c = PolyhedralCone::from_trusted(3, s.lifted());
        assert!(verify_certificate(&cert, &c, &c).unwrap());
        assert!(max_membership(&c, &c, &cert.witness).unwrap().member);
    }

    #[test]
    fn triangle_is_rejected() {
        let err = entangle_3d(&Polygon::triangle(), &Polygon::square()).unwrap_err();
        assert!(matches!(err, Error::Classical { ref which, .. } if which == "first"));
    }
}
