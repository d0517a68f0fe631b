//! Cone representations, duality, membership and classicality.

pub mod dd;
pub mod hermitian;
pub mod json;
pub mod polygon;
pub mod polyhedral;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::lp::conic_combination;
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{dot, to_f64, vec_to_f64, QVec, Rational};

pub use polygon::Polygon;
pub use polyhedral::{Facet, PolyhedralCone};

/// Radius of a Lorentz cone `L_n(r) = {(x, t) : ‖x‖₂ ≤ r·t}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Radius {
    Exact(Rational),
    Float(f64),
}

impl Radius {
    pub fn to_f64(&self) -> f64 {
        match self {
            Radius::Exact(r) => to_f64(r),
            Radius::Float(r) => *r,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cone {
    Polyhedral(PolyhedralCone),
    Lorentz { n: usize, r: Radius },
    /// Complex `n×n` positive semidefinite matrices in Hermitian coordinates.
    Psd { n: usize },
    /// The orthant `R₊ⁿ`.
    Classical { n: usize },
    ConeOverPolygon(Polygon),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Nonnegative coefficients over the extreme rays.
    Decomposition(QVec),
    /// A functional nonnegative on the cone and negative at the point.
    Separator(QVec),
    /// `r²t² − ‖x‖²` for exact Lorentz tests.
    ExactSlack(Rational),
    /// Smallest eigenvalue, or `r·t − ‖x‖` for float Lorentz tests.
    FloatSlack(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub verdict: Verdict,
    pub witness: Witness,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        self.verdict != Verdict::Outside
    }
}

/// Result of a classicality test.
#[derive(Clone, Debug, PartialEq)]
pub enum Classicality {
    /// The cone is generated by this basis.
    Classical(Vec<QVec>),
    /// Extreme ray count exceeds the dimension, or the cone is not polyhedral.
    NonClassical(String),
}

impl Cone {
    pub fn lorentz(n: usize, r: Rational) -> Result<Cone> {
        if !r.is_positive() {
            return Err(Error::InvalidCone("Lorentz radius must be positive".into()));
        }
        if n == 0 {
            return Err(Error::InvalidCone("Lorentz cone needs n >= 1".into()));
        }
        Ok(Cone::Lorentz { n, r: Radius::Exact(r) })
    }

    pub fn lorentz_float(n: usize, r: f64) -> Result<Cone> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidCone("Lorentz radius must be positive".into()));
        }
        if n == 0 {
            return Err(Error::InvalidCone("Lorentz cone needs n >= 1".into()));
        }
        Ok(Cone::Lorentz { n, r: Radius::Float(r) })
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Cone::Polyhedral(p) => p.dim(),
            Cone::Lorentz { n, .. } => n + 1,
            Cone::Psd { n } => n * n,
            Cone::Classical { n } => *n,
            Cone::ConeOverPolygon(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Cone::Polyhedral(_) => "polyhedral",
            Cone::Lorentz { .. } => "lorentz",
            Cone::Psd { .. } => "psd",
            Cone::Classical { .. } => "classical",
            Cone::ConeOverPolygon(_) => "polygon",
        }
    }

    /// Generator form of a polyhedral variant.
    pub fn to_polyhedral(&self) -> Result<PolyhedralCone> {
        match self {
            Cone::Polyhedral(p) => Ok(p.clone()),
            Cone::Classical { n } => Ok(PolyhedralCone::orthant(*n)),
            Cone::ConeOverPolygon(poly) => Ok(PolyhedralCone::from_trusted(3, poly.lifted())),
            _ => Err(Error::Unsupported(format!("{} cone is not polyhedral", self.kind()))),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self, Cone::Polyhedral(_) | Cone::Classical { .. } | Cone::ConeOverPolygon(_))
    }

    pub fn membership(&self, x: &[Rational], tol: f64) -> Result<Membership> {
        if x.len() != self.ambient_dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} for a cone in dimension {}",
                x.len(),
                self.ambient_dim()
            )));
        }
        match self {
            Cone::Lorentz { n, r } => Ok(lorentz_membership(&x[..*n], &x[*n], r, tol)),
            Cone::Psd { n } => {
                let min = hermitian::min_eigenvalue(&vec_to_f64(x), *n, tol)?;
                let norm = vec_to_f64(x).iter().map(|v| v * v).sum::<f64>().sqrt();
                let verdict = classify_slack(min, tol * (1.0 + norm));
                Ok(Membership { verdict, witness: Witness::FloatSlack(min) })
            }
            _ => polyhedral_membership(&self.to_polyhedral()?, x),
        }
    }

    /// Exact closed membership. Float-radius Lorentz cones are not supported.
    pub fn contains_exact(&self, x: &[Rational]) -> Result<bool> {
        if x.len() != self.ambient_dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} for a cone in dimension {}",
                x.len(),
                self.ambient_dim()
            )));
        }
        match self {
            Cone::Lorentz { r: Radius::Float(_), .. } => Err(Error::Unsupported("exact test on a float-radius Lorentz cone".into())),
            Cone::Lorentz { n, r } => Ok(lorentz_membership(&x[..*n], &x[*n], r, 0.0).is_member()),
            Cone::Psd { n } => Ok(hermitian::is_psd_exact(&hermitian::from_coords(x, *n)?)),
            Cone::Classical { .. } => Ok(x.iter().all(|v| !v.is_negative())),
            Cone::ConeOverPolygon(p) => {
                let t = &x[2];
                if t.is_negative() {
                    return Ok(false);
                }
                if t.is_zero() {
                    return Ok(x[0].is_zero() && x[1].is_zero());
                }
                Ok(p.contains(&[&x[0] / t, &x[1] / t]))
            }
            Cone::Polyhedral(p) => p.contains(x),
        }
    }

    pub fn dual_cone(&self) -> Result<Cone> {
        match self {
            Cone::Classical { n } => Ok(Cone::Classical { n: *n }),
            Cone::Psd { n } => Ok(Cone::Psd { n: *n }),
            Cone::Lorentz { n, r } => {
                // L_n(r)* = L_n(1/r).
                let r = match r {
                    Radius::Exact(r) => Radius::Exact(Rational::one() / r),
                    Radius::Float(r) => Radius::Float(1.0 / r),
                };
                Ok(Cone::Lorentz { n: *n, r })
            }
            _ => Ok(Cone::Polyhedral(self.to_polyhedral()?.dual()?)),
        }
    }

    pub fn classicality(&self) -> Result<Classicality> {
        match self {
            Cone::Classical { n } => Ok(Classicality::Classical(PolyhedralCone::orthant(*n).generators().to_vec())),
            Cone::Lorentz { n, .. } if *n >= 2 => Ok(Classicality::NonClassical("round cone has infinitely many extreme rays".into())),
            Cone::Lorentz { r, .. } => {
                let r = match r {
                    Radius::Exact(r) => r.clone(),
                    Radius::Float(r) => crate::exactnum::rational::from_f64_approx(*r, 1 << 20),
                };
                Ok(Classicality::Classical(vec![vec![r.clone(), Rational::one()], vec![-r, Rational::one()]]))
            }
            Cone::Psd { n } if *n >= 2 => Ok(Classicality::NonClassical("PSD cone has infinitely many extreme rays".into())),
            Cone::Psd { .. } => Ok(Classicality::Classical(vec![vec![Rational::one()]])),
            _ => {
                let p = self.to_polyhedral()?;
                let rays = p.extreme_rays()?;
                if rays.len() == p.dim() {
                    Ok(Classicality::Classical(rays.to_vec()))
                } else {
                    Ok(Classicality::NonClassical(format!("{} extreme rays in dimension {}", rays.len(), p.dim())))
                }
            }
        }
    }

    pub fn is_classical(&self) -> Result<bool> {
        Ok(matches!(self.classicality()?, Classicality::Classical(_)))
    }

    pub fn extreme_rays(&self) -> Result<Vec<QVec>> {
        Ok(self.to_polyhedral()?.extreme_rays()?.to_vec())
    }

    pub fn facets(&self) -> Result<Vec<Facet>> {
        Ok(self.to_polyhedral()?.facets()?.to_vec())
    }

    /// Image under an invertible linear map. Lifted affine maps
    /// `[[L, t], [0, 0, 1]]` keep a cone over a polygon in that form.
    pub fn apply_linear(&self, m: &QMat) -> Result<Cone> {
        let d = self.ambient_dim();
        if m.shape() != (d, d) {
            return Err(Error::Dimension(format!("{}x{} map on a cone in dimension {d}", m.rows(), m.cols())));
        }
        if m.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        match self {
            Cone::ConeOverPolygon(poly) if m[(2, 0)].is_zero() && m[(2, 1)].is_zero() && m[(2, 2)].is_positive() => {
                let s = &m[(2, 2)];
                let linear = QMat::from_rows(vec![
                    vec![&m[(0, 0)] / s, &m[(0, 1)] / s],
                    vec![&m[(1, 0)] / s, &m[(1, 1)] / s],
                ])?;
                Ok(Cone::ConeOverPolygon(poly.map_affine(&linear, &[&m[(0, 2)] / s, &m[(1, 2)] / s])?))
            }
            Cone::Lorentz { .. } | Cone::Psd { .. } => {
                if *m == QMat::identity(d) {
                    Ok(self.clone())
                } else {
                    Err(Error::Unsupported("linear images of non-polyhedral cones".into()))
                }
            }
            _ => Ok(Cone::Polyhedral(self.to_polyhedral()?.map_linear(m)?)),
        }
    }
}

fn classify_slack(slack: f64, tol: f64) -> Verdict {
    if slack > tol {
        Verdict::Inside
    } else if slack >= -tol {
        Verdict::Boundary
    } else {
        Verdict::Outside
    }
}

fn lorentz_membership(x: &[Rational], t: &Rational, r: &Radius, tol: f64) -> Membership {
    match r {
        Radius::Exact(r) => {
            let norm_sq: Rational = x.iter().map(|v| v * v).sum();
            let slack = r * r * t * t - &norm_sq;
            let verdict = if t.is_negative() || slack.is_negative() {
                Verdict::Outside
            } else if slack.is_zero() {
                Verdict::Boundary
            } else {
                Verdict::Inside
            };
            Membership { verdict, witness: Witness::ExactSlack(slack) }
        }
        Radius::Float(r) => {
            let xf = vec_to_f64(x);
            let norm = xf.iter().map(|v| v * v).sum::<f64>().sqrt();
            let tf = to_f64(t);
            let slack = r * tf - norm;
            let scale = (norm * norm + tf * tf).sqrt();
            Membership { verdict: classify_slack(slack, tol * (1.0 + scale)), witness: Witness::FloatSlack(slack) }
        }
    }
}

/// Exact membership with a decomposition over extreme rays or a separator.
pub fn polyhedral_membership(c: &PolyhedralCone, x: &[Rational]) -> Result<Membership> {
    let rays = c.extreme_rays()?;
    match conic_combination(rays, x)? {
        Ok(coeffs) => {
            let on_boundary = c.facets()?.iter().any(|f| dot(&f.functional, x).is_zero());
            let verdict = if on_boundary { Verdict::Boundary } else { Verdict::Inside };
            Ok(Membership { verdict, witness: Witness::Decomposition(coeffs) })
        }
        Err(sep) => Ok(Membership { verdict: Verdict::Outside, witness: Witness::Separator(sep) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, qvec};

    fn square_cone() -> Cone {
        Cone::ConeOverPolygon(Polygon::square())
    }

    fn diamond_cone() -> Cone {
        Cone::ConeOverPolygon(Polygon::diamond())
    }

    fn sorted(mut v: Vec<QVec>) -> Vec<QVec> {
        v.sort();
        v
    }

    #[test]
    fn orthant_membership_decomposes() {
        let m = Cone::Classical { n: 3 }.membership(&qvec(&[1, 2, 3]), 1e-9).unwrap();
        assert_eq!(m.verdict, Verdict::Inside);
        assert_eq!(m.witness, Witness::Decomposition(qvec(&[1, 2, 3])));
    }

    #[test]
    fn lorentz_boundary_and_outside() {
        let c = Cone::lorentz(2, int(1)).unwrap();
        assert_eq!(c.membership(&qvec(&[3, 4, 5]), 1e-9).unwrap().verdict, Verdict::Boundary);
        assert_eq!(c.membership(&qvec(&[3, 4, 4]), 1e-9).unwrap().verdict, Verdict::Outside);
        assert_eq!(c.membership(&qvec(&[0, 0, -1]), 1e-9).unwrap().verdict, Verdict::Outside);
        let f = Cone::lorentz_float(2, 1.0).unwrap();
        assert_eq!(f.membership(&qvec(&[3, 4, 5]), 1e-9).unwrap().verdict, Verdict::Boundary);
    }

    #[test]
    fn psd_outside() {
        // [[1,2],[2,1]] in Hermitian coordinates (diag, Re, Im).
        let m = Cone::Psd { n: 2 }.membership(&qvec(&[1, 1, 2, 0]), 1e-9).unwrap();
        assert_eq!(m.verdict, Verdict::Outside);
    }

    #[test]
    fn square_and_diamond_are_dual() {
        let d = diamond_cone().dual_cone().unwrap();
        assert_eq!(sorted(d.extreme_rays().unwrap()), sorted(Polygon::square().lifted()));
        let s = square_cone().dual_cone().unwrap();
        assert_eq!(sorted(s.extreme_rays().unwrap()), sorted(Polygon::diamond().lifted()));
        for g in Polygon::square().lifted() {
            for f in Polygon::diamond().lifted() {
                assert!(!dot(&f, &g).is_negative());
            }
        }
    }

    #[test]
    fn classicality() {
        assert!(Cone::Classical { n: 4 }.is_classical().unwrap());
        assert!(!square_cone().is_classical().unwrap());
        assert!(Cone::ConeOverPolygon(Polygon::triangle()).is_classical().unwrap());
        assert!(!Cone::lorentz(2, int(1)).unwrap().is_classical().unwrap());
        assert!(!Cone::Psd { n: 2 }.is_classical().unwrap());
    }

    #[test]
    fn facet_counts() {
        assert_eq!(Cone::Classical { n: 3 }.facets().unwrap().len(), 3);
        assert_eq!(Cone::ConeOverPolygon(Polygon::triangle()).facets().unwrap().len(), 3);
        let pentagon = Polygon::from_points(&[qvec(&[2, 0]), qvec(&[0, 2]), qvec(&[-2, 0]), qvec(&[0, -2]), vec![int(3) / int(2), int(3) / int(2)]]).unwrap();
        assert_eq!(Cone::ConeOverPolygon(pentagon).extreme_rays().unwrap().len(), 5);
    }

    #[test]
    fn outside_has_violated_facet() {
        let c = square_cone();
        let x = qvec(&[2, 0, 1]);
        let m = c.membership(&x, 1e-9).unwrap();
        assert_eq!(m.verdict, Verdict::Outside);
        assert!(c.facets().unwrap().iter().any(|f| dot(&f.functional, &x).is_negative()));
        let Witness::Separator(s) = m.witness else { panic!("expected separator") };
        assert!(dot(&s, &x).is_negative());
    }

    #[test]
    fn exact_containment_agrees_with_membership() {
        let cones = [square_cone(), Cone::Classical { n: 3 }, Cone::lorentz(2, int(1)).unwrap()];
        let points = [qvec(&[1, 1, 1]), qvec(&[2, 0, 1]), qvec(&[0, 0, 0]), qvec(&[1, 0, -1]), qvec(&[3, 4, 5])];
        for c in &cones {
            for x in &points {
                assert_eq!(c.contains_exact(x).unwrap(), c.membership(x, 0.0).unwrap().is_member(), "{c:?} {x:?}");
            }
        }
        assert!(Cone::Psd { n: 2 }.contains_exact(&qvec(&[1, 1, 0, 1])).unwrap());
        assert!(!Cone::Psd { n: 2 }.contains_exact(&qvec(&[1, 1, 2, 0])).unwrap());
    }

    #[test]
    fn lifted_affine_map_keeps_polygon_form() {
        let m = QMat::from_ints(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]);
        let image = square_cone().apply_linear(&m).unwrap();
        let Cone::ConeOverPolygon(p) = image else { panic!("expected polygon") };
        assert!(p.contains(&qvec(&[2, 1])));
        assert!(square_cone().apply_linear(&QMat::zeros(3, 3)).is_err());
    }
}
