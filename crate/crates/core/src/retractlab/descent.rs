use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use super::{compose_retracts, dualize_retract, facet_retract, FacetRetract, RetractPair};
use crate::cones::polyhedral::unit;
use crate::cones::{Cone, Polygon, PolyhedralCone};
use crate::dim3lab::entangle_3d;
use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{serde_rational, QVec, Rational};
use crate::tensorcone::{ChainStep, SeparationCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    /// Retract onto a facet of the current cone.
    FacetRetract,
    /// Retract of the dual onto one of its facets, read back on the primal side.
    DualFacetRetract,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentStep {
    pub kind: StepKind,
    pub dim_before: usize,
    pub facet_index: usize,
    pub dropped_coordinate: usize,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_rational::vec")]
    pub interior_point: QVec,
}

impl DescentStep {
    fn new(kind: StepKind, dim_before: usize, fr: &FacetRetract) -> Self {
        DescentStep {
            kind,
            dim_before,
            facet_index: fr.facet_index,
            dropped_coordinate: fr.dropped_coordinate,
            lambda: fr.lambda.clone(),
            interior_point: fr.interior_point.clone(),
        }
    }
}

/// A chain of facet retracts from a cone down to a non-classical 3-D cone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentTrace {
    pub steps: Vec<DescentStep>,
    /// Composite retract from the input cone to the final cone.
    pub retract: RetractPair,
}

impl DescentTrace {
    pub fn final_cone(&self) -> Result<PolyhedralCone> {
        self.retract.target_polyhedral()
    }
}

fn first_nonsimplicial_facet(c: &PolyhedralCone) -> Result<Option<usize>> {
    let d = c.dim();
    Ok(c.facets()?.iter().position(|f| f.rays.len() > d - 1))
}

/// Retracts a non-classical polyhedral cone onto a non-classical cone of
/// dimension 3.
///
/// A facet with more than `d − 1` extreme rays spans a non-classical cone, so
/// such a facet of the cone is used when one exists. Otherwise every facet is
/// simplicial, and unless the cone itself is simplicial some extreme ray lies
/// on more than `d − 1` facets, giving a non-simplicial facet of the dual. The
/// dual's facet retract is then transposed into a retract of the cone onto the
/// dual of that facet cone.
pub fn descend_to_3d(c: &PolyhedralCone) -> Result<DescentTrace> {
    if c.is_classical()? {
        return Err(Error::Classical { which: "input".into(), basis: c.extreme_rays()?.to_vec() });
    }
    let mut steps = Vec::new();
    let mut total = RetractPair::identity(c.clone());
    let mut current = c.clone();
    while current.dim() > 3 {
        let dim_before = current.dim();
        let step = if let Some(i) = first_nonsimplicial_facet(&current)? {
            let fr = facet_retract(&current, i)?;
            steps.push(DescentStep::new(StepKind::FacetRetract, dim_before, &fr));
            fr.retract
        } else {
            let dual = current.dual()?;
            let i = first_nonsimplicial_facet(&dual)?
                .ok_or_else(|| Error::Internal("no non-simplicial facet on either side".into()))?;
            let fr = facet_retract(&dual, i)?;
            steps.push(DescentStep::new(StepKind::DualFacetRetract, dim_before, &fr));
            let mut r = dualize_retract(&fr.retract)?;
            // The bidual is the cone itself; keep the caller's generators.
            r.source = Cone::Polyhedral(current.clone());
            r
        };
        total = compose_retracts(&total, &step)?;
        current = total.target_polyhedral()?;
    }
    if current.dim() < 3 {
        return Err(Error::Internal("descent ended below dimension 3".into()));
    }
    Ok(DescentTrace { steps, retract: total })
}

/// A linear isomorphism from a proper 3-D cone onto the cone over a polygon.
///
/// The slice is taken at the sum of the dual extreme rays, which is positive on
/// every nonzero element; two unit coordinates complete it to an invertible
/// map `L`, and the polygon's lifted vertices are the images of the extreme rays
/// rescaled to last coordinate 1.
pub fn section_to_polygon(c: &PolyhedralCone) -> Result<(Polygon, RetractPair)> {
    if c.dim() != 3 {
        return Err(Error::Dimension(format!("section needs a 3-dimensional cone, got {}", c.dim())));
    }
    let phi = c.interior_functional()?;
    let mut chosen = None;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let l = QMat::from_rows(vec![unit(3, i), unit(3, j), phi.clone()])?;
        if !l.determinant()?.is_zero() {
            chosen = Some(l);
            break;
        }
    }
    let l = chosen.ok_or_else(|| Error::Internal("no invertible section map".into()))?;
    let points = c
        .extreme_rays()?
        .iter()
        .map(|g| {
            let w = l.mul_vec(g)?;
            Ok(vec![&w[0] / &w[2], &w[1] / &w[2]])
        })
        .collect::<Result<Vec<QVec>>>()?;
    let polygon = Polygon::from_points(&points)?;
    let target = PolyhedralCone::from_trusted(3, polygon.lifted());
    let inverse = l.inverse()?;
    let r = RetractPair::polyhedral(c.clone(), target, l, inverse)?;
    Ok((polygon, r))
}

/// Transports a certificate for `(C₁′, C₂′)` to `(C₁, C₂)` along retracts
/// `Cᵢ → Cᵢ′`: the witness becomes `Ψ₁ Z Ψ₂ᵀ` and the functional `Φ₁ᵀ F Φ₂`.
/// The pairing is unchanged and the result is re-verified from scratch.
pub fn lift_certificate(
    cert: &SeparationCertificate,
    first: &RetractPair,
    second: &RetractPair,
    extra_chain: Vec<ChainStep>,
) -> Result<SeparationCertificate> {
    let witness = QMat::sandwich(&first.psi, &cert.witness, &second.psi)?;
    let functional = QMat::sandwich(&first.phi.transpose(), &cert.functional, &second.phi.transpose())?;
    let mut chain = cert.chain.clone();
    chain.extend(extra_chain);
    SeparationCertificate::assemble(
        &first.source_polyhedral()?,
        &second.source_polyhedral()?,
        witness,
        functional,
        chain,
    )
}

pub(crate) fn reduce_to_polygon(c: &PolyhedralCone, which: &str) -> Result<(Polygon, RetractPair, DescentTrace)> {
    let trace = descend_to_3d(c).map_err(|e| match e {
        Error::Classical { basis, .. } => Error::Classical { which: which.into(), basis },
        other => other,
    })?;
    let (polygon, section) = section_to_polygon(&trace.final_cone()?)?;
    let total = compose_retracts(&trace.retract, &section)?;
    Ok((polygon, total, trace))
}

/// Exact certificate that `C₁ ⊗_min C₂ ≠ C₁ ⊗_max C₂` for two non-classical
/// polyhedral cones. A classical input yields [`Error::Classical`] naming the
/// offending side.
pub fn certify_entangleable_polyhedral(c1: &PolyhedralCone, c2: &PolyhedralCone) -> Result<SeparationCertificate> {
    let (p1, r1, t1) = reduce_to_polygon(c1, "first")?;
    let (p2, r2, t2) = reduce_to_polygon(c2, "second")?;
    let base = entangle_3d(&p1, &p2)?;
    let chain = vec![
        ChainStep::with("descent", json!({ "cone": 1, "steps": t1.steps, "polygon": p1 })),
        ChainStep::with("descent", json!({ "cone": 2, "steps": t2.steps, "polygon": p2 })),
        ChainStep::with("lift", json!({ "phi1": r1.phi, "psi1": r1.psi, "phi2": r2.phi, "psi2": r2.psi })),
    ];
    lift_certificate(&base, &r1, &r2, chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::qvec;
    use crate::tensorcone::verify_certificate;

    fn cube() -> PolyhedralCone {
        let gens = (0..8)
            .map(|s: i64| qvec(&[1 - 2 * (s & 1), 1 - (s & 2), 1 - ((s & 4) >> 1), 1]))
            .collect();
        PolyhedralCone::new(gens).unwrap()
    }

    fn cross_polytope() -> PolyhedralCone {
        PolyhedralCone::new(vec![
            qvec(&[1, 0, 0, 1]),
            qvec(&[-1, 0, 0, 1]),
            qvec(&[0, 1, 0, 1]),
            qvec(&[0, -1, 0, 1]),
            qvec(&[0, 0, 1, 1]),
            qvec(&[0, 0, -1, 1]),
        ])
        .unwrap()
    }

    #[test]
    fn cube_descends_through_a_facet() {
        let t = descend_to_3d(&cube()).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].kind, StepKind::FacetRetract);
        assert_eq!(t.final_cone().unwrap().extreme_rays().unwrap().len(), 4);
    }

    #[test]
    fn cross_polytope_needs_the_dual() {
        let t = descend_to_3d(&cross_polytope()).unwrap();
        assert_eq!(t.steps[0].kind, StepKind::DualFacetRetract);
        assert!(!t.final_cone().unwrap().is_classical().unwrap());
    }

    #[test]
    fn section_of_square_cone() {
        let c = PolyhedralCone::new(vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1]), qvec(&[1, 1, -1])]).unwrap();
        let (p, r) = section_to_polygon(&c).unwrap();
        assert_eq!(p.len(), 4);
        assert!(super::super::verify_retract(&r).unwrap());
    }

    #[test]
    fn orthant_is_classical() {
        let err = certify_entangleable_polyhedral(&PolyhedralCone::orthant(4), &cube()).unwrap_err();
        assert!(matches!(err, Error::Classical { ref which, .. } if which == "first"));
    }

    #[test]
    fn cube_and_cross_polytope() {
        let (a, b) = (cube(), cross_polytope());
        let cert = certify_entangleable_polyhedral(&a, &b).unwrap();
        assert!(verify_certificate(&cert, &a, &b).unwrap());
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("dual-facet-retract"));
    }
}
