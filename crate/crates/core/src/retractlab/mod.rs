//! Retracts between cones, facet retracts of polyhedral cones, descent to
//! dimension 3, and lifting of separation certificates along retracts.

pub mod descent;

pub use descent::{
    certify_entangleable_polyhedral, descend_to_3d, lift_certificate, section_to_polygon, DescentStep, DescentTrace,
    StepKind,
};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cones::{Cone, PolyhedralCone, Radius};
use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{dot, serde_rational, QVec, Rational};
use crate::samples;

/// Number of exact random generator checks used for non-polyhedral source cones.
pub const DEFAULT_POSITIVITY_SAMPLES: usize = 64;

/// How positivity of the two maps was established.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Positivity {
    /// Every extreme ray of both cones checked exactly.
    Exact,
    /// Exact checks on seeded random generators of a non-polyhedral cone,
    /// backed by the analytic argument named in `argument`.
    Sampled { samples: usize, seed: u64, argument: String },
}

/// Positive maps `Φ: C → C′` and `Ψ: C′ → C` with `Φ·Ψ = Id`.
#[derive(Clone, Debug, PartialEq)]
pub struct RetractPair {
    pub source: Cone,
    pub target: Cone,
    /// `dim C′ × dim C`.
    pub phi: QMat,
    /// `dim C × dim C′`.
    pub psi: QMat,
    pub positivity: Positivity,
}

#[derive(Serialize)]
struct RetractJson<'a> {
    source: serde_json::Value,
    target: serde_json::Value,
    phi: &'a QMat,
    psi: &'a QMat,
    positivity: &'a Positivity,
}

impl Serialize for RetractPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RetractJson {
            source: crate::cones::json::cone_to_value(&self.source),
            target: crate::cones::json::cone_to_value(&self.target),
            phi: &self.phi,
            psi: &self.psi,
            positivity: &self.positivity,
        }
        .serialize(s)
    }
}

impl RetractPair {
    /// Builds and verifies a retract between polyhedral cones.
    pub fn polyhedral(source: PolyhedralCone, target: PolyhedralCone, phi: QMat, psi: QMat) -> Result<Self> {
        let r = RetractPair {
            source: Cone::Polyhedral(source),
            target: Cone::Polyhedral(target),
            phi,
            psi,
            positivity: Positivity::Exact,
        };
        if !verify_retract(&r)? {
            return Err(Error::Verification("retract does not verify".into()));
        }
        Ok(r)
    }

    pub fn identity(c: PolyhedralCone) -> Self {
        let d = c.dim();
        RetractPair {
            source: Cone::Polyhedral(c.clone()),
            target: Cone::Polyhedral(c),
            phi: QMat::identity(d),
            psi: QMat::identity(d),
            positivity: Positivity::Exact,
        }
    }

    pub fn source_polyhedral(&self) -> Result<PolyhedralCone> {
        self.source.to_polyhedral()
    }

    pub fn target_polyhedral(&self) -> Result<PolyhedralCone> {
        self.target.to_polyhedral()
    }
}

/// Generators used to test positivity of a map out of `c`: extreme rays for
/// polyhedral cones, seeded exact samples otherwise.
fn test_generators(c: &Cone, samples: usize, seed: u64) -> Result<Vec<QVec>> {
    if c.is_polyhedral() {
        return c.extreme_rays();
    }
    let mut rng = samples::rng(seed);
    match c {
        Cone::Lorentz { n, r: Radius::Exact(r) } => Ok((0..samples)
            .map(|_| {
                let mut x: QVec = samples::sphere_point(&mut rng, *n).into_iter().map(|v| v * r).collect();
                x.push(Rational::one());
                x
            })
            .collect()),
        Cone::Psd { n } => Ok((0..samples)
            .map(|_| {
                let re = samples::int_vec(&mut rng, *n, 3);
                let im = samples::int_vec(&mut rng, *n, 3);
                projector_coords(&re, &im)
            })
            .collect()),
        _ => Err(Error::Unsupported(format!("positivity checks out of a {} cone", c.kind()))),
    }
}

/// Hermitian coordinates of `v v†` for `v = re + i·im`, exactly.
pub fn projector_coords(re: &[Rational], im: &[Rational]) -> QVec {
    let n = re.len();
    let mut c: QVec = (0..n).map(|i| &re[i] * &re[i] + &im[i] * &im[i]).collect();
    for j in 0..n {
        for k in j + 1..n {
            c.push(&re[j] * &re[k] + &im[j] * &im[k]);
            c.push(&im[j] * &re[k] - &re[j] * &im[k]);
        }
    }
    c
}

/// Exact check of `Φ·Ψ = Id` and of positivity on generators.
///
/// Polyhedral cones are checked on all extreme rays. For Lorentz and PSD
/// cones the generators are seeded exact samples (rational points on the
/// sphere, projectors onto Gaussian-integer vectors); the record in
/// `positivity` names the analytic argument that covers the rest.
pub fn verify_retract(r: &RetractPair) -> Result<bool> {
    let (d, d_prime) = (r.source.ambient_dim(), r.target.ambient_dim());
    if r.phi.shape() != (d_prime, d) || r.psi.shape() != (d, d_prime) {
        return Err(Error::Dimension(format!(
            "retract maps {:?} and {:?} between dimensions {d} and {d_prime}",
            r.phi.shape(),
            r.psi.shape()
        )));
    }
    if r.phi.matmul(&r.psi)? != QMat::identity(d_prime) {
        return Ok(false);
    }
    let (samples, seed) = match &r.positivity {
        Positivity::Exact => (0, 0),
        Positivity::Sampled { samples, seed, .. } => (*samples, *seed),
    };
    if matches!(r.positivity, Positivity::Exact) && !(r.source.is_polyhedral() && r.target.is_polyhedral()) {
        return Ok(false);
    }
    for g in test_generators(&r.source, samples, seed)? {
        if !r.target.contains_exact(&r.phi.mul_vec(&g)?)? {
            return Ok(false);
        }
    }
    for g in test_generators(&r.target, samples, seed.wrapping_add(1))? {
        if !r.source.contains_exact(&r.psi.mul_vec(&g)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `C → C′ → C″` composed: `Φ = Φ₂Φ₁`, `Ψ = Ψ₁Ψ₂`.
pub fn compose_retracts(first: &RetractPair, second: &RetractPair) -> Result<RetractPair> {
    if first.target.ambient_dim() != second.source.ambient_dim() {
        return Err(Error::Dimension("retracts do not chain".into()));
    }
    let positivity = match (&first.positivity, &second.positivity) {
        (Positivity::Exact, Positivity::Exact) => Positivity::Exact,
        (Positivity::Sampled { samples, seed, argument }, _) | (_, Positivity::Sampled { samples, seed, argument }) => {
            Positivity::Sampled { samples: *samples, seed: *seed, argument: argument.clone() }
        }
    };
    let r = RetractPair {
        source: first.source.clone(),
        target: second.target.clone(),
        phi: second.phi.matmul(&first.phi)?,
        psi: first.psi.matmul(&second.psi)?,
        positivity,
    };
    if !verify_retract(&r)? {
        return Err(Error::Verification("composed retract does not verify".into()));
    }
    Ok(r)
}

/// The adjoint pair `(Ψᵀ, Φᵀ)`, a retract of `C*` onto `C′*`.
pub fn dualize_retract(r: &RetractPair) -> Result<RetractPair> {
    let d = RetractPair {
        source: r.source.dual_cone()?,
        target: r.target.dual_cone()?,
        phi: r.psi.transpose(),
        psi: r.phi.transpose(),
        positivity: r.positivity.clone(),
    };
    if !verify_retract(&d)? {
        return Err(Error::Verification("dual retract does not verify".into()));
    }
    Ok(d)
}

/// Data of one facet retract.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacetRetract {
    pub facet_index: usize,
    #[serde(with = "serde_rational::vec")]
    pub functional: QVec,
    /// The coordinate dropped when identifying `ker f` with `R^{d−1}`.
    pub dropped_coordinate: usize,
    /// Sum of the facet's extreme rays.
    #[serde(with = "serde_rational::vec")]
    pub interior_point: QVec,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub retract: RetractPair,
}

/// Retract of a polyhedral cone onto one of its facets.
///
/// With `f` the facet functional, `k` the first coordinate where `f` is
/// nonzero, `π(z) = z − (f(z)/f_k)e_k` and `x` the sum of the facet's extreme
/// rays, the map `z ↦ π(z) + λf(z)x` sends the cone into the facet once `λ` is
/// large enough. For a generator `z` off the facet, `π(z) + λf(z)x` lies in the
/// facet iff `x + t·π(z)` does for `t = 1/(λf(z))`, and the largest admissible
/// `t` is a ratio test over the other facets.
pub fn facet_retract(c: &PolyhedralCone, facet_index: usize) -> Result<FacetRetract> {
    let facets = c.facets()?;
    let facet = facets
        .get(facet_index)
        .ok_or_else(|| Error::InvalidInput(format!("facet index {facet_index} out of range ({} facets)", facets.len())))?;
    let rays = c.extreme_rays()?;
    let d = c.dim();
    let f = &facet.functional;
    let k = f.iter().position(|v| !v.is_zero()).ok_or_else(|| Error::Internal("zero facet functional".into()))?;
    let fk = f[k].clone();
    let mut x = vec![Rational::zero(); d];
    for &i in &facet.rays {
        for (a, b) in x.iter_mut().zip(&rays[i]) {
            *a += b;
        }
    }
    let project = |z: &[Rational]| -> QVec {
        let mut p = z.to_vec();
        p[k] -= dot(f, z) / &fk;
        p
    };
    let mut lambda0 = Rational::zero();
    for z in rays {
        let fz = dot(f, z);
        if fz.is_zero() {
            continue;
        }
        let p = project(z);
        let mut t_max: Option<Rational> = None;
        for (j, h) in facets.iter().enumerate() {
            if j == facet_index {
                continue;
            }
            let hp = dot(&h.functional, &p);
            if hp.is_negative() {
                let hx = dot(&h.functional, &x);
                if !hx.is_positive() {
                    return Err(Error::Internal("facet interior point touches another facet".into()));
                }
                let t = hx / -hp;
                if t_max.as_ref().is_none_or(|m| t < *m) {
                    t_max = Some(t);
                }
            }
        }
        if let Some(t) = t_max {
            let needed = Rational::one() / (fz * t);
            if needed > lambda0 {
                lambda0 = needed;
            }
        }
    }
    let lambda = lambda0 + Rational::one();

    // Φ = D·(π + λ x fᵀ), where D drops coordinate k.
    let mut full = QMat::identity(d);
    for j in 0..d {
        full[(k, j)] -= &f[j] / &fk;
        for i in 0..d {
            full[(i, j)] += &lambda * &x[i] * &f[j];
        }
    }
    let keep: Vec<usize> = (0..d).filter(|&i| i != k).collect();
    let phi = QMat::from_rows(keep.iter().map(|&i| full.row(i).to_vec()).collect())?;
    // Ψ inserts coordinate k so that f vanishes.
    let mut psi = QMat::zeros(d, d - 1);
    for (col, &i) in keep.iter().enumerate() {
        psi[(i, col)] = Rational::one();
        psi[(k, col)] = -(&f[i] / &fk);
    }
    let target_gens: Vec<QVec> = facet.rays.iter().map(|&i| keep.iter().map(|&j| rays[i][j].clone()).collect()).collect();
    let target = PolyhedralCone::from_trusted(d - 1, target_gens);
    let retract = RetractPair::polyhedral(c.clone(), target, phi, psi)?;
    Ok(FacetRetract { facet_index, functional: f.clone(), dropped_coordinate: k, interior_point: x, lambda, retract })
}
