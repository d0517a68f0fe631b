//! Generalised probabilistic theories with centrally symmetric state spaces,
//! the norms they induce, injective and projective tensor norms, and
//! entanglement robustness.

mod robustness;

pub use robustness::{
    entanglement_robustness, is_local_map, measure_and_prepare, omega_state, point_reflection, random_local_map,
    robustness_lower_bound, Robustness,
};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cones::{Cone, Polygon, PolyhedralCone, Radius};
use crate::error::{Error, Result};
use crate::exactnum::lp::{lp_solve, LpProblem};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{dot, format_rational, serde_rational, to_f64, QVec, Rational};
use crate::exactnum::spectral::{operator_norm, trace_norm, DEFAULT_TOL};

/// Lower bound on the worst-case ratio between the injective-norm and
/// projective-norm descriptions of XOR games, quoted from the literature on
/// XOR games. Reported alongside results; never used in a computation.
pub const XOR_RATIO_LOWER_BOUND: (i64, i64) = (19, 18);

/// A norm value: exact for polytope balls, floating point for Euclidean ones.
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Exact(Rational),
    Float(f64),
}

impl NormValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(r) => to_f64(r),
            NormValue::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            NormValue::Exact(r) => Some(r),
            NormValue::Float(_) => None,
        }
    }
}

impl Serialize for NormValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Exact(r) => s.serialize_str(&format_rational(r)),
            NormValue::Float(x) => s.serialize_f64(*x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Ball {
    Polytope {
        #[serde(with = "serde_rational::vecvec")]
        vertices: Vec<QVec>,
    },
    Euclidean {
        dim: usize,
    },
}

/// A finite-dimensional normed space described by its unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub ball: Ball,
}

impl NormedSpace {
    /// A centrally symmetric, full-dimensional polytope ball given by points
    /// whose convex hull is the ball. Non-extreme points are dropped.
    pub fn polytope(points: Vec<QVec>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::InvalidInput("empty ball".into()))?;
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::Dimension("ball points must share a positive dimension".into()));
        }
        let lifted: Vec<QVec> = points
            .iter()
            .map(|p| {
                let mut q = p.clone();
                q.push(Rational::one());
                q
            })
            .collect();
        let cone = PolyhedralCone::with_dim(dim + 1, lifted)?;
        let mut vertices: Vec<QVec> = cone
            .extreme_rays()?
            .iter()
            .map(|r| {
                let t = &r[dim];
                r[..dim].iter().map(|x| x / t).collect()
            })
            .collect();
        vertices.sort();
        for v in &vertices {
            let neg: QVec = v.iter().map(|x| -x).collect();
            if vertices.binary_search(&neg).is_err() {
                return Err(Error::InvalidInput("unit ball is not centrally symmetric".into()));
            }
        }
        if QMat::from_rows(vertices.clone())?.rank() != dim {
            return Err(Error::InvalidInput("unit ball is not full-dimensional".into()));
        }
        Ok(NormedSpace { ball: Ball::Polytope { vertices } })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("Euclidean space needs dim >= 1".into()));
        }
        Ok(NormedSpace { ball: Ball::Euclidean { dim } })
    }

    /// Parses `{"ball": {...}}` and re-runs the checks of the constructors.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: NormedSpace = serde_json::from_str(text).map_err(|e| Error::Parse(format!("normed space: {e}")))?;
        match raw.ball {
            Ball::Polytope { vertices } => NormedSpace::polytope(vertices),
            Ball::Euclidean { dim } => NormedSpace::euclidean(dim),
        }
    }

    fn from_polygon(p: Polygon) -> Self {
        NormedSpace::polytope(p.vertices().to_vec()).expect("symmetric built-in polygon")
    }

    /// `ℓ∞` ball `[−1,1]²`.
    pub fn square() -> Self {
        Self::from_polygon(Polygon::square())
    }

    /// `ℓ₁` ball.
    pub fn diamond() -> Self {
        Self::from_polygon(Polygon::diamond())
    }

    pub fn hexagon() -> Self {
        Self::from_polygon(Polygon::hexagon())
    }

    pub fn dim(&self) -> usize {
        match &self.ball {
            Ball::Polytope { vertices } => vertices[0].len(),
            Ball::Euclidean { dim } => *dim,
        }
    }

    pub fn vertices(&self) -> Option<&[QVec]> {
        match &self.ball {
            Ball::Polytope { vertices } => Some(vertices),
            Ball::Euclidean { .. } => None,
        }
    }

    /// Vertices of the polar ball `{f : f·v ≤ 1 for all v ∈ B}`.
    pub fn dual_vertices(&self) -> Result<Vec<QVec>> {
        let vertices = self.vertices().ok_or_else(|| Error::Unsupported("dual vertices of a Euclidean ball".into()))?;
        let dim = self.dim();
        let lifted = vertices
            .iter()
            .map(|v| {
                let mut q = v.clone();
                q.push(Rational::one());
                q
            })
            .collect();
        let cone = PolyhedralCone::from_trusted(dim + 1, lifted);
        // A facet (a, b) with a·v + b ≥ 0 and b > 0 gives the polar vertex −a/b.
        let mut out: Vec<QVec> = cone
            .facets()?
            .iter()
            .map(|f| {
                let b = &f.functional[dim];
                f.functional[..dim].iter().map(|a| -(a / b)).collect()
            })
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn dual(&self) -> Result<NormedSpace> {
        match &self.ball {
            Ball::Polytope { .. } => NormedSpace::polytope(self.dual_vertices()?),
            Ball::Euclidean { dim } => NormedSpace::euclidean(*dim),
        }
    }

    /// The norm with this unit ball: a gauge LP over the vertices for
    /// polytopes, `‖x‖₂` for the Euclidean ball.
    pub fn norm(&self, x: &[Rational]) -> Result<NormValue> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!("vector of length {} in a space of dimension {}", x.len(), self.dim())));
        }
        match &self.ball {
            Ball::Euclidean { .. } => Ok(NormValue::Float(x.iter().map(|v| to_f64(v).powi(2)).sum::<f64>().sqrt())),
            Ball::Polytope { vertices } => {
                // min Σλ s.t. Σλᵢvᵢ = x, λ ≥ 0.
                let a = QMat::from_cols(vertices)?;
                let n = vertices.len();
                let lp = LpProblem::new(vec![Rational::one(); n], a, x.to_vec(), vec![true; n])?;
                let out = lp_solve(&lp)?;
                let optimal = out.is_optimal();
                out.objective_value
                    .filter(|_| optimal)
                    .map(NormValue::Exact)
                    .ok_or_else(|| Error::Internal("gauge LP did not reach an optimum".into()))
            }
        }
    }

    /// Norm of the functional `f` in the dual space: `max f·v` over the ball.
    pub fn dual_norm(&self, f: &[Rational]) -> Result<NormValue> {
        match &self.ball {
            Ball::Euclidean { .. } => self.norm(f),
            Ball::Polytope { vertices } => {
                let best = vertices.iter().map(|v| dot(f, v)).max().expect("nonempty ball");
                Ok(NormValue::Exact(best))
            }
        }
    }
}

/// A cone with a strictly positive order unit.
#[derive(Clone, Debug, PartialEq)]
pub struct Gpt {
    pub cone: Cone,
    pub unit: QVec,
}

impl Gpt {
    pub fn new(cone: Cone, unit: QVec) -> Result<Self> {
        if unit.len() != cone.ambient_dim() {
            return Err(Error::Dimension("order unit has the wrong length".into()));
        }
        let strictly_positive = match &cone {
            Cone::Lorentz { n, r } => {
                // Interior of L_n(r)* = L_n(1/r): ‖u_space‖ < u_apex / r.
                let norm_sq: Rational = unit[..*n].iter().map(|v| v * v).sum();
                let apex = &unit[*n];
                apex.is_positive()
                    && match r {
                        Radius::Exact(r) => norm_sq * r * r < apex * apex,
                        Radius::Float(r) => to_f64(&norm_sq).sqrt() * r < to_f64(apex),
                    }
            }
            Cone::Psd { .. } => {
                return Err(Error::Unsupported("PSD state spaces are not modelled here".into()));
            }
            _ => cone.extreme_rays()?.iter().all(|g| dot(&unit, g).is_positive()),
        };
        if !strictly_positive {
            return Err(Error::InvalidInput("order unit is not strictly positive on the cone".into()));
        }
        Ok(Gpt { cone, unit })
    }

    pub fn dim(&self) -> usize {
        self.cone.ambient_dim()
    }
}

/// A GPT whose state space is centrally symmetric about `centre`. The space
/// `X = ker u` has coordinates through `kernel_basis`, and its unit ball is
/// the state space translated by `−centre`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricGpt {
    pub gpt: Gpt,
    pub centre: QVec,
    /// `dim V × dim X`, columns spanning `ker u`.
    pub kernel_basis: QMat,
    pub space: NormedSpace,
}

fn last_unit(dim: usize) -> QVec {
    let mut e = vec![Rational::zero(); dim];
    e[dim - 1] = Rational::one();
    e
}

impl SymmetricGpt {
    /// `V = X ⊕ R` with cone `{(x, t) : x ∈ t·B}`, unit and centre both the
    /// last coordinate.
    pub fn from_space(space: NormedSpace) -> Result<Self> {
        let d = space.dim();
        let cone = match &space.ball {
            Ball::Polytope { vertices } => {
                let lifted = vertices
                    .iter()
                    .map(|v| {
                        let mut q = v.clone();
                        q.push(Rational::one());
                        q
                    })
                    .collect();
                Cone::Polyhedral(PolyhedralCone::from_trusted(d + 1, lifted))
            }
            Ball::Euclidean { .. } => Cone::lorentz(d, Rational::one())?,
        };
        let e = last_unit(d + 1);
        let mut basis = QMat::zeros(d + 1, d);
        for i in 0..d {
            basis[(i, i)] = Rational::one();
        }
        Ok(SymmetricGpt { gpt: Gpt::new(cone, e.clone())?, centre: e, kernel_basis: basis, space })
    }

    /// A polyhedral GPT with a proposed centre; checks `u(γ) = 1` and that
    /// `2γ − ω` is a state for every extreme state `ω`.
    pub fn new(gpt: Gpt, centre: QVec) -> Result<Self> {
        let dim = gpt.dim();
        if centre.len() != dim {
            return Err(Error::Dimension("centre has the wrong length".into()));
        }
        if dot(&gpt.unit, &centre) != Rational::one() {
            return Err(Error::InvalidInput("centre is not normalised".into()));
        }
        let cone = gpt.cone.to_polyhedral()?;
        let states: Vec<QVec> = cone
            .extreme_rays()?
            .iter()
            .map(|g| {
                let s = dot(&gpt.unit, g);
                g.iter().map(|x| x / &s).collect()
            })
            .collect();
        for w in &states {
            let mirrored: QVec = centre.iter().zip(w).map(|(c, x)| c + c - x).collect();
            if !cone.contains(&mirrored)? {
                return Err(Error::InvalidInput("state space is not symmetric about the centre".into()));
            }
        }
        let unit_row = QMat::from_rows(vec![gpt.unit.clone()])?;
        let kernel = unit_row.nullspace();
        let kernel_basis = QMat::from_cols(&kernel)?;
        let mut s = SymmetricGpt { gpt, centre, kernel_basis, space: NormedSpace::euclidean(1)? };
        let ball: Vec<QVec> = states
            .iter()
            .map(|w| {
                let shifted: QVec = w.iter().zip(&s.centre).map(|(x, c)| x - c).collect();
                s.coordinates(&shifted)
            })
            .collect::<Result<_>>()?;
        s.space = NormedSpace::polytope(ball)?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.gpt.dim()
    }

    /// `Π(v) = v − u(v)γ`.
    pub fn project(&self, v: &[Rational]) -> QVec {
        let uv = dot(&self.gpt.unit, v);
        v.iter().zip(&self.centre).map(|(x, c)| x - &uv * c).collect()
    }

    /// Coordinates in `X` of a vector of `ker u`.
    pub fn coordinates(&self, x: &[Rational]) -> Result<QVec> {
        if !dot(&self.gpt.unit, x).is_zero() {
            return Err(Error::InvalidInput("vector is not in the kernel of the order unit".into()));
        }
        self.kernel_basis.solve(x).ok_or_else(|| Error::Internal("kernel coordinates failed".into()))
    }

    pub fn embed(&self, coords: &[Rational]) -> Result<QVec> {
        self.kernel_basis.mul_vec(coords)
    }

    /// Tensor of `X₁⊗X₂` coordinates for an element of `ker u₁ ⊗ ker u₂`.
    pub fn tensor_coordinates(first: &SymmetricGpt, second: &SymmetricGpt, z: &QMat) -> Result<QMat> {
        let left = pseudo_left_inverse(&first.kernel_basis)?;
        let right = pseudo_left_inverse(&second.kernel_basis)?;
        QMat::sandwich(&left, z, &right)
    }
}

/// `(KᵀK)⁻¹Kᵀ` for a full-column-rank `K`.
fn pseudo_left_inverse(k: &QMat) -> Result<QMat> {
    let kt = k.transpose();
    kt.matmul(k)?.inverse()?.matmul(&kt)
}

/// `inf{t > 0 : γ + x/t ∈ C}` for `x ∈ ker u`.
pub fn gauge_norm(s: &SymmetricGpt, x: &[Rational]) -> Result<NormValue> {
    if x.len() != s.dim() {
        return Err(Error::Dimension("vector has the wrong length".into()));
    }
    s.space.norm(&s.coordinates(x)?)
}

/// `(V*, C*, γ)` with centre `u`.
pub fn dual_symmetric_gpt(s: &SymmetricGpt) -> Result<SymmetricGpt> {
    if let Ball::Euclidean { .. } = s.space.ball {
        return SymmetricGpt::from_space(s.space.dual()?);
    }
    let dual = Gpt::new(s.gpt.cone.dual_cone()?, s.centre.clone())?;
    SymmetricGpt::new(dual, s.gpt.unit.clone())
}

fn check_tensor(x: &NormedSpace, y: &NormedSpace, z: &QMat) -> Result<()> {
    if z.shape() != (x.dim(), y.dim()) {
        return Err(Error::Dimension(format!("{:?} tensor for spaces of dimensions {} and {}", z.shape(), x.dim(), y.dim())));
    }
    Ok(())
}

/// `sup{(f⊗g)(z) : f ∈ B_{X*}, g ∈ B_{Y*}}`.
pub fn injective_norm(x: &NormedSpace, y: &NormedSpace, z: &QMat) -> Result<NormValue> {
    check_tensor(x, y, z)?;
    match (&x.ball, &y.ball) {
        (Ball::Euclidean { .. }, Ball::Euclidean { .. }) => Ok(NormValue::Float(operator_norm(&z.to_f64(), DEFAULT_TOL)?)),
        (Ball::Polytope { .. }, Ball::Polytope { .. }) => {
            let (fs, gs) = (x.dual_vertices()?, y.dual_vertices()?);
            let mut best: Option<Rational> = None;
            for f in &fs {
                let fz = z.vec_mul(f)?;
                for g in &gs {
                    let v = dot(&fz, g);
                    if best.as_ref().is_none_or(|b| v > *b) {
                        best = Some(v);
                    }
                }
            }
            Ok(NormValue::Exact(best.expect("nonempty balls")))
        }
        _ => Err(Error::Unsupported("mixed polytope and Euclidean balls".into())),
    }
}

/// Projective norm with its optimal decomposition and dual bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectiveNorm {
    pub value: NormValue,
    /// Nonzero coefficients over vertex products `vᵢ⊗wⱼ` as `(i, j, λ)`.
    #[serde(skip)]
    pub decomposition: Vec<(usize, usize, Rational)>,
    /// `D` with `vᵢᵀ D wⱼ ≤ 1` for all vertex pairs and `⟨D, z⟩ = value`.
    pub dual: Option<QMat>,
}

/// `inf{Σ‖xᵢ‖‖yᵢ‖ : z = Σ xᵢ⊗yᵢ}`: an LP over vertex products for polytope
/// balls, the trace norm for Euclidean ones.
pub fn projective_norm(x: &NormedSpace, y: &NormedSpace, z: &QMat) -> Result<ProjectiveNorm> {
    check_tensor(x, y, z)?;
    match (&x.ball, &y.ball) {
        (Ball::Euclidean { .. }, Ball::Euclidean { .. }) => Ok(ProjectiveNorm {
            value: NormValue::Float(trace_norm(&z.to_f64(), DEFAULT_TOL)?),
            decomposition: Vec::new(),
            dual: None,
        }),
        (Ball::Polytope { vertices: vs }, Ball::Polytope { vertices: ws }) => {
            let mut cols = Vec::with_capacity(vs.len() * ws.len());
            let mut index = Vec::with_capacity(vs.len() * ws.len());
            for (i, v) in vs.iter().enumerate() {
                for (j, w) in ws.iter().enumerate() {
                    cols.push(QMat::outer(v, w).flatten());
                    index.push((i, j));
                }
            }
            let k = cols.len();
            let lp = LpProblem::new(vec![Rational::one(); k], QMat::from_cols(&cols)?, z.flatten(), vec![true; k])?;
            let out = lp_solve(&lp)?;
            if !out.is_optimal() {
                return Err(Error::Internal("projective LP did not reach an optimum".into()));
            }
            let primal = out.primal.expect("optimal");
            let decomposition = primal
                .iter()
                .zip(&index)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, &(i, j))| (i, j, c.clone()))
                .collect();
            let dual = QMat::from_vec(z.rows(), z.cols(), out.dual.expect("optimal"))?;
            Ok(ProjectiveNorm {
                value: NormValue::Exact(out.objective_value.expect("optimal")),
                decomposition,
                dual: Some(dual),
            })
        }
        _ => Err(Error::Unsupported("mixed polytope and Euclidean balls".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, qvec};

    fn chsh() -> QMat {
        QMat::from_ints(&[&[1, 1], &[1, -1]])
    }

    #[test]
    fn gauge_examples() {
        let sq = SymmetricGpt::from_space(NormedSpace::square()).unwrap();
        assert_eq!(gauge_norm(&sq, &qvec(&[1, 1, 0])).unwrap(), NormValue::Exact(int(1)));
        assert_eq!(gauge_norm(&sq, &qvec(&[0, 0, 0])).unwrap(), NormValue::Exact(int(0)));
        let di = SymmetricGpt::from_space(NormedSpace::diamond()).unwrap();
        assert_eq!(gauge_norm(&di, &qvec(&[1, 1, 0])).unwrap(), NormValue::Exact(int(2)));
        assert!(gauge_norm(&di, &qvec(&[1, 1, 1])).is_err());
    }

    #[test]
    fn square_and_diamond_are_dual() {
        let sq = NormedSpace::square();
        assert_eq!(sq.dual().unwrap(), NormedSpace::diamond());
        assert_eq!(NormedSpace::hexagon().dual().unwrap().dual().unwrap(), NormedSpace::hexagon());
    }

    #[test]
    fn chsh_norms() {
        let sq = NormedSpace::square();
        assert_eq!(injective_norm(&sq, &sq, &chsh()).unwrap(), NormValue::Exact(int(1)));
        let p = projective_norm(&sq, &sq, &chsh()).unwrap();
        assert_eq!(p.value, NormValue::Exact(int(2)));
        let dual = p.dual.unwrap();
        assert_eq!(dual.pairing(&chsh()).unwrap(), int(2));
    }

    #[test]
    fn euclidean_norms() {
        let e = NormedSpace::euclidean(3).unwrap();
        let id = QMat::identity(3);
        assert!((injective_norm(&e, &e, &id).unwrap().to_f64() - 1.0).abs() < 1e-9);
        assert!((projective_norm(&e, &e, &id).unwrap().value.to_f64() - 3.0).abs() < 1e-9);
        assert!(injective_norm(&e, &NormedSpace::square(), &QMat::zeros(3, 2)).is_err());
    }

    #[test]
    fn products_have_equal_norms() {
        let (x, y) = (NormedSpace::hexagon(), NormedSpace::diamond());
        let (a, b) = (qvec(&[2, -1]), qvec(&[1, 3]));
        let z = QMat::outer(&a, &b);
        let expected = x.norm(&a).unwrap().exact().unwrap() * y.norm(&b).unwrap().exact().unwrap();
        assert_eq!(injective_norm(&x, &y, &z).unwrap(), NormValue::Exact(expected.clone()));
        assert_eq!(projective_norm(&x, &y, &z).unwrap().value, NormValue::Exact(expected));
    }

    #[test]
    fn dual_gpt_of_square_is_diamond() {
        let sq = SymmetricGpt::from_space(NormedSpace::square()).unwrap();
        let d = dual_symmetric_gpt(&sq).unwrap();
        assert_eq!(d.space, NormedSpace::diamond());
        let back = dual_symmetric_gpt(&d).unwrap();
        assert_eq!(back.space, NormedSpace::square());
        for f in [qvec(&[1, 0, 0]), qvec(&[2, -3, 0]), qvec(&[1, 1, 0])] {
            let coords = &f[..2];
            assert_eq!(gauge_norm(&d, &f).unwrap(), sq.space.dual_norm(coords).unwrap());
        }
    }

    #[test]
    fn euclidean_gpt_is_self_dual() {
        let e = SymmetricGpt::from_space(NormedSpace::euclidean(3).unwrap()).unwrap();
        assert_eq!(dual_symmetric_gpt(&e).unwrap(), e);
    }

    #[test]
    fn asymmetric_balls_are_rejected() {
        assert!(NormedSpace::polytope(vec![qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[-1, -1])]).is_err());
        let tri = Gpt::new(Cone::Classical { n: 3 }, qvec(&[1, 1, 1])).unwrap();
        assert!(SymmetricGpt::new(tri, vec![crate::exactnum::rat(1, 3); 3]).is_err());
    }
}
