use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::{injective_norm, projective_norm, NormValue, SymmetricGpt};
use crate::cones::{Cone, PolyhedralCone};
use crate::error::{Error, Result};
use crate::exactnum::lp::{lp_solve, LpProblem};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{dot, int, rat, serde_rational, QVec, Rational};
use crate::exactnum::spectral::DEFAULT_TOL;
use crate::samples::SampleRng;
use crate::tensorcone::{max_membership, min_tensor_generators};

/// `γ₁⊗γ₂ + z` for `z` given in `X₁⊗X₂` coordinates with injective norm at
/// most 1, which makes it an element of the maximal tensor product.
pub fn omega_state(s1: &SymmetricGpt, s2: &SymmetricGpt, z: &QMat) -> Result<QMat> {
    let eps = injective_norm(&s1.space, &s2.space, z)?;
    let too_big = match &eps {
        NormValue::Exact(v) => *v > Rational::one(),
        NormValue::Float(v) => *v > 1.0 + DEFAULT_TOL,
    };
    if too_big {
        return Err(Error::InvalidInput(format!("injective norm {} exceeds 1", eps.to_f64())));
    }
    let embedded = QMat::sandwich(&s1.kernel_basis, z, &s2.kernel_basis)?;
    QMat::outer(&s1.centre, &s2.centre).add(&embedded)
}

/// Optimal value of `min{(u₁⊗u₂)(ζ) : ζ, ω+ζ ∈ C₁⊙C₂}` and the minimiser.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Robustness {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub zeta: QMat,
    /// Dual certificate of optimality from the LP.
    #[serde(with = "serde_rational::vec")]
    pub dual: QVec,
}

/// Entanglement robustness of `omega` between two polyhedral cones with order
/// units, as one exact LP over the products of extreme rays.
pub fn entanglement_robustness(
    c1: &PolyhedralCone,
    u1: &[Rational],
    c2: &PolyhedralCone,
    u2: &[Rational],
    omega: &QMat,
) -> Result<Robustness> {
    if !max_membership(c1, c2, omega)?.member {
        return Err(Error::InvalidInput("state is not in the maximal tensor product".into()));
    }
    let gens = min_tensor_generators(c1, c2)?;
    let k = gens.len();
    let mut cols = Vec::with_capacity(2 * k);
    let mut objective = Vec::with_capacity(2 * k);
    for g in &gens {
        cols.push((-g).flatten());
        objective.push(dot(u1, &g.mul_vec(u2)?));
    }
    for g in &gens {
        cols.push(g.flatten());
        objective.push(Rational::zero());
    }
    let lp = LpProblem::new(objective, QMat::from_cols(&cols)?, omega.flatten(), vec![true; 2 * k])?;
    let out = lp_solve(&lp)?;
    if !out.is_optimal() {
        return Err(Error::Internal("robustness LP has no optimum although the min cone is generating".into()));
    }
    let x = out.primal.expect("optimal");
    let mut zeta = QMat::zeros(omega.rows(), omega.cols());
    for (coef, g) in x[..k].iter().zip(&gens) {
        if !coef.is_zero() {
            zeta = zeta.add(&g.scale(coef))?;
        }
    }
    Ok(Robustness { value: out.objective_value.expect("optimal"), zeta, dual: out.dual.expect("optimal") })
}

/// `(‖z‖_π − 1)/2`, clipped at 0, for `z` with injective norm at most 1.
pub fn robustness_lower_bound(s1: &SymmetricGpt, s2: &SymmetricGpt, z: &QMat) -> Result<NormValue> {
    let eps = injective_norm(&s1.space, &s2.space, z)?;
    if eps.to_f64() > 1.0 + DEFAULT_TOL {
        return Err(Error::InvalidInput("injective norm exceeds 1".into()));
    }
    match projective_norm(&s1.space, &s2.space, z)?.value {
        NormValue::Exact(p) => Ok(NormValue::Exact(((p - int(1)) / int(2)).max(Rational::zero()))),
        NormValue::Float(p) => Ok(NormValue::Float(((p - 1.0) / 2.0).max(0.0))),
    }
}

/// `v ↦ 2u(v)γ − v`, the central symmetry of the state space.
pub fn point_reflection(s: &SymmetricGpt) -> QMat {
    let d = s.dim();
    QMat::outer(&s.centre, &s.gpt.unit).scale(&int(2)).sub(&QMat::identity(d)).expect("square")
}

/// `v ↦ Σₖ eₖ(v)·ωₖ`.
pub fn measure_and_prepare(effects: &[QVec], states: &[QVec]) -> Result<QMat> {
    if effects.len() != states.len() || effects.is_empty() {
        return Err(Error::InvalidInput("need one state per effect".into()));
    }
    let mut m = QMat::zeros(states[0].len(), effects[0].len());
    for (e, w) in effects.iter().zip(states) {
        m = m.add(&QMat::outer(w, e))?;
    }
    Ok(m)
}

/// Whether `map` is positive on the cone and preserves the order unit.
pub fn is_local_map(map: &QMat, s: &SymmetricGpt) -> Result<bool> {
    if map.vec_mul(&s.gpt.unit)? != s.gpt.unit {
        return Ok(false);
    }
    let cone: &Cone = &s.gpt.cone;
    for g in cone.extreme_rays()? {
        if !cone.contains_exact(&map.mul_vec(&g)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn normalised_states(s: &SymmetricGpt) -> Result<Vec<QVec>> {
    Ok(s.gpt
        .cone
        .extreme_rays()?
        .iter()
        .map(|g| {
            let t = dot(&s.gpt.unit, g);
            g.iter().map(|x| x / &t).collect()
        })
        .collect())
}

/// A random positive, unit-preserving map on a polytope GPT: a convex
/// combination of the identity, the point reflection and a two-outcome
/// measure-and-prepare channel. The measurement is `(u ± φ)/2` with `φ` a
/// vertex of the dual ball read through `Π`.
pub fn random_local_map(rng: &mut SampleRng, s: &SymmetricGpt) -> Result<QMat> {
    let dual_ball = s.space.dual_vertices()?;
    let f = &dual_ball[rng.gen_range(0..dual_ball.len())];
    let d = s.dim();
    let mut phi = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![Rational::zero(); d];
        e[j] = Rational::one();
        phi.push(dot(f, &s.coordinates(&s.project(&e))?));
    }
    let half = rat(1, 2);
    let plus: QVec = s.gpt.unit.iter().zip(&phi).map(|(u, p)| (u + p) * &half).collect();
    let minus: QVec = s.gpt.unit.iter().zip(&phi).map(|(u, p)| (u - p) * &half).collect();
    let states = normalised_states(s)?;
    let pick = |rng: &mut SampleRng| states[rng.gen_range(0..states.len())].clone();
    let channel = measure_and_prepare(&[plus, minus], &[pick(rng), pick(rng)])?;

    let weights: Vec<i64> = loop {
        let w: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=4)).collect();
        if w.iter().any(|x| *x > 0) {
            break w;
        }
    };
    let total: i64 = weights.iter().sum();
    let mix = |w: i64| rat(w, total);
    let map = QMat::identity(d)
        .scale(&mix(weights[0]))
        .add(&point_reflection(s).scale(&mix(weights[1])))?
        .add(&channel.scale(&mix(weights[2])))?;
    if !is_local_map(&map, s)? {
        return Err(Error::Internal("random local map is not positive".into()));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Polygon;
    use crate::gptnorms::NormedSpace;
    use crate::samples;
    use num_traits::Signed;

    fn squit() -> SymmetricGpt {
        SymmetricGpt::from_space(NormedSpace::square()).unwrap()
    }

    fn half_chsh() -> QMat {
        QMat::from_ints(&[&[1, 1], &[1, -1]]).scale(&rat(1, 2))
    }

    fn units() -> QVec {
        vec![int(0), int(0), int(1)]
    }

    #[test]
    fn omega_of_zero_is_separable() {
        let s = squit();
        let w = omega_state(&s, &s, &QMat::zeros(2, 2)).unwrap();
        let c = s.gpt.cone.to_polyhedral().unwrap();
        let r = entanglement_robustness(&c, &units(), &c, &units(), &w).unwrap();
        assert_eq!(r.value, int(0));
    }

    #[test]
    fn squit_chsh_state() {
        let s = squit();
        let w = omega_state(&s, &s, &half_chsh().scale(&int(2))).unwrap();
        let c = s.gpt.cone.to_polyhedral().unwrap();
        assert!(max_membership(&c, &c, &w).unwrap().member);
        let r = entanglement_robustness(&c, &units(), &c, &units(), &w).unwrap();
        assert!(r.value >= rat(1, 2));
        let bound = robustness_lower_bound(&s, &s, &half_chsh().scale(&int(2))).unwrap();
        assert_eq!(bound, NormValue::Exact(rat(1, 2)));
        assert!(omega_state(&s, &s, &half_chsh().scale(&int(4))).is_err());
    }

    #[test]
    fn diamond_witness_is_robustly_entangled() {
        let d = PolyhedralCone::new(Polygon::diamond().lifted()).unwrap();
        let w = crate::dim3lab::omega_tensor(&int(0), &int(0), &int(0), &int(0)).unwrap();
        let r = entanglement_robustness(&d, &units(), &d, &units(), &w).unwrap();
        assert!(r.value.is_positive());
    }

    #[test]
    fn euclidean_lower_bound() {
        let e = SymmetricGpt::from_space(NormedSpace::euclidean(3).unwrap()).unwrap();
        let b = robustness_lower_bound(&e, &e, &QMat::identity(3)).unwrap();
        assert!((b.to_f64() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_maps_are_local() {
        let mut rng = samples::rng(4);
        for space in [NormedSpace::square(), NormedSpace::hexagon()] {
            let s = SymmetricGpt::from_space(space).unwrap();
            for _ in 0..5 {
                let m = random_local_map(&mut rng, &s).unwrap();
                assert!(is_local_map(&m, &s).unwrap());
            }
        }
    }
}
