use std::collections::BTreeSet;

use num_traits::Signed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ballcones::clifford::{lorentz_psd_retract, psd_pinching_retract};
use crate::cones::hermitian::{self, projector_coords_f64};
use crate::cones::PolyhedralCone;
use crate::dim3lab::{chsh_functional, omega_tensor, sandwich};
use crate::error::{Error, Result};
use crate::exactnum::mat::{FMat, QMat};
use crate::exactnum::rational::{format_rational, primitive, rat, serde_rational, sqrt_upper, vec_to_f64, QVec, Rational};
use crate::retractlab::{compose_retracts, descent::reduce_to_polygon, RetractPair};
use crate::samples;
use crate::tensorcone::ChainStep;

pub const DEFAULT_SPOT_CHECKS: usize = 1000;

/// A ray of the polyhedral cone (or of its dual) together with the Hermitian
/// coordinates it produces on the PSD side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdEvidence {
    #[serde(with = "serde_rational::vec")]
    pub ray: QVec,
    #[serde(with = "serde_rational::vec")]
    pub hermitian: QVec,
}

/// Float checks on random rank-one projectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Smallest normalised `⟨witness, a⊗P⟩` over dual rays `a` and projector functionals `P`.
    pub worst_max: f64,
    /// Smallest normalised `⟨functional, x⊗P⟩` over points `x` of the cone and projectors `P`.
    pub worst_min: f64,
}

impl SpotCheck {
    pub fn passed(&self) -> bool {
        self.worst_max >= -self.tol && self.worst_min >= -self.tol
    }
}

/// Certificate that a polyhedral cone and `Psd(n)` form an entangleable pair.
///
/// Tensors are `dim C × n²` matrices whose second index runs over Hermitian
/// coordinates. For every dual ray `a` of `C`, `aᵀ·witness` must be a PSD
/// matrix; for every extreme ray `g`, `gᵀ·functional` must be a functional
/// whose matrix is PSD. Together these are exact membership of the witness in
/// the maximal product and nonnegativity of the functional on the minimal one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiquantumCertificate {
    pub n: usize,
    pub witness: QMat,
    pub functional: QMat,
    pub max_evidence: Vec<PsdEvidence>,
    pub min_evidence: Vec<PsdEvidence>,
    #[serde(with = "serde_rational")]
    pub separation_value: Rational,
    /// CHSH margin used on the disk.
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub spot_check: SpotCheck,
    #[serde(default)]
    pub chain: Vec<ChainStep>,
}

fn max_side(c: &PolyhedralCone, n: usize, witness: &QMat) -> Result<Option<Vec<PsdEvidence>>> {
    let mut out = Vec::new();
    for a in c.dual_rays()? {
        let h = witness.vec_mul(&a)?;
        if !hermitian::is_psd_exact(&hermitian::from_coords(&h, n)?) {
            return Ok(None);
        }
        out.push(PsdEvidence { ray: a, hermitian: h });
    }
    Ok(Some(out))
}

fn min_side(c: &PolyhedralCone, n: usize, functional: &QMat) -> Result<Option<Vec<PsdEvidence>>> {
    let mut out = Vec::new();
    for g in c.extreme_rays()? {
        let w = functional.vec_mul(g)?;
        if !hermitian::is_psd_exact(&hermitian::functional_matrix(&w, n)?) {
            return Ok(None);
        }
        out.push(PsdEvidence { ray: g.clone(), hermitian: w });
    }
    Ok(Some(out))
}

/// Smallest `λ` with `λ² ≥ 2·max‖p‖²` over the sandwiched polygon's
/// vertices, preferring `3/2`. The CHSH expression of `p` against a unit
/// disk point is at most `√2·‖p‖`, so such a `λ` bounds it, and `λ < 2`
/// because the polygon avoids the square's corners.
fn disk_margin(vertices: &[QVec]) -> Result<Rational> {
    let max_sq = vertices.iter().map(|p| &p[0] * &p[0] + &p[1] * &p[1]).max().expect("nonempty polygon");
    let need = Rational::from_integer(2.into()) * max_sq;
    let preferred = rat(3, 2);
    if need <= &preferred * &preferred {
        return Ok(preferred);
    }
    let two = Rational::from_integer(2.into());
    for bits in (8..=128).step_by(8) {
        let lambda = sqrt_upper(&need, bits);
        if lambda < two {
            return Ok(lambda);
        }
    }
    Err(Error::Internal("no rational disk margin below 2".into()))
}

/// Exact certificate that `(C, Psd(n))` is entangleable for non-classical
/// polyhedral `C` and `n ≥ 2`.
///
/// `C` descends to the cone over a polygon, which is sandwiched between a kite
/// and the blunt square. `Psd(n)` is pinched to `Psd(2)` and mapped onto the
/// disk cone by the qubit Clifford retract; the disk needs no sandwich since
/// it already sits between the diamond and the square. The kite witness and a
/// CHSH functional with disk margin are lifted back along both chains.
pub fn certify_entangleable_semiquantum(c: &PolyhedralCone, n: usize, seed: u64) -> Result<SemiquantumCertificate> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("semiquantum certificates need n >= 2, got {n}")));
    }
    let (polygon, descent, trace) = reduce_to_polygon(c, "first")?;
    let s = sandwich(&polygon)?;
    let g = s.lifted();
    let phi1 = g.matmul(&descent.phi)?;
    let psi1 = descent.psi.matmul(&g.inverse()?)?;

    let qubit = lorentz_psd_retract(1, seed)?;
    let mut chain = vec![
        ChainStep::with("descent", json!({ "steps": trace.steps, "polygon": polygon })),
        ChainStep::with("sandwich", json!({ "cone": 1, "result": s })),
    ];
    let psd: RetractPair = if n > 2 {
        let pinch = psd_pinching_retract(2, n, seed)?;
        chain.push(ChainStep::with("pinching", json!({ "from": n, "to": 2 })));
        compose_retracts(&pinch, &qubit)?
    } else {
        qubit
    };
    chain.push(ChainStep::with(
        "clifford",
        json!({ "n": 1, "phi": psd.phi, "psi": psd.psi, "positivity": psd.positivity }),
    ));

    let lambda = disk_margin(s.image.vertices())?;
    chain.push(ChainStep::with("disk-margin", json!({ "lambda": format_rational(&lambda) })));
    let zero = Rational::from_integer(0.into());
    let z = omega_tensor(&s.kite.a, &s.kite.b, &zero, &zero)?;
    let f = chsh_functional(&lambda);

    let witness = QMat::sandwich(&psi1, &z, &psd.psi)?;
    let functional = QMat::sandwich(&phi1.transpose(), &f, &psd.phi.transpose())?;
    let separation_value = functional.pairing(&witness)?;
    let max_evidence = max_side(c, n, &witness)?.ok_or_else(|| Error::Internal("lifted witness leaves the max cone".into()))?;
    let min_evidence =
        min_side(c, n, &functional)?.ok_or_else(|| Error::Internal("lifted functional is negative on products".into()))?;
    let placeholder = SpotCheck { samples: 0, seed, tol: 0.0, worst_max: 0.0, worst_min: 0.0 };
    let mut cert = SemiquantumCertificate {
        n,
        witness,
        functional,
        max_evidence,
        min_evidence,
        separation_value,
        lambda,
        spot_check: placeholder,
        chain,
    };
    if !verify_semiquantum(&cert, c, n)? {
        return Err(Error::Verification("semiquantum certificate does not verify".into()));
    }
    cert.spot_check = spot_check_semiquantum(&cert, c, DEFAULT_SPOT_CHECKS, seed, crate::exactnum::DEFAULT_TOL)?;
    if !cert.spot_check.passed() {
        return Err(Error::Verification("semiquantum spot checks failed".into()));
    }
    Ok(cert)
}

fn evidence_matches(entries: &[PsdEvidence], expected: &[PsdEvidence]) -> bool {
    let key = |e: &PsdEvidence| (primitive(&e.ray), e.hermitian.clone(), e.ray.clone());
    let recorded: BTreeSet<_> = entries.iter().map(key).collect();
    let required: BTreeSet<_> = expected.iter().map(key).collect();
    entries.len() == expected.len() && recorded == required
}

/// Exact replay: recomputes both evidence lists from the cone and compares.
pub fn verify_semiquantum(cert: &SemiquantumCertificate, c: &PolyhedralCone, n: usize) -> Result<bool> {
    let shape = (c.dim(), hermitian::coord_len(n));
    if cert.n != n || cert.witness.shape() != shape || cert.functional.shape() != shape {
        return Err(Error::Dimension(format!(
            "certificate for n = {} with matrices {:?}, expected n = {n} and {shape:?}",
            cert.n,
            cert.witness.shape()
        )));
    }
    let value = cert.functional.pairing(&cert.witness)?;
    if value != cert.separation_value || !value.is_negative() {
        return Ok(false);
    }
    let Some(max) = max_side(c, n, &cert.witness)? else { return Ok(false) };
    let Some(min) = min_side(c, n, &cert.functional)? else { return Ok(false) };
    Ok(evidence_matches(&cert.max_evidence, &max) && evidence_matches(&cert.min_evidence, &min))
}

/// Functional coordinates of `tr(· P)` for the projector `P = vv†`.
fn projector_functional(re: &[f64], im: &[f64]) -> Vec<f64> {
    let n = re.len();
    let mut c = projector_coords_f64(re, im);
    for x in &mut c[n..] {
        *x *= 2.0;
    }
    c
}

fn random_combination(rng: &mut samples::SampleRng, rays: &[QVec]) -> Vec<f64> {
    let dim = rays[0].len();
    loop {
        let mut x = vec![0.0; dim];
        for r in rays {
            let w = rng.gen_range(0..=3) as f64;
            for (xi, ri) in x.iter_mut().zip(vec_to_f64(r)) {
                *xi += w * ri;
            }
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            return x.into_iter().map(|v| v / norm).collect();
        }
    }
}

fn unit_complex(rng: &mut samples::SampleRng, n: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let re: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let im: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = re.iter().chain(&im).map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return (re.iter().map(|v| v / norm).collect(), im.iter().map(|v| v / norm).collect());
        }
    }
}

/// Evaluates the witness on random `a⊗P` (dual points times projector
/// functionals) and the functional on random `x⊗P` (cone points times
/// projectors), all normalised to unit size.
pub fn spot_check_semiquantum(
    cert: &SemiquantumCertificate,
    c: &PolyhedralCone,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SpotCheck> {
    let mut rng = samples::rng(seed);
    let (w, f): (FMat, FMat) = (cert.witness.to_f64(), cert.functional.to_f64());
    let dual = c.dual_rays()?;
    let rays = c.extreme_rays()?;
    let n = cert.n;
    let (mut worst_max, mut worst_min) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..samples {
        let (re, im) = unit_complex(&mut rng, n);
        let a = random_combination(&mut rng, &dual);
        let max_value = dot_f64(&w.vec_mul(&a)?, &projector_functional(&re, &im));
        worst_max = worst_max.min(max_value);
        let x = random_combination(&mut rng, rays);
        let min_value = dot_f64(&f.vec_mul(&x)?, &projector_coords_f64(&re, &im));
        worst_min = worst_min.min(min_value);
    }
    Ok(SpotCheck { samples, seed, tol, worst_max, worst_min })
}

fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SemiquantumCertificate {
    /// `true` when the lambda is the preferred rational `3/2`.
    pub fn uses_preferred_margin(&self) -> bool {
        self.lambda == rat(3, 2)
    }

    /// `⟨functional, witness⟩`, recomputed.
    pub fn pairing(&self) -> Result<Rational> {
        self.functional.pairing(&self.witness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Polygon;
    use crate::exactnum::rational::qvec;

    #[test]
    fn square_against_qubits() {
        let c = PolyhedralCone::new(Polygon::square().lifted()).unwrap();
        let cert = certify_entangleable_semiquantum(&c, 2, 7).unwrap();
        assert!(verify_semiquantum(&cert, &c, 2).unwrap());
        assert!(cert.spot_check.passed());
        assert!(cert.uses_preferred_margin());
        let text = serde_json::to_string(&cert).unwrap();
        let back: SemiquantumCertificate = serde_json::from_str(&text).unwrap();
        assert!(verify_semiquantum(&back, &c, 2).unwrap());
    }

    #[test]
    fn pentagon_against_qutrits() {
        let c = PolyhedralCone::new(
            Polygon::new(vec![qvec(&[2, 0]), vec![rat(3, 2), rat(3, 2)], qvec(&[0, 2]), qvec(&[-2, 0]), qvec(&[0, -2])])
                .unwrap()
                .lifted(),
        )
        .unwrap();
        let cert = certify_entangleable_semiquantum(&c, 3, 1).unwrap();
        assert!(verify_semiquantum(&cert, &c, 3).unwrap());
    }

    #[test]
    fn tampering_is_detected() {
        let c = PolyhedralCone::new(Polygon::square().lifted()).unwrap();
        let mut cert = certify_entangleable_semiquantum(&c, 2, 7).unwrap();
        cert.functional = -&cert.functional;
        cert.separation_value = -cert.separation_value.clone();
        assert!(!verify_semiquantum(&cert, &c, 2).unwrap());
    }

    #[test]
    fn orthant_is_classical() {
        let err = certify_entangleable_semiquantum(&PolyhedralCone::orthant(3), 2, 0).unwrap_err();
        assert!(matches!(err, Error::Classical { .. }));
    }
}
