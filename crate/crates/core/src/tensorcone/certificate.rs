use std::collections::BTreeSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{primitive, serde_rational, QVec, Rational};
use crate::tensorcone::pair_value;

/// The value of `left ⊗ right` paired against a tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceEntry {
    #[serde(with = "serde_rational::vec")]
    pub left: QVec,
    #[serde(with = "serde_rational::vec")]
    pub right: QVec,
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

/// One audit record of how a certificate was produced. Verification never
/// relies on the chain; it replays the evidence against the cones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub kind: String,
    #[serde(default)]
    pub detail: Value,
}

impl ChainStep {
    pub fn note(kind: &str, text: &str) -> Self {
        ChainStep { kind: kind.into(), detail: Value::String(text.into()) }
    }

    pub fn with(kind: &str, detail: Value) -> Self {
        ChainStep { kind: kind.into(), detail }
    }
}

/// A tensor in `C₁⊛C₂` and a functional nonnegative on `C₁⊙C₂` that is
/// negative on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub witness: QMat,
    pub functional: QMat,
    /// `aᵀ·witness·b` for every pair of dual extreme rays.
    pub max_evidence: Vec<EvidenceEntry>,
    /// `gᵀ·functional·h` for every pair of extreme rays.
    pub min_evidence: Vec<EvidenceEntry>,
    #[serde(with = "serde_rational")]
    pub separation_value: Rational,
    #[serde(default)]
    pub chain: Vec<ChainStep>,
}

fn evidence(left: &[QVec], right: &[QVec], m: &QMat) -> Result<Vec<EvidenceEntry>> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            out.push(EvidenceEntry { left: a.clone(), right: b.clone(), value: pair_value(a, m, b)? });
        }
    }
    Ok(out)
}

impl SeparationCertificate {
    /// Computes all evidence for `(witness, functional)` against the cones and
    /// fails unless the result verifies.
    pub fn assemble(
        c1: &PolyhedralCone,
        c2: &PolyhedralCone,
        witness: QMat,
        functional: QMat,
        chain: Vec<ChainStep>,
    ) -> Result<Self> {
        let max_evidence = evidence(&c1.dual_rays()?, &c2.dual_rays()?, &witness)?;
        let min_evidence = evidence(c1.extreme_rays()?, c2.extreme_rays()?, &functional)?;
        let separation_value = functional.pairing(&witness)?;
        let cert = SeparationCertificate { witness, functional, max_evidence, min_evidence, separation_value, chain };
        if !verify_certificate(&cert, c1, c2)? {
            return Err(Error::Verification("assembled certificate does not verify".into()));
        }
        Ok(cert)
    }
}

type PairKey = (QVec, QVec);

fn required_pairs(left: &[QVec], right: &[QVec]) -> BTreeSet<PairKey> {
    left.iter().flat_map(|a| right.iter().map(move |b| (primitive(a), primitive(b)))).collect()
}

/// Checks `entries` against `m`: every recorded value must be recomputed
/// exactly, nonnegative, and the entries must cover every required pair.
fn evidence_holds(entries: &[EvidenceEntry], m: &QMat, required: &BTreeSet<PairKey>) -> Result<bool> {
    let mut covered = BTreeSet::new();
    for e in entries {
        if e.left.len() != m.rows() || e.right.len() != m.cols() {
            return Ok(false);
        }
        let key = (primitive(&e.left), primitive(&e.right));
        if !required.contains(&key) {
            return Ok(false);
        }
        let value = pair_value(&e.left, m, &e.right)?;
        if value != e.value || value.is_negative() {
            return Ok(false);
        }
        covered.insert(key);
    }
    Ok(covered.len() == required.len())
}

/// Replays a certificate exactly against freshly computed extreme rays and
/// dual extreme rays of both cones.
pub fn verify_certificate(cert: &SeparationCertificate, c1: &PolyhedralCone, c2: &PolyhedralCone) -> Result<bool> {
    let shape = (c1.dim(), c2.dim());
    if cert.witness.shape() != shape || cert.functional.shape() != shape {
        return Err(Error::Dimension(format!(
            "certificate matrices are {:?} and {:?}, cones need {shape:?}",
            cert.witness.shape(),
            cert.functional.shape()
        )));
    }
    let value = cert.functional.pairing(&cert.witness)?;
    if value != cert.separation_value || !value.is_negative() {
        return Ok(false);
    }
    let max_pairs = required_pairs(&c1.dual_rays()?, &c2.dual_rays()?);
    if !evidence_holds(&cert.max_evidence, &cert.witness, &max_pairs)? {
        return Ok(false);
    }
    let min_pairs = required_pairs(c1.extreme_rays()?, c2.extreme_rays()?);
    evidence_holds(&cert.min_evidence, &cert.functional, &min_pairs)
}
