use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::cones::dd::extreme_rays_of_dual;
use crate::error::{Error, Result};
use crate::exactnum::lp::{conic_combination, lp_solve, LpProblem, LpStatus};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{dot, is_zero_vec, primitive, QVec, Rational};

/// Caps applied to user-supplied cones. Cones built internally (tensor
/// products, duals) are not capped here; callers enforce their own limits.
pub const MAX_DIM: usize = 16;
pub const MAX_GENERATORS: usize = 64;

/// A supporting functional together with the extreme rays it vanishes on.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub functional: QVec,
    /// Indices into [`PolyhedralCone::extreme_rays`].
    pub rays: Vec<usize>,
}

/// A proper polyhedral cone given by generators. Extreme rays and facets are
/// computed lazily, once.
#[derive(Clone, Debug)]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<QVec>,
    rays: OnceLock<Vec<QVec>>,
    facets: OnceLock<Vec<Facet>>,
}

impl PartialEq for PolyhedralCone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.generators == other.generators
    }
}

impl PolyhedralCone {
    /// Builds the cone, rejecting zero generators and cones that are not
    /// salient or not generating.
    pub fn new(generators: Vec<QVec>) -> Result<Self> {
        let dim = generators.first().map(Vec::len).ok_or_else(|| Error::InvalidCone("no generators".into()))?;
        Self::with_dim(dim, generators)
    }

    pub fn with_dim(dim: usize, generators: Vec<QVec>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCone("ambient dimension must be positive".into()));
        }
        if dim > MAX_DIM || generators.len() > MAX_GENERATORS {
            return Err(Error::CapExceeded(format!(
                "polyhedral cones are capped at dimension {MAX_DIM} and {MAX_GENERATORS} generators"
            )));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::Dimension(format!("generator of length {} in a {dim}-dimensional cone", g.len())));
        }
        if generators.iter().any(|g| is_zero_vec(g)) {
            return Err(Error::InvalidCone("zero generator".into()));
        }
        let cone = Self::from_trusted(dim, generators);
        if QMat::from_rows(cone.generators.clone())?.rank() < dim {
            return Err(Error::InvalidCone("generators do not span the ambient space (not generating)".into()));
        }
        if !cone.is_salient()? {
            return Err(Error::InvalidCone("cone contains a line (not salient)".into()));
        }
        Ok(cone)
    }

    /// Skips the properness checks. Generators are still normalized and
    /// deduplicated.
    pub(crate) fn from_trusted(dim: usize, generators: Vec<QVec>) -> Self {
        let mut gens: Vec<QVec> = Vec::with_capacity(generators.len());
        for g in generators {
            let p = primitive(&g);
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        PolyhedralCone { dim, generators: gens, rays: OnceLock::new(), facets: OnceLock::new() }
    }

    /// The nonnegative orthant `R₊ⁿ`.
    pub fn orthant(n: usize) -> Self {
        let gens = (0..n).map(|i| unit(n, i)).collect();
        Self::from_trusted(n, gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    /// Salient iff some functional is strictly positive on every generator.
    fn is_salient(&self) -> Result<bool> {
        let k = self.generators.len();
        let d = self.dim;
        // Variables: y (free, d), s (>= 0, k). Rows: gᵢ·y - sᵢ = 1.
        let mut a = QMat::zeros(k, d + k);
        for (i, g) in self.generators.iter().enumerate() {
            for (j, v) in g.iter().enumerate() {
                a[(i, j)] = v.clone();
            }
            a[(i, d + i)] = -Rational::one();
        }
        let mut mask = vec![false; d];
        mask.extend(vec![true; k]);
        let p = LpProblem::new(vec![Rational::zero(); d + k], a, vec![Rational::one(); k], mask)?;
        Ok(lp_solve(&p)?.status == LpStatus::Optimal)
    }

    /// Irredundant generators: each one is tested for membership in the cone
    /// of the others by LP and dropped when redundant.
    pub fn extreme_rays(&self) -> Result<&[QVec]> {
        if let Some(r) = self.rays.get() {
            return Ok(r);
        }
        let mut kept: Vec<QVec> = self.generators.clone();
        let mut i = 0;
        while i < kept.len() {
            let others: Vec<QVec> = kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
            if conic_combination(&others, &kept[i])?.is_ok() {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        let _ = self.rays.set(kept);
        Ok(self.rays.get().expect("just initialized"))
    }

    pub fn facets(&self) -> Result<&[Facet]> {
        if let Some(f) = self.facets.get() {
            return Ok(f);
        }
        let functionals = extreme_rays_of_dual(&self.generators, self.dim)?;
        let rays = self.extreme_rays()?;
        let mut facets = Vec::with_capacity(functionals.len());
        for f in functionals {
            let on: Vec<usize> = (0..rays.len()).filter(|&i| dot(&f, &rays[i]).is_zero()).collect();
            let face_rank = if on.is_empty() {
                0
            } else {
                QMat::from_rows(on.iter().map(|&i| rays[i].clone()).collect())?.rank()
            };
            if face_rank + 1 != self.dim {
                return Err(Error::Internal(format!(
                    "double description produced a face of dimension {face_rank} in a {}-dimensional cone",
                    self.dim
                )));
            }
            facets.push(Facet { functional: f, rays: on });
        }
        let _ = self.facets.set(facets);
        Ok(self.facets.get().expect("just initialized"))
    }

    /// The dual cone `C* = {f : f(x) ≥ 0 on C}`, generated by the facet functionals.
    pub fn dual(&self) -> Result<PolyhedralCone> {
        let gens: Vec<QVec> = self.facets()?.iter().map(|f| f.functional.clone()).collect();
        let dual = Self::from_trusted(self.dim, gens);
        // Every facet functional is extreme in C*.
        let _ = dual.rays.set(dual.generators.clone());
        Ok(dual)
    }

    pub fn dual_rays(&self) -> Result<Vec<QVec>> {
        Ok(self.facets()?.iter().map(|f| f.functional.clone()).collect())
    }

    pub fn is_classical(&self) -> Result<bool> {
        Ok(self.extreme_rays()?.len() == self.dim)
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!("vector of length {} for a {}-dimensional cone", x.len(), self.dim)));
        }
        Ok(self.facets()?.iter().all(|f| !dot(&f.functional, x).is_negative()))
    }

    /// Image under a linear map, given as a `dim' × dim` matrix.
    pub fn map_linear(&self, m: &QMat) -> Result<PolyhedralCone> {
        if m.cols() != self.dim {
            return Err(Error::Dimension(format!("{}x{} map on a {}-dimensional cone", m.rows(), m.cols(), self.dim)));
        }
        let gens = self.generators.iter().map(|g| m.mul_vec(g)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_trusted(m.rows(), gens.into_iter().filter(|g| !is_zero_vec(g)).collect()))
    }

    /// A strictly positive functional: the sum of the dual extreme rays.
    pub fn interior_functional(&self) -> Result<QVec> {
        let mut u = vec![Rational::zero(); self.dim];
        for f in self.facets()? {
            for (a, b) in u.iter_mut().zip(&f.functional) {
                *a += b;
            }
        }
        Ok(u)
    }

    /// Membership in the relative interior of the cone, decided from the facets.
    pub fn is_interior(&self, x: &[Rational]) -> Result<bool> {
        Ok(self.facets()?.iter().all(|f| dot(&f.functional, x).is_positive()))
    }
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// True when every generator of `inner` lies in `outer`.
pub fn is_subcone(inner: &PolyhedralCone, outer: &PolyhedralCone) -> Result<bool> {
    for g in inner.generators() {
        if !outer.contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}
