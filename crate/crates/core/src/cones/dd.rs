//! Double description (Motzkin) enumeration of the extreme rays of
//! `{y : ⟨gᵢ, y⟩ ≥ 0 for all i}`.
//!
//! The constraint vectors must span the ambient space, so the polyhedral cone
//! being enumerated is pointed. Adjacency is decided combinatorially from the
//! zero sets of the current rays.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{dot, primitive, QVec, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64).max(1)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    v: QVec,
    zeros: BitSet,
}

/// Extreme rays of the polyhedral cone `{y : ⟨c, y⟩ ≥ 0 for every c in constraints}`,
/// each scaled to a primitive integer vector, in a deterministic order.
pub fn extreme_rays_of_dual(constraints: &[QVec], dim: usize) -> Result<Vec<QVec>> {
    if constraints.iter().any(|c| c.len() != dim) {
        return Err(Error::Dimension("constraint length differs from ambient dimension".into()));
    }
    let m = constraints.len();
    // Greedy basis among constraints, in input order.
    let mut basis: Vec<usize> = Vec::with_capacity(dim);
    for (i, _) in constraints.iter().enumerate() {
        let mut trial: Vec<QVec> = basis.iter().map(|&b| constraints[b].clone()).collect();
        trial.push(constraints[i].clone());
        if QMat::from_rows(trial)?.rank() == basis.len() + 1 {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    if basis.len() < dim {
        return Err(Error::InvalidCone(format!(
            "constraints span only {} of {} dimensions",
            basis.len(),
            dim
        )));
    }
    let b = QMat::from_rows(basis.iter().map(|&i| constraints[i].clone()).collect())?;
    let inv = b.inverse()?;
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let mut zeros = BitSet::new(m);
            for (k, &bi) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(bi);
                }
            }
            Ray { v: primitive(&inv.col(j)), zeros }
        })
        .collect();

    for (k, c) in constraints.iter().enumerate() {
        if basis.contains(&k) {
            continue;
        }
        let values: Vec<Rational> = rays.iter().map(|r| dot(c, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (i, r) in rays.iter().enumerate() {
            if values[i].is_zero() {
                let mut zeros = r.zeros.clone();
                zeros.insert(k);
                next.push(Ray { v: r.v.clone(), zeros });
            } else if values[i].is_positive() {
                next.push(Ray { v: r.v.clone(), zeros: r.zeros.clone() });
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.intersect(&rays[n].zeros);
                if common.len() + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == p || i == n || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let v: QVec = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(vn, vp)| &values[p] * vn - &values[n] * vp)
                    .collect();
                let mut zeros = common;
                zeros.insert(k);
                next.push(Ray { v: primitive(&v), zeros });
            }
        }
        rays = next;
    }
    let mut out: Vec<QVec> = Vec::with_capacity(rays.len());
    for r in rays {
        if !r.v.iter().all(Zero::is_zero) && !out.contains(&r.v) {
            out.push(r.v);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::qvec;

    #[test]
    fn orthant_is_self_dual() {
        let gens = vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])];
        let rays = extreme_rays_of_dual(&gens, 3).unwrap();
        assert_eq!(rays.len(), 3);
        for g in &gens {
            assert!(rays.contains(g));
        }
    }

    #[test]
    fn square_cone_dual_is_diamond_cone() {
        let square = vec![qvec(&[1, 1, 1]), qvec(&[-1, 1, 1]), qvec(&[-1, -1, 1]), qvec(&[1, -1, 1])];
        let rays = extreme_rays_of_dual(&square, 3).unwrap();
        let mut expected = vec![qvec(&[1, 0, 1]), qvec(&[0, 1, 1]), qvec(&[-1, 0, 1]), qvec(&[0, -1, 1])];
        expected.sort();
        assert_eq!(rays, expected);
    }

    #[test]
    fn rejects_lower_dimensional_constraint_sets() {
        let gens = vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0])];
        assert!(extreme_rays_of_dual(&gens, 3).is_err());
    }
}
