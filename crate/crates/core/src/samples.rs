//! Seeded random generators for exact test data.

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cones::{Polygon, PolyhedralCone};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{int, rat, QVec, Rational};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform rational `p/denom` with `lo < p/denom < hi` (strict).
pub fn rational_open(rng: &mut SampleRng, lo: i64, hi: i64, denom: i64) -> Rational {
    let p = rng.gen_range(lo * denom + 1..hi * denom);
    rat(p, denom)
}

/// Random rational with a random denominator in `1..=max_denom`, strictly
/// inside `(−1, 1)`.
pub fn rational_unit_open(rng: &mut SampleRng, max_denom: i64) -> Rational {
    let q = rng.gen_range(2..=max_denom.max(2));
    rational_open(rng, -1, 1, q)
}

pub fn int_vec(rng: &mut SampleRng, len: usize, bound: i64) -> QVec {
    (0..len).map(|_| int(rng.gen_range(-bound..=bound))).collect()
}

/// Rational point on the unit circle, `((1−s²)/(1+s²), 2s/(1+s²))`.
pub fn circle_point(s: &Rational) -> QVec {
    let d = Rational::one() + s * s;
    vec![(Rational::one() - s * s) / &d, (int(2) * s) / d]
}

/// Rational point on the unit sphere in `Rᵏ` by inverse stereographic
/// projection of a random rational point of `Rᵏ⁻¹`.
pub fn sphere_point(rng: &mut SampleRng, k: usize) -> QVec {
    let u: QVec = (0..k.saturating_sub(1)).map(|_| rat(rng.gen_range(-20..=20), rng.gen_range(1..=10))).collect();
    let norm_sq: Rational = u.iter().map(|x| x * x).sum();
    let d = &norm_sq + Rational::one();
    let mut p: QVec = u.iter().map(|x| int(2) * x / &d).collect();
    p.push((norm_sq - Rational::one()) / d);
    p
}

/// Invertible integer matrix with entries in `[−bound, bound]`.
pub fn invertible_matrix(rng: &mut SampleRng, n: usize, bound: i64) -> QMat {
    loop {
        let rows: Vec<QVec> = (0..n).map(|_| int_vec(rng, n, bound)).collect();
        let m = QMat::from_rows(rows).expect("square");
        if !m.determinant().expect("square").is_zero() {
            return m;
        }
    }
}

/// A convex polygon with `k` vertices: rational points on the unit circle at
/// distinct parameters, then a random invertible rational affine map.
pub fn random_polygon(rng: &mut SampleRng, k: usize) -> Polygon {
    loop {
        let mut params: Vec<Rational> = Vec::with_capacity(k);
        while params.len() < k {
            let s = rat(rng.gen_range(-40..=40), rng.gen_range(1..=8));
            if !params.contains(&s) {
                params.push(s);
            }
        }
        let pts: Vec<QVec> = params.iter().map(circle_point).collect();
        let linear = invertible_matrix(rng, 2, 3);
        let shift = [rat(rng.gen_range(-5..=5), 2), rat(rng.gen_range(-5..=5), 2)];
        let image: Vec<QVec> = pts
            .iter()
            .map(|p| {
                let w = linear.mul_vec(p).expect("2x2");
                vec![&w[0] + &shift[0], &w[1] + &shift[1]]
            })
            .collect();
        if let Ok(poly) = Polygon::from_points(&image) {
            if poly.len() == k {
                return poly;
            }
        }
    }
}

/// A proper polyhedral cone in dimension `dim` with at most `max_gens`
/// generators: a simplicial base plus random extra generators strictly
/// inside the half-space `x_last > 0`.
pub fn random_cone(rng: &mut SampleRng, dim: usize, max_gens: usize) -> PolyhedralCone {
    loop {
        let count = rng.gen_range(dim..=max_gens.max(dim));
        let gens: Vec<QVec> = (0..count)
            .map(|_| {
                let mut g = int_vec(rng, dim, 3);
                g[dim - 1] = int(rng.gen_range(1..=3));
                g
            })
            .collect();
        if let Ok(c) = PolyhedralCone::new(gens) {
            return c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_points_are_on_the_circle() {
        let p = circle_point(&rat(3, 7));
        assert_eq!(&p[0] * &p[0] + &p[1] * &p[1], Rational::one());
        let mut r = rng(5);
        let s = sphere_point(&mut r, 4);
        assert_eq!(s.iter().map(|x| x * x).sum::<Rational>(), Rational::one());
    }

    #[test]
    fn polygons_have_requested_size() {
        let mut r = rng(1);
        for k in 4..=7 {
            assert_eq!(random_polygon(&mut r, k).len(), k);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_cone(&mut rng(9), 4, 8);
        let b = random_cone(&mut rng(9), 4, 8);
        assert_eq!(a, b);
    }
}
