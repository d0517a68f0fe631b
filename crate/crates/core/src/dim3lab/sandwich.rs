//! Squeezing a polygon between a kite and the blunt square by an affine map.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cones::polygon::twice_signed_area;
use crate::cones::Polygon;
use crate::error::{Error, Result};
use crate::exactnum::lp::conic_combination;
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{int, rat, serde_rational, QVec, Rational};

/// `T_{a,b} = conv{(a,±1),(±1,b)}` with `a, b ∈ (−1,1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Kite {
    #[serde(with = "serde_rational")]
    pub a: Rational,
    #[serde(with = "serde_rational")]
    pub b: Rational,
}

impl Kite {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.abs() >= Rational::one() || b.abs() >= Rational::one() {
            return Err(Error::InvalidInput("kite parameters must lie in (-1, 1)".into()));
        }
        Ok(Kite { a, b })
    }

    pub fn polygon(&self) -> Polygon {
        Polygon::kite(&self.a, &self.b).expect("parameters checked on construction")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quadrilateral {
    /// Counterclockwise.
    #[serde(with = "serde_rational::vecvec")]
    pub vertices: Vec<QVec>,
    #[serde(with = "serde_rational")]
    pub area: Rational,
}

/// A square corner together with the image-polygon edge whose line cuts it off.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerExclusion {
    #[serde(with = "serde_rational::vec")]
    pub corner: QVec,
    pub edge: usize,
    /// Twice the signed area of (edge start, edge end, corner); negative.
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichResult {
    /// Linear part of the affine map `x ↦ Lx + t`.
    pub linear: QMat,
    #[serde(with = "serde_rational::vec")]
    pub translation: QVec,
    pub kite: Kite,
    /// The points `A, B, C, D` of the input polygon sent to
    /// `(a,1), (1,b), (a,−1), (−1,b)`.
    #[serde(with = "serde_rational::vecvec")]
    pub anchors: Vec<QVec>,
    pub image: Polygon,
    /// Coefficients writing each lifted kite vertex over the lifted vertices of `image`.
    #[serde(with = "serde_rational::vecvec")]
    pub kite_evidence: Vec<QVec>,
    pub corner_evidence: Vec<CornerExclusion>,
}

impl SandwichResult {
    /// The map on the cone over the plane, `[[L, t], [0, 0, 1]]`.
    pub fn lifted(&self) -> QMat {
        let l = &self.linear;
        QMat::from_rows(vec![
            vec![l[(0, 0)].clone(), l[(0, 1)].clone(), self.translation[0].clone()],
            vec![l[(1, 0)].clone(), l[(1, 1)].clone(), self.translation[1].clone()],
            vec![Rational::zero(), Rational::zero(), Rational::one()],
        ])
        .expect("3x3")
    }

    /// Re-checks every stored claim exactly.
    pub fn verify(&self, source: &Polygon) -> Result<bool> {
        let image = source.map_affine(&self.linear, &self.translation)?;
        if image != self.image {
            return Ok(false);
        }
        let kite = self.kite.polygon();
        let lifted = image.lifted();
        for (v, coeffs) in kite.lifted().iter().zip(&self.kite_evidence) {
            if coeffs.len() != lifted.len() || coeffs.iter().any(Signed::is_negative) {
                return Ok(false);
            }
            let mut sum = vec![Rational::zero(); 3];
            for (c, g) in coeffs.iter().zip(&lifted) {
                for (s, x) in sum.iter_mut().zip(g) {
                    *s += c * x;
                }
            }
            if &sum != v {
                return Ok(false);
            }
        }
        let one = Rational::one();
        if image.vertices().iter().any(|v| v[0].abs() > one || v[1].abs() > one) {
            return Ok(false);
        }
        let corners = square_corners();
        if self.corner_evidence.len() != corners.len() {
            return Ok(false);
        }
        let verts = image.vertices();
        for (e, corner) in self.corner_evidence.iter().zip(&corners) {
            let n = verts.len();
            if &e.corner != corner || e.edge >= n {
                return Ok(false);
            }
            let value = crate::cones::polygon::cross(&verts[e.edge], &verts[(e.edge + 1) % n], corner);
            if value != e.value || !value.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn square_corners() -> Vec<QVec> {
    [(1, 1), (-1, 1), (-1, -1), (1, -1)].iter().map(|&(x, y)| vec![int(x), int(y)]).collect()
}

/// All area-maximal quadruples `i<j<k<l` of `points` (taken in convex cyclic
/// order), lexicographically sorted, with twice the maximal area.
fn max_area_quadruples(points: &[QVec]) -> (Rational, Vec<[usize; 4]>) {
    let n = points.len();
    let mut best = Rational::zero();
    let mut winners = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let quad = [points[i].clone(), points[j].clone(), points[k].clone(), points[l].clone()];
                    let area = twice_signed_area(&quad);
                    if area > best {
                        best = area.clone();
                        winners.clear();
                    }
                    if area == best && area.is_positive() {
                        winners.push([i, j, k, l]);
                    }
                }
            }
        }
    }
    (best, winners)
}

/// A quadrilateral of maximal area inscribed in the polygon, vertices taken
/// among the polygon's vertices; the lexicographically first one on ties.
pub fn max_area_quadrilateral(p: &Polygon) -> Result<Quadrilateral> {
    if p.is_triangle() {
        return Err(Error::Classical { which: "polygon".into(), basis: p.lifted() });
    }
    let (twice, winners) = max_area_quadruples(p.vertices());
    let q = winners.first().ok_or_else(|| Error::Internal("no quadrilateral found".into()))?;
    Ok(Quadrilateral { vertices: q.iter().map(|&i| p.vertices()[i].clone()).collect(), area: twice * rat(1, 2) })
}

/// Maps the parallelogram cut out by the tangent lines parallel to the
/// diagonals of `quad` onto `[−1,1]²`, and keeps the result if all four
/// corners end up outside the image of `p`.
fn try_quadrilateral(p: &Polygon, quad: &[QVec]) -> Result<Option<SandwichResult>> {
    // A is the top-most anchor (then left-most); B precedes it counterclockwise.
    let top = (0..4)
        .max_by(|&i, &j| quad[i][1].cmp(&quad[j][1]).then_with(|| quad[j][0].cmp(&quad[i][0])))
        .expect("four points");
    let mut labels = [quad[top].clone(), quad[(top + 3) % 4].clone(), quad[(top + 2) % 4].clone(), quad[(top + 1) % 4].clone()];
    let mut result = None;
    for _ in 0..2 {
        let [a_pt, b_pt, c_pt, d_pt] = &labels;
        let diag = QMat::from_cols(&[sub(a_pt, c_pt), sub(b_pt, d_pt)])?;
        let target = QMat::from_ints(&[&[0, 2], &[2, 0]]);
        let linear = target.matmul(&diag.inverse()?)?;
        if linear.determinant()?.is_positive() {
            result = Some(linear);
            break;
        }
        labels.swap(1, 3);
    }
    let linear = result.ok_or_else(|| Error::Internal("no orientation-preserving labeling".into()))?;
    let [a_pt, b_pt, c_pt, d_pt] = &labels;
    let la = linear.mul_vec(a_pt)?;
    let lb = linear.mul_vec(b_pt)?;
    let translation = vec![Rational::one() - &lb[0], Rational::one() - &la[1]];
    let a = &la[0] + &translation[0];
    let b = &lb[1] + &translation[1];
    let one = Rational::one();
    if a.abs() >= one || b.abs() >= one {
        return Ok(None);
    }
    let image = p.map_affine(&linear, &translation)?;
    let mut corner_evidence = Vec::with_capacity(4);
    for corner in square_corners() {
        let Some(edge) = image.separating_edge(&corner) else { return Ok(None) };
        let n = image.len();
        let value = crate::cones::polygon::cross(&image.vertices()[edge], &image.vertices()[(edge + 1) % n], &corner);
        corner_evidence.push(CornerExclusion { corner, edge, value });
    }
    let kite = Kite::new(a, b)?;
    let lifted = image.lifted();
    let mut kite_evidence = Vec::with_capacity(4);
    for v in kite.polygon().lifted() {
        match conic_combination(&lifted, &v)? {
            Ok(c) => kite_evidence.push(c),
            Err(_) => return Err(Error::Internal("kite vertex outside the sandwiched polygon".into())),
        }
    }
    let anchors = vec![a_pt.clone(), b_pt.clone(), c_pt.clone(), d_pt.clone()];
    let result = SandwichResult { linear, translation, kite, anchors, image, kite_evidence, corner_evidence };
    if !result.verify(p)? {
        return Err(Error::Internal("sandwich evidence does not replay".into()));
    }
    Ok(Some(result))
}

fn sub(x: &[Rational], y: &[Rational]) -> QVec {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Finds an affine map `Ψ` with `T_{a,b} ⊆ Ψ(K) ⊆ [−1,1]²` and no corner of
/// the square in `Ψ(K)`.
///
/// Area-maximal quadrilaterals on the polygon's vertices are tried first. If
/// none of them keeps the corners out, edge midpoints join the candidate
/// points and area-maximal quadrilaterals using as few polygon vertices as
/// possible are tried next.
pub fn sandwich(p: &Polygon) -> Result<SandwichResult> {
    if p.is_triangle() {
        return Err(Error::Classical { which: "polygon".into(), basis: p.lifted() });
    }
    let verts = p.vertices();
    let (best, winners) = max_area_quadruples(verts);
    for q in &winners {
        let quad: Vec<QVec> = q.iter().map(|&i| verts[i].clone()).collect();
        if let Some(r) = try_quadrilateral(p, &quad)? {
            return Ok(r);
        }
    }
    // Interleave vertices (even positions) with edge midpoints (odd positions).
    let n = verts.len();
    let half = rat(1, 2);
    let mut candidates = Vec::with_capacity(2 * n);
    for i in 0..n {
        candidates.push(verts[i].clone());
        let next = &verts[(i + 1) % n];
        candidates.push(vec![(&verts[i][0] + &next[0]) * &half, (&verts[i][1] + &next[1]) * &half]);
    }
    let (best_ext, mut quads) = max_area_quadruples(&candidates);
    if best_ext != best {
        return Err(Error::Internal("edge midpoints changed the maximal area".into()));
    }
    quads.sort_by_key(|q| (q.iter().filter(|&&i| i % 2 == 0).count(), *q));
    for q in &quads {
        let quad: Vec<QVec> = q.iter().map(|&i| candidates[i].clone()).collect();
        if let Some(r) = try_quadrilateral(p, &quad)? {
            return Ok(r);
        }
    }
    Err(Error::Verification("no area-maximal quadrilateral keeps the square corners out".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::qvec;

    #[test]
    fn square_maps_to_diamond() {
        let r = sandwich(&Polygon::square()).unwrap();
        assert_eq!((r.kite.a.clone(), r.kite.b.clone()), (int(0), int(0)));
        assert_eq!(r.image, Polygon::diamond());
        assert!(r.verify(&Polygon::square()).unwrap());
    }

    #[test]
    fn diamond_is_already_in_position() {
        let r = sandwich(&Polygon::diamond()).unwrap();
        assert_eq!(r.linear, QMat::identity(2));
        assert_eq!(r.translation, qvec(&[0, 0]));
        assert_eq!(r.image, Polygon::diamond());
    }

    #[test]
    fn max_area_examples() {
        assert_eq!(max_area_quadrilateral(&Polygon::square()).unwrap().area, int(4));
        assert_eq!(max_area_quadrilateral(&Polygon::diamond()).unwrap().area, int(2));
        assert!(max_area_quadrilateral(&Polygon::triangle()).is_err());
    }

    #[test]
    fn hexagon_quadrilateral_matches_subset_hulls() {
        let hex = Polygon::hexagon();
        let q = max_area_quadrilateral(&hex).unwrap();
        // Independent oracle: hull area of every 4-subset.
        let v = hex.vertices();
        let mut best = Rational::zero();
        for mask in 0u32..64 {
            if mask.count_ones() != 4 {
                continue;
            }
            let pts: Vec<QVec> = (0..6).filter(|i| mask & (1 << i) != 0).map(|i| v[i].clone()).collect();
            best = best.max(Polygon::from_points(&pts).unwrap().twice_area() * rat(1, 2));
        }
        assert_eq!(q.area, best);
        assert_eq!(q.area, int(2));
    }

    #[test]
    fn genuine_pentagon() {
        let pent = Polygon::new(vec![qvec(&[2, 0]), vec![rat(3, 2), rat(3, 2)], qvec(&[0, 2]), qvec(&[-2, 0]), qvec(&[0, -2])]).unwrap();
        let r = sandwich(&pent).unwrap();
        assert!(r.verify(&pent).unwrap());
    }

    #[test]
    fn tampered_evidence_fails() {
        let mut r = sandwich(&Polygon::square()).unwrap();
        r.corner_evidence[0].value = int(-7);
        assert!(!r.verify(&Polygon::square()).unwrap());
    }
}
