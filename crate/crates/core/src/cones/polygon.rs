//! Convex polygons with rational vertices, used as bases of 3-dimensional cones.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{int, rat, QVec, Rational};

/// Twice the signed area of the triangle `(o, a, b)`; positive for a left turn.
pub fn cross(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Twice the signed area of a closed vertex cycle (shoelace formula).
pub fn twice_signed_area(points: &[QVec]) -> Rational {
    let n = points.len();
    let mut s = Rational::zero();
    for i in 0..n {
        let (p, q) = (&points[i], &points[(i + 1) % n]);
        s += &p[0] * &q[1] - &q[0] * &p[1];
    }
    s
}

/// A strictly convex polygon with vertices in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polygon {
    #[serde(with = "crate::exactnum::rational::serde_rational::vecvec")]
    vertices: Vec<QVec>,
}

impl Polygon {
    /// Accepts vertices in convex position in either orientation; stores them
    /// counterclockwise. Collinear or repeated vertices are rejected.
    pub fn new(vertices: Vec<QVec>) -> Result<Self> {
        if vertices.iter().any(|v| v.len() != 2) {
            return Err(Error::Dimension("polygon vertices must have two coordinates".into()));
        }
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidCone(format!("a polygon needs at least 3 vertices, got {n}")));
        }
        let mut vertices = vertices;
        if twice_signed_area(&vertices).is_negative() {
            vertices.reverse();
        }
        // Strictly convex and counterclockwise iff every other vertex lies
        // strictly left of every edge line; this also rules out star shapes.
        for i in 0..n {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
            for (j, p) in vertices.iter().enumerate() {
                if j != i && j != (i + 1) % n && !cross(a, b, p).is_positive() {
                    return Err(Error::InvalidCone("polygon vertices are not in strictly convex position".into()));
                }
            }
        }
        Ok(Polygon { vertices })
    }

    /// Convex hull of arbitrary points (Andrew's monotone chain). Points on
    /// hull edges are dropped.
    pub fn from_points(points: &[QVec]) -> Result<Self> {
        if points.iter().any(|v| v.len() != 2) {
            return Err(Error::Dimension("polygon points must have two coordinates".into()));
        }
        let mut pts: Vec<QVec> = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidCone("fewer than 3 distinct points".into()));
        }
        let mut lower: Vec<QVec> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<QVec> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self::new(lower)
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_triangle(&self) -> bool {
        self.vertices.len() == 3
    }

    pub fn twice_area(&self) -> Rational {
        twice_signed_area(&self.vertices)
    }

    /// Generators `(x, y, 1)` of the cone over the polygon.
    pub fn lifted(&self) -> Vec<QVec> {
        self.vertices.iter().map(|v| vec![v[0].clone(), v[1].clone(), Rational::one()]).collect()
    }

    /// Closed membership, decided by the edge orientations.
    pub fn contains(&self, p: &[Rational]) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    /// Index of an edge `(i, i+1)` whose line strictly separates `p` from the
    /// polygon, if any.
    pub fn separating_edge(&self, p: &[Rational]) -> Option<usize> {
        let n = self.vertices.len();
        (0..n).find(|&i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    /// Image under `x ↦ L x + t`. An orientation-reversing map is fine; the
    /// result is re-oriented counterclockwise.
    pub fn map_affine(&self, linear: &QMat, translation: &[Rational]) -> Result<Polygon> {
        if linear.shape() != (2, 2) || translation.len() != 2 {
            return Err(Error::Dimension("affine map on the plane needs a 2x2 matrix and a 2-vector".into()));
        }
        if linear.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        let image = self
            .vertices
            .iter()
            .map(|v| {
                let w = linear.mul_vec(v)?;
                Ok(vec![&w[0] + &translation[0], &w[1] + &translation[1]])
            })
            .collect::<Result<Vec<_>>>()?;
        Polygon::new(image)
    }

    /// `[−1,1]²`.
    pub fn square() -> Polygon {
        Polygon { vertices: pts(&[(1, 1), (-1, 1), (-1, -1), (1, -1)]) }
    }

    /// `conv{(±1,0),(0,±1)}`.
    pub fn diamond() -> Polygon {
        Polygon { vertices: pts(&[(1, 0), (0, 1), (-1, 0), (0, -1)]) }
    }

    pub fn triangle() -> Polygon {
        Polygon { vertices: pts(&[(0, 0), (1, 0), (0, 1)]) }
    }

    /// A centrally symmetric hexagon with rational vertices.
    pub fn hexagon() -> Polygon {
        let h = rat(1, 2);
        let v = |x: Rational, y: i64| vec![x, int(y)];
        Polygon {
            vertices: vec![v(int(1), 0), v(h.clone(), 1), v(-h.clone(), 1), v(int(-1), 0), v(-h.clone(), -1), v(h, -1)],
        }
    }

    /// `conv{(a,±1),(±1,b)}` for `a, b ∈ (−1,1)`.
    pub fn kite(a: &Rational, b: &Rational) -> Result<Polygon> {
        let one = Rational::one();
        if a.abs() >= one || b.abs() >= one {
            return Err(Error::InvalidInput("kite parameters must lie in (-1, 1)".into()));
        }
        Polygon::new(vec![
            vec![one.clone(), b.clone()],
            vec![a.clone(), one.clone()],
            vec![-one.clone(), b.clone()],
            vec![a.clone(), -one],
        ])
    }
}

fn pts(list: &[(i64, i64)]) -> Vec<QVec> {
    list.iter().map(|&(x, y)| vec![int(x), int(y)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::qvec;

    #[test]
    fn hull_drops_interior_and_edge_points() {
        let p = Polygon::from_points(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[1, 1]), qvec(&[2, 2]), qvec(&[0, 2]), qvec(&[1, 0])]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.twice_area(), int(8));
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let mut v = Polygon::square().vertices().to_vec();
        v.reverse();
        let p = Polygon::new(v).unwrap();
        assert!(p.twice_area().is_positive());
    }

    #[test]
    fn rejects_non_convex() {
        let v = vec![qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[1, 1]), qvec(&[2, 2]), qvec(&[0, 2])];
        assert!(Polygon::new(v).is_err());
        let v = vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[2, 0]), qvec(&[0, 1])];
        assert!(Polygon::new(v).is_err());
    }

    #[test]
    fn rejects_double_winding() {
        // A pentagram visits the vertices of a convex pentagon in the wrong order.
        let star = vec![qvec(&[0, 10]), qvec(&[6, -8]), qvec(&[-10, 3]), qvec(&[10, 3]), qvec(&[-6, -8])];
        assert!(Polygon::new(star).is_err());
    }

    #[test]
    fn kite_membership() {
        let k = Polygon::kite(&Rational::zero(), &Rational::zero()).unwrap();
        assert_eq!(k, Polygon::new(Polygon::diamond().vertices().to_vec()).unwrap().clone());
        assert!(k.contains(&[rat(1, 2), rat(1, 2)]));
        assert!(!k.contains(&[rat(1, 2), rat(2, 3)]));
        assert_eq!(k.separating_edge(&[int(1), int(1)]), Some(0));
    }

    #[test]
    fn standard_areas() {
        assert_eq!(Polygon::square().twice_area(), int(8));
        assert_eq!(Polygon::diamond().twice_area(), int(4));
        assert_eq!(Polygon::hexagon().twice_area(), int(6));
    }
}
