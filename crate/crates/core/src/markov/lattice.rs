use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{qstr, Q};
use crate::error::{domain, Result};

/// A point (or vector) of `Q^2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QPoint {
    #[serde(with = "qstr::rational")]
    pub x: Q,
    #[serde(with = "qstr::rational")]
    pub y: Q,
}

impl QPoint {
    pub fn new(x: Q, y: Q) -> Self {
        QPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        QPoint::new(Q::from_integer(x.into()), Q::from_integer(y.into()))
    }

    pub fn origin() -> Self {
        QPoint::new(Q::zero(), Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, s: &Q) -> QPoint {
        QPoint::new(&self.x * s, &self.y * s)
    }

    /// `det(self, other)`.
    pub fn cross(&self, other: &QPoint) -> Q {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn to_f64(&self) -> [f64; 2] {
        use num_traits::ToPrimitive;
        [self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN)]
    }
}

impl<'a> Sub<&'a QPoint> for &'a QPoint {
    type Output = QPoint;
    fn sub(self, rhs: &'a QPoint) -> QPoint {
        QPoint::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl<'a> Add<&'a QPoint> for &'a QPoint {
    type Output = QPoint;
    fn add(self, rhs: &'a QPoint) -> QPoint {
        QPoint::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

/// Split a nonzero rational vector `w` as `gamma * v` with `v` primitive in `Z^2`
/// and `gamma > 0`.
pub fn primitive_direction(w: &QPoint) -> Result<([BigInt; 2], Q)> {
    if w.is_zero() {
        return domain("zero vector has no primitive direction");
    }
    let den = w.x.denom().lcm(w.y.denom());
    let xi = w.x.numer() * (&den / w.x.denom());
    let yi = w.y.numer() * (&den / w.y.denom());
    let g = xi.gcd(&yi);
    Ok(([&xi / &g, &yi / &g], BigRational::new(g, den)))
}

/// Lattice length of the segment `p -> q`.
pub fn affine_length(p: &QPoint, q: &QPoint) -> Result<Q> {
    if p == q {
        return domain("degenerate segment: endpoints coincide");
    }
    Ok(primitive_direction(&(q - p))?.1)
}

/// `|det(v, u)|` where `v` is the primitive direction of the line and `p + u`
/// lies on it.
pub fn affine_distance(p: &QPoint, line_point: &QPoint, direction: &QPoint) -> Result<Q> {
    let ([vx, vy], _) = primitive_direction(direction)?;
    let v = QPoint::new(Q::from_integer(vx), Q::from_integer(vy));
    Ok(v.cross(&(line_point - p)).abs())
}

/// A matrix in `SL(2, Z)` sending the primitive vector `v` to `(1, 0)`.
pub fn unimodular_to_e1(v: &[BigInt; 2]) -> Result<[[BigInt; 2]; 2]> {
    let ext = v[0].extended_gcd(&v[1]);
    if !ext.gcd.is_one() {
        return domain(format!("({}, {}) is not primitive", v[0], v[1]));
    }
    // s*v0 + t*v1 = 1
    Ok([[ext.x, ext.y], [-&v[1], v[0].clone()]])
}

/// An element of `Aff(2; Z)` with rational translation: `p -> A p + t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntAffineMap2 {
    #[serde(with = "qstr::integer_matrix2")]
    matrix: [[BigInt; 2]; 2],
    translation: QPoint,
}

fn det2(m: &[[BigInt; 2]; 2]) -> BigInt {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

fn mul2(a: &[[BigInt; 2]; 2], b: &[[BigInt; 2]; 2]) -> [[BigInt; 2]; 2] {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn apply_linear(m: &[[BigInt; 2]; 2], p: &QPoint) -> QPoint {
    let q = |n: &BigInt| Q::from_integer(n.clone());
    QPoint::new(&q(&m[0][0]) * &p.x + &q(&m[0][1]) * &p.y, &q(&m[1][0]) * &p.x + &q(&m[1][1]) * &p.y)
}

impl IntAffineMap2 {
    pub fn new(matrix: [[BigInt; 2]; 2], translation: QPoint) -> Result<Self> {
        let d = det2(&matrix);
        if d.abs() != BigInt::one() {
            return domain(format!("matrix determinant must be +-1, got {d}"));
        }
        Ok(IntAffineMap2 { matrix, translation })
    }

    pub fn from_i64(m: [[i64; 2]; 2], t: QPoint) -> Result<Self> {
        Self::new(m.map(|r| r.map(BigInt::from)), t)
    }

    pub fn identity() -> Self {
        IntAffineMap2 {
            matrix: [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]],
            translation: QPoint::origin(),
        }
    }

    pub fn translation_by(t: QPoint) -> Self {
        IntAffineMap2 { translation: t, ..Self::identity() }
    }

    pub fn matrix(&self) -> &[[BigInt; 2]; 2] {
        &self.matrix
    }

    pub fn translation(&self) -> &QPoint {
        &self.translation
    }

    pub fn det(&self) -> BigInt {
        det2(&self.matrix)
    }

    pub fn apply(&self, p: &QPoint) -> QPoint {
        &apply_linear(&self.matrix, p) + &self.translation
    }

    /// Linear part only, for direction vectors.
    pub fn apply_linear(&self, v: &QPoint) -> QPoint {
        apply_linear(&self.matrix, v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IntAffineMap2) -> IntAffineMap2 {
        IntAffineMap2 {
            matrix: mul2(&self.matrix, &other.matrix),
            translation: self.apply(&other.translation),
        }
    }

    pub fn inverse(&self) -> IntAffineMap2 {
        let d = self.det();
        let m = &self.matrix;
        // adj(A) / det(A) with det = +-1
        let inv = [[&m[1][1] * &d, -&m[0][1] * &d], [-&m[1][0] * &d, &m[0][0] * &d]];
        let t = apply_linear(&inv, &self.translation);
        IntAffineMap2 { matrix: inv, translation: QPoint::new(-t.x, -t.y) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn affine_length_examples() {
        let o = QPoint::origin();
        assert_eq!(affine_length(&o, &QPoint::from_ints(6, 4)).unwrap(), q(2, 1));
        assert_eq!(affine_length(&o, &QPoint::from_ints(1, 0)).unwrap(), q(1, 1));
        assert_eq!(affine_length(&o, &QPoint::new(q(1, 2), q(1, 2))).unwrap(), q(1, 2));
        assert!(affine_length(&o, &o).is_err());
    }

    #[test]
    fn primitive_direction_of_mixed_denominators() {
        let (v, g) = primitive_direction(&QPoint::new(q(2, 3), q(-4, 9))).unwrap();
        assert_eq!(v, [BigInt::from(3), BigInt::from(-2)]);
        assert_eq!(g, q(2, 9));
    }

    #[test]
    fn affine_distance_examples() {
        let d = affine_distance(&QPoint::from_ints(0, 1), &QPoint::origin(), &QPoint::from_ints(1, 0)).unwrap();
        assert_eq!(d, q(1, 1));
        // the same line given by a non-primitive direction and another base point
        let d2 = affine_distance(&QPoint::from_ints(0, 1), &QPoint::from_ints(5, 0), &QPoint::from_ints(-7, 0)).unwrap();
        assert_eq!(d2, q(1, 1));
        assert!(affine_distance(&QPoint::origin(), &QPoint::origin(), &QPoint::origin()).is_err());
    }

    #[test]
    fn opposite_edge_distance_of_standard_simplex() {
        let alpha = q(7, 3);
        let a = QPoint::new(alpha.clone(), q(0, 1));
        let b = QPoint::new(q(0, 1), alpha.clone());
        let d = affine_distance(&QPoint::origin(), &a, &(&b - &a)).unwrap();
        assert_eq!(d, alpha);
    }

    #[test]
    fn unimodular_sends_primitive_to_e1() {
        for v in [[3i64, 2], [-5, 7], [0, 1], [0, -1], [1, 0], [-1, 0], [12, -35]] {
            let vb = [BigInt::from(v[0]), BigInt::from(v[1])];
            let m = unimodular_to_e1(&vb).unwrap();
            assert_eq!(det2(&m), BigInt::one());
            let img = apply_linear(&m, &QPoint::from_ints(v[0], v[1]));
            assert_eq!(img, QPoint::from_ints(1, 0));
        }
        assert!(unimodular_to_e1(&[BigInt::from(2), BigInt::from(4)]).is_err());
    }

    #[test]
    fn map_group_laws() {
        let m = IntAffineMap2::from_i64([[2, 1], [1, 1]], QPoint::new(q(1, 3), q(-2, 5))).unwrap();
        let n = IntAffineMap2::from_i64([[0, 1], [1, 0]], QPoint::from_ints(4, 0)).unwrap();
        let p = QPoint::new(q(5, 7), q(-1, 2));
        assert_eq!(m.inverse().apply(&m.apply(&p)), p);
        assert_eq!(m.compose(&n).apply(&p), m.apply(&n.apply(&p)));
        assert_eq!(n.compose(&n.inverse()), IntAffineMap2::identity());
        assert!(IntAffineMap2::from_i64([[2, 0], [0, 1]], QPoint::origin()).is_err());
    }
}
