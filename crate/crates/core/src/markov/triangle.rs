use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::lattice::{affine_distance, affine_length, IntAffineMap2, QPoint};
use super::triple::MarkovTriple;
use super::{qstr, Q};
use crate::error::{domain, Error, Result};

/// A non-degenerate triangle with vertices in `Q^2`.
///
/// Edge `i` is the edge opposite vertex `i`, running from `v[i+1]` to `v[i+2]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalTriangle {
    vertices: [QPoint; 3],
}

impl RationalTriangle {
    pub fn new(v0: QPoint, v1: QPoint, v2: QPoint) -> Result<Self> {
        if (&v1 - &v0).cross(&(&v2 - &v0)).is_zero() {
            return domain("degenerate triangle: vertices are collinear");
        }
        Ok(RationalTriangle { vertices: [v0, v1, v2] })
    }

    pub fn vertices(&self) -> &[QPoint; 3] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &QPoint {
        &self.vertices[i % 3]
    }

    /// Endpoints of the edge opposite vertex `i`.
    pub fn edge(&self, i: usize) -> (&QPoint, &QPoint) {
        (&self.vertices[(i + 1) % 3], &self.vertices[(i + 2) % 3])
    }

    pub fn area(&self) -> Q {
        let [a, b, c] = &self.vertices;
        (b - a).cross(&(c - a)).abs() / Q::from_integer(2.into())
    }

    pub fn edge_affine_length(&self, i: usize) -> Q {
        let (p, q) = self.edge(i);
        affine_length(p, q).expect("non-degenerate triangle has distinct vertices")
    }

    pub fn edge_affine_lengths(&self) -> [Q; 3] {
        [0, 1, 2].map(|i| self.edge_affine_length(i))
    }

    pub fn affine_perimeter(&self) -> Q {
        self.edge_affine_lengths().into_iter().fold(Q::zero(), |acc, l| acc + l)
    }

    /// `d_aff(v_i, E_i)`.
    pub fn affine_height(&self, i: usize) -> Q {
        let (p, q) = self.edge(i);
        affine_distance(self.vertex(i), p, &(q - p)).expect("edge direction is nonzero")
    }

    pub fn map(&self, m: &IntAffineMap2) -> RationalTriangle {
        RationalTriangle { vertices: self.vertices.clone().map(|v| m.apply(&v)) }
    }

    pub fn scale(&self, s: &Q) -> Result<RationalTriangle> {
        let [a, b, c] = &self.vertices;
        RationalTriangle::new(a.scale(s), b.scale(s), c.scale(s))
    }

    pub fn contains_vertex_set(&self, other: &RationalTriangle) -> bool {
        let mut a = self.vertices.clone();
        let mut b = other.vertices.clone();
        a.sort();
        b.sort();
        a == b
    }
}

/// Integral affine embedding `x -> A x + t` of `R^2` into `R^3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartEmbedding3 {
    #[serde(with = "qstr::integer_matrix32")]
    pub matrix: [[BigInt; 2]; 3],
    #[serde(with = "qstr::rational_array3")]
    pub translation: [Q; 3],
    /// Which slot of the triple plays the role of `a`.
    pub vertex_slot: usize,
    #[serde(with = "qstr::integer")]
    pub q: BigInt,
    /// `(a, b, c)` after relabelling so that the chosen slot comes first.
    #[serde(with = "qstr::integer_array")]
    pub roles: [BigInt; 3],
}

impl ChartEmbedding3 {
    /// `A(Z^2) = A(R^2) ∩ Z^3`, i.e. the 2x2 minors of `A` are coprime.
    pub fn is_lattice_saturating(&self) -> bool {
        let m = &self.matrix;
        let minor = |i: usize, j: usize| &m[i][0] * &m[j][1] - &m[i][1] * &m[j][0];
        let g = minor(0, 1).gcd(&minor(0, 2)).gcd(&minor(1, 2));
        g.is_one()
    }

    pub fn apply(&self, p: &QPoint) -> [Q; 3] {
        let q = |n: &BigInt| Q::from_integer(n.clone());
        [0, 1, 2].map(|r| &q(&self.matrix[r][0]) * &p.x + &q(&self.matrix[r][1]) * &p.y + &self.translation[r])
    }

    /// Preimage of a point of the image plane.
    pub fn pull_back(&self, y: &[Q; 3]) -> Result<QPoint> {
        let q = |n: &BigInt| Q::from_integer(n.clone());
        let rhs: Vec<Q> = (0..3).map(|r| &y[r] - &self.translation[r]).collect();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (a, b, c, d) = (q(&self.matrix[i][0]), q(&self.matrix[i][1]), q(&self.matrix[j][0]), q(&self.matrix[j][1]));
            let det = &a * &d - &b * &c;
            if det.is_zero() {
                continue;
            }
            let x0 = (&d * &rhs[i] - &b * &rhs[j]) / &det;
            let x1 = (&a * &rhs[j] - &c * &rhs[i]) / &det;
            let p = QPoint::new(x0, x1);
            if self.apply(&p) != *y {
                return Err(Error::Domain("point is not in the image plane of the chart".into()));
            }
            return Ok(p);
        }
        Err(Error::Internal("chart matrix has rank < 2".into()))
    }

    /// The defining plane `a^2 y_1 + b^2 y_2 + c^2 y_3 = a^2 b^2 c^2` of the
    /// image, in the chart's role order.
    pub fn plane_contains(&self, y: &[Q; 3]) -> bool {
        let [a, b, c] = &self.roles;
        let w = [a * a, b * b, c * c].map(Q::from_integer);
        let lhs = &w[0] * &y[0] + &w[1] * &y[1] + &w[2] * &y[2];
        lhs == Q::from_integer(a * a * b * b * c * c)
    }
}

/// Chart `Phi_{a,q}` of the plane carrying the weighted-projective moment
/// polytope, with the weight of `vertex_slot` playing the role of `a^2`.
///
/// `q` is the smallest positive residue with `b q = 3c (mod a)`, and `q = 1`
/// when `a = 1`.
pub fn chart_embedding(t: &MarkovTriple, vertex_slot: usize) -> Result<ChartEmbedding3> {
    if vertex_slot > 2 {
        return domain(format!("vertex slot must be 0, 1 or 2, got {vertex_slot}"));
    }
    let e = t.entries();
    let a = e[vertex_slot].clone();
    let b = e[(vertex_slot + 1) % 3].clone();
    let c = e[(vertex_slot + 2) % 3].clone();
    let three_c = BigInt::from(3) * &c;
    let q = if a.is_one() {
        BigInt::one()
    } else {
        let ext = b.extended_gcd(&a);
        if !ext.gcd.is_one() {
            return Err(Error::Internal(format!("b = {b} is not invertible mod a = {a}")));
        }
        let r = (ext.x * &three_c).mod_floor(&a);
        if r.is_zero() {
            a.clone()
        } else {
            r
        }
    };
    let top = &b * (&b * &q - &three_c);
    if !(&top % &a).is_zero() {
        return Err(Error::Internal(format!("b(bq-3c)/a not integral for a={a}, b={b}, c={c}, q={q}")));
    }
    let matrix = [
        [-(&b * &b), BigInt::one() + &top / &a],
        [&a * &a, BigInt::one() - &a * &q],
        [BigInt::zero(), BigInt::one()],
    ];
    let translation = [Q::from_integer(&b * &b * &c * &c), Q::zero(), Q::zero()];
    Ok(ChartEmbedding3 { matrix, translation, vertex_slot, q, roles: [a, b, c] })
}

/// A Markov triangle together with the data used to build it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovTriangle {
    pub triple: MarkovTriple,
    #[serde(with = "qstr::rational")]
    pub alpha: Q,
    pub realization: RationalTriangle,
    #[serde(with = "qstr::integer")]
    pub q_chart: BigInt,
    pub chart_slot: usize,
    /// Weight (`a^2`, `b^2` or `c^2`) of each edge, indexed like the edges
    /// of `realization`.
    #[serde(with = "qstr::integer_array")]
    pub edge_weights: [BigInt; 3],
}

impl MarkovTriangle {
    /// `alpha / (abc)`.
    pub fn lambda(&self) -> Q {
        &self.alpha / Q::from_integer(self.triple.product())
    }
}

/// The Markov triangle `Δ_{a,b,c}(alpha)` realized through the chart at slot 0.
pub fn build_triangle(t: &MarkovTriple, alpha: &Q) -> Result<MarkovTriangle> {
    build_triangle_with_chart(t, alpha, 0)
}

/// Pull the vertices of `{a^2 y1 + b^2 y2 + c^2 y3 = a^2 b^2 c^2} ∩ R^3_{>=0}`
/// back through the chosen chart and rescale from `abc` to `alpha`.
pub fn build_triangle_with_chart(t: &MarkovTriple, alpha: &Q, vertex_slot: usize) -> Result<MarkovTriangle> {
    if !alpha.is_positive() {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let chart = chart_embedding(t, vertex_slot)?;
    let [a, b, c] = &chart.roles;
    let z = Q::zero;
    let qi = |n: BigInt| Q::from_integer(n);
    let corners = [
        [qi(b * b * c * c), z(), z()],
        [z(), qi(a * a * c * c), z()],
        [z(), z(), qi(a * a * b * b)],
    ];
    let pre = corners.iter().map(|y| chart.pull_back(y)).collect::<Result<Vec<_>>>()?;
    let scale = alpha / Q::from_integer(t.product());
    let [v0, v1, v2]: [QPoint; 3] = pre.try_into().expect("three corners");
    let realization = RationalTriangle::new(v0, v1, v2)?.scale(&scale)?;
    // Edge opposite the corner of weight a^2 has weight a^2, and so on.
    let edge_weights = [a * a, b * b, c * c];
    let tri = MarkovTriangle {
        triple: t.clone(),
        alpha: alpha.clone(),
        realization,
        q_chart: chart.q.clone(),
        chart_slot: vertex_slot,
        edge_weights,
    };
    let lambda = tri.lambda();
    for i in 0..3 {
        if tri.realization.edge_affine_length(i) != &lambda * Q::from_integer(tri.edge_weights[i].clone()) {
            return Err(Error::Internal(format!("edge {i} of Δ{} has the wrong affine length", t)));
        }
    }
    Ok(tri)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn triple(a: i64, b: i64, c: i64) -> MarkovTriple {
        MarkovTriple::new(a, b, c).unwrap()
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let r = RationalTriangle::new(QPoint::from_ints(0, 0), QPoint::from_ints(1, 1), QPoint::from_ints(3, 3));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn chart_of_root_is_standard_plane() {
        let chart = chart_embedding(&MarkovTriple::root(), 0).unwrap();
        assert_eq!(chart.q, BigInt::one());
        assert!(chart.is_lattice_saturating());
        let m = chart.matrix.clone().map(|r| r.map(|v| i64::try_from(v).unwrap()));
        assert_eq!(m, [[-1, -1], [1, 0], [0, 1]]);
    }

    #[test]
    fn chart_of_125_at_a_equals_1_is_integral() {
        let chart = chart_embedding(&triple(1, 2, 5), 0).unwrap();
        assert_eq!(chart.q, BigInt::one());
        assert!(chart.is_lattice_saturating());
        // 1 + b(bq - 3c)/a = 1 + 2(2 - 15) = -25
        assert_eq!(chart.matrix[0][1], BigInt::from(-25));
    }

    #[test]
    fn q_solves_congruence_for_every_slot() {
        for t in [triple(2, 5, 29), triple(5, 13, 194), triple(13, 34, 1325)] {
            for slot in 0..3 {
                let ch = chart_embedding(&t, slot).unwrap();
                let [a, b, c] = &ch.roles;
                if !a.is_one() {
                    assert!(ch.q >= BigInt::one() && &ch.q <= a);
                    assert!((b * &ch.q - BigInt::from(3) * c).mod_floor(a).is_zero());
                }
                assert!(ch.is_lattice_saturating());
                assert!(ch.plane_contains(&ch.translation));
            }
        }
    }

    #[test]
    fn root_triangle_is_the_standard_simplex() {
        let alpha = q(5, 2);
        let tri = build_triangle(&MarkovTriple::root(), &alpha).unwrap();
        let expected = RationalTriangle::new(
            QPoint::origin(),
            QPoint::new(alpha.clone(), q(0, 1)),
            QPoint::new(q(0, 1), alpha.clone()),
        )
        .unwrap();
        assert!(super::super::is_aff_equivalent(&tri.realization, &expected).is_some());
    }

    #[test]
    fn edge_lengths_of_125_at_alpha_10() {
        let tri = build_triangle(&triple(1, 2, 5), &q(10, 1)).unwrap();
        let mut lengths = tri.realization.edge_affine_lengths().to_vec();
        lengths.sort();
        assert_eq!(lengths, vec![q(1, 1), q(4, 1), q(25, 1)]);
        assert_eq!(tri.realization.area(), q(50, 1));
    }

    #[test]
    fn nonpositive_alpha_rejected() {
        assert!(build_triangle(&MarkovTriple::root(), &q(0, 1)).is_err());
        assert!(build_triangle(&MarkovTriple::root(), &q(-1, 2)).is_err());
    }

    #[test]
    fn pull_back_rejects_points_off_the_plane() {
        let chart = chart_embedding(&triple(1, 1, 2), 0).unwrap();
        assert!(chart.pull_back(&[q(1, 1), q(1, 1), q(1, 1)]).is_err());
    }
}
