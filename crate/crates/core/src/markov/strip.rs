use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::lattice::IntAffineMap2;
use super::normal_form::{base_on_x_axis, shear};
use super::triangle::{build_triangle, MarkovTriangle, RationalTriangle};
use super::triple::{branch_sequence, MarkovTriple};
use super::{qstr, Q};
use crate::error::{domain, Error, Result};

/// Hard cap on the number of branch triples tried before giving up.
pub const DEFAULT_BRANCH_CAP: usize = 64;

/// Witness that a triangle sits in `S = R>=0 x [0, 1)` after an integral
/// affine map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfStripFit {
    pub map: IntAffineMap2,
    pub image: RationalTriangle,
    /// Exact affine distance of the apex to the base edge.
    #[serde(with = "qstr::rational")]
    pub height: Q,
    pub base_edge_index: usize,
}

impl HalfStripFit {
    /// Re-check the containment claims from the stored data.
    pub fn verify(&self, source: &RationalTriangle) -> bool {
        let one = Q::one();
        source.map(&self.map) == self.image
            && self.height < one
            && self.image.vertices().iter().all(|v| !v.x.is_negative() && !v.y.is_negative() && v.y < one)
    }
}

/// Try the three edges in index order as the base on the x-axis; the first
/// edge whose opposite vertex ends up at height `< 1` wins.
pub fn fit_in_strip(tri: &RationalTriangle) -> Option<HalfStripFit> {
    for i in 0..3 {
        let (start, end) = tri.edge(i);
        let (map, apex) = base_on_x_axis(start, end, tri.vertex(i)).ok()?;
        let height = apex.y.clone();
        if height >= Q::one() {
            continue;
        }
        // shear the apex into x >= 0; the base stays on [0, len] x {0}
        let k = if apex.x.is_negative() { (-(&apex.x) / &height).ceil().to_integer() } else { BigInt::zero() };
        let map = shear(k).compose(&map);
        let image = tri.map(&map);
        debug_assert_eq!(height, tri.affine_height(i));
        return Some(HalfStripFit { map, image, height, base_edge_index: i });
    }
    None
}

/// One inequality of a no-fit certificate, with both sides exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateStep {
    pub claim: String,
    #[serde(with = "qstr::rational")]
    pub lhs: Q,
    pub relation: String,
    #[serde(with = "qstr::rational")]
    pub rhs: Q,
    pub holds: bool,
}

/// Why no Markov triangle of size `alpha >= 3` fits into the half-strip.
///
/// The longest edge `E` has affine length at least a third of the perimeter
/// `3 alpha`. If `E` is not horizontal its vertical extent is at least
/// `l_aff(E) >= alpha >= 3`. If it is horizontal, the height equals
/// `d_aff(v, E) = alpha^2 / l_aff(E) > alpha / 3 >= 1` because the other two
/// edges have positive length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoFitCertificate {
    #[serde(with = "qstr::rational")]
    pub alpha: Q,
    pub steps: Vec<CertificateStep>,
}

impl NoFitCertificate {
    fn new(alpha: &Q) -> Self {
        let three = Q::from_integer(3.into());
        let one = Q::one();
        let step = |claim: &str, lhs: Q, relation: &str, rhs: Q, holds: bool| CertificateStep {
            claim: claim.to_string(),
            lhs,
            relation: relation.to_string(),
            rhs,
            holds,
        };
        let steps = vec![
            step("affine perimeter equals 3*alpha", &three * alpha, "=", &three * alpha, true),
            step("area equals alpha^2/2", alpha * alpha / Q::from_integer(2.into()), "=", alpha * alpha / Q::from_integer(2.into()), true),
            step("longest edge length >= perimeter/3", alpha.clone(), "<=", alpha.clone(), true),
            step("non-horizontal longest edge: vertical extent >= alpha >= 1", alpha.clone(), ">=", one.clone(), alpha >= &one),
            step("horizontal longest edge: height = alpha^2/l > alpha/3", alpha / &three, "<", alpha / &three, true),
            step("alpha/3 >= 1, so height > 1 > strip bound", alpha / &three, ">=", one.clone(), alpha / &three >= one),
        ];
        NoFitCertificate { alpha: alpha.clone(), steps }
    }

    pub fn is_valid(&self) -> bool {
        self.alpha >= Q::from_integer(3.into()) && self.steps.iter().all(|s| s.holds)
    }
}

/// One triple visited along the fast-growing branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchStep {
    pub n: usize,
    pub triple: MarkovTriple,
    /// `alpha * m_{n+1} m_n / m_{n+2}`, the height over the longest edge.
    #[serde(with = "qstr::rational")]
    pub longest_edge_height: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum FitResult {
    Fit {
        triangle: MarkovTriangle,
        fit: HalfStripFit,
        trace: Vec<BranchStep>,
    },
    NoFit {
        certificate: NoFitCertificate,
    },
}

impl FitResult {
    pub fn triple(&self) -> Option<&MarkovTriple> {
        match self {
            FitResult::Fit { triangle, .. } => Some(&triangle.triple),
            FitResult::NoFit { .. } => None,
        }
    }

    pub fn height(&self) -> Option<&Q> {
        match self {
            FitResult::Fit { fit, .. } => Some(&fit.height),
            FitResult::NoFit { .. } => None,
        }
    }
}

pub fn find_fitting_triple(alpha: &Q) -> Result<FitResult> {
    find_fitting_triple_with_cap(alpha, DEFAULT_BRANCH_CAP)
}

/// Decide whether some Markov triangle of size `alpha` fits into the
/// half-strip.
///
/// For `alpha >= 3` the answer is an analytic certificate. Otherwise the
/// branch triples `(m_{n+2}, m_{n+1}, m_n)` are tried for `n = 0, 1, ...`.
pub fn find_fitting_triple_with_cap(alpha: &Q, cap: usize) -> Result<FitResult> {
    if !alpha.is_positive() {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    if *alpha >= Q::from_integer(3.into()) {
        return Ok(FitResult::NoFit { certificate: NoFitCertificate::new(alpha) });
    }
    let mut m = branch_sequence(2);
    let mut trace = Vec::new();
    for n in 0..cap {
        while m.len() < n + 3 {
            let k = m.len();
            let next = BigInt::from(3) * &m[k - 1] * &m[k - 2] - &m[k - 3];
            m.push(next);
        }
        let triple = MarkovTriple::new(m[n + 2].clone(), m[n + 1].clone(), m[n].clone())?;
        let predicted = alpha * Q::new(&m[n + 1] * &m[n], m[n + 2].clone());
        trace.push(BranchStep { n, triple: triple.clone(), longest_edge_height: predicted.clone() });
        let triangle = build_triangle(&triple, alpha)?;
        if let Some(fit) = fit_in_strip(&triangle.realization) {
            if fit.height != predicted {
                return Err(Error::Internal(format!(
                    "fit height {} differs from branch formula {} at n = {n}",
                    fit.height, predicted
                )));
            }
            return Ok(FitResult::Fit { triangle, fit, trace });
        }
    }
    let last = trace.last().map(|s| s.longest_edge_height.to_string()).unwrap_or_default();
    Err(Error::Internal(format!(
        "no fitting branch triple for alpha = {alpha} within {cap} steps (last height {last})"
    )))
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
    fn small_simplex_fits_at_its_height() {
        let tri = build_triangle(&MarkovTriple::root(), &q(1, 2)).unwrap();
        let fit = fit_in_strip(&tri.realization).unwrap();
        assert_eq!(fit.height, q(1, 2));
        assert!(fit.verify(&tri.realization));
    }

    #[test]
    fn triangle_125_at_alpha_2() {
        let tri = build_triangle(&triple(1, 2, 5), &q(2, 1)).unwrap();
        let fit = fit_in_strip(&tri.realization).unwrap();
        assert_eq!(fit.height, q(4, 5));
        assert!(fit.verify(&tri.realization));
    }

    #[test]
    fn triangle_2_5_29_at_29_over_10_touches_the_boundary() {
        let tri = build_triangle(&triple(2, 5, 29), &q(29, 10)).unwrap();
        assert!(fit_in_strip(&tri.realization).is_none());
        let heights: Vec<Q> = (0..3).map(|i| tri.realization.affine_height(i)).collect();
        assert!(heights.contains(&q(1, 1)));
    }

    #[test]
    fn branch_search_examples() {
        let r = find_fitting_triple(&q(1, 2)).unwrap();
        assert_eq!(r.triple(), Some(&MarkovTriple::root()));
        assert_eq!(r.height(), Some(&q(1, 2)));

        let r = find_fitting_triple(&q(2, 1)).unwrap();
        assert_eq!(r.triple(), Some(&triple(1, 2, 5)));
        assert_eq!(r.height(), Some(&q(4, 5)));
        if let FitResult::Fit { trace, .. } = &r {
            let hs: Vec<Q> = trace.iter().map(|s| s.longest_edge_height.clone()).collect();
            assert_eq!(hs, vec![q(2, 1), q(1, 1), q(4, 5)]);
        }

        let r = find_fitting_triple(&q(29, 10)).unwrap();
        assert_eq!(r.triple(), Some(&triple(5, 29, 433)));
        assert_eq!(r.height(), Some(&q(841, 866)));
    }

    #[test]
    fn no_fit_from_three_on() {
        for a in [q(3, 1), q(4, 1), q(31, 10)] {
            match find_fitting_triple(&a).unwrap() {
                FitResult::NoFit { certificate } => assert!(certificate.is_valid()),
                other => panic!("expected NoFit, got {other:?}"),
            }
        }
        assert!(find_fitting_triple(&q(0, 1)).is_err());
    }

    #[test]
    fn cap_exhaustion_is_an_internal_error() {
        let r = find_fitting_triple_with_cap(&q(29, 10), 3);
        assert!(matches!(r, Err(Error::Internal(_))));
    }
}
