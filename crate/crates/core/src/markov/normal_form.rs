use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::lattice::{primitive_direction, unimodular_to_e1, IntAffineMap2, QPoint};
use super::triangle::RationalTriangle;
use crate::error::Result;

/// Place the edge `start -> end` on the positive x-axis starting at the
/// origin, with `apex` in the upper half-plane. Returns the map and the
/// apex image `(u, h)` with `h > 0`.
pub(super) fn base_on_x_axis(start: &QPoint, end: &QPoint, apex: &QPoint) -> Result<(IntAffineMap2, QPoint)> {
    let (dir, _) = primitive_direction(&(end - start))?;
    let mut m = unimodular_to_e1(&dir)?;
    let to_origin = IntAffineMap2::new(m.clone(), QPoint::origin())?;
    let rel = to_origin.apply_linear(&(apex - start));
    if rel.y.is_negative() {
        m[1][0] = -&m[1][0];
        m[1][1] = -&m[1][1];
    }
    let lin = IntAffineMap2::new(m, QPoint::origin())?;
    let shift = lin.apply_linear(start);
    let map = IntAffineMap2::new(lin.matrix().clone(), QPoint::new(-shift.x, -shift.y))?;
    let apex_img = map.apply(apex);
    Ok((map, apex_img))
}

/// Shear `[[1, k], [0, 1]]`.
pub(super) fn shear(k: BigInt) -> IntAffineMap2 {
    IntAffineMap2::new([[BigInt::one(), k], [BigInt::zero(), BigInt::one()]], QPoint::origin())
        .expect("shear is unimodular")
}

/// Normal form under `Aff(2; Z)`.
///
/// A longest edge (in affine length) runs from the origin along `(1, 0)`,
/// the triangle sits in the upper half-plane and the apex abscissa is
/// reduced into `[0, h)` by the residual shears. Remaining ties (several
/// longest edges, both orientations) are broken by the lexicographic order of
/// the vertex tuple `(origin, base end, apex)`. Returns the normal form and a
/// map sending `tri` onto it as vertex sets.
pub fn canonical_form(tri: &RationalTriangle) -> Result<(RationalTriangle, IntAffineMap2)> {
    let lengths = tri.edge_affine_lengths();
    let longest = lengths.iter().max().expect("three edges").clone();
    let mut best: Option<(RationalTriangle, IntAffineMap2)> = None;
    for i in (0..3).filter(|&i| lengths[i] == longest) {
        let (p, q) = tri.edge(i);
        for (start, end) in [(p, q), (q, p)] {
            let (map, apex) = base_on_x_axis(start, end, tri.vertex(i))?;
            // u + k h in [0, h)
            let k = -(&apex.x / &apex.y).floor().to_integer();
            let map = shear(k).compose(&map);
            let cand = RationalTriangle::new(map.apply(start), map.apply(end), map.apply(tri.vertex(i)))?;
            let better = match &best {
                None => true,
                Some((b, _)) => cand.vertices() < b.vertices(),
            };
            if better {
                best = Some((cand, map));
            }
        }
    }
    Ok(best.expect("at least one longest edge"))
}

/// A map `M` with `M(t1) = t2` as vertex sets, if one exists.
pub fn is_aff_equivalent(t1: &RationalTriangle, t2: &RationalTriangle) -> Option<IntAffineMap2> {
    let (c1, m1) = canonical_form(t1).ok()?;
    let (c2, m2) = canonical_form(t2).ok()?;
    if c1 != c2 {
        return None;
    }
    let m = m2.inverse().compose(&m1);
    debug_assert!(t1.map(&m).contains_vertex_set(t2));
    Some(m)
}
