use nalgebra::{Complex, SMatrix, SVector};
use serde::Serialize;

use crate::error::{domain, Result};

pub type C64 = Complex<f64>;

/// Tolerance on the constraints `|q| = 1`, `<q, p> = 0`.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Largest `|p|` accepted by [`ou_pullback_residual`].
pub const PULLBACK_MAX_NORM: f64 = 0.9;
/// Distance of `|p|^2` from 1 treated as rounding of a unit covector.
pub const BOUNDARY_SNAP: f64 = 4.0 * f64::EPSILON;
/// Below this `|p|` the series for `f` is used.
const SERIES_CUTOFF: f64 = 1e-4;

/// `f(x) = (1 - sqrt(1 - x^2)) / x^2`, `f(0) = 1/2`.
pub fn ou_f(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("ou_f needs x in [0, 1], got {x}"));
    }
    if x < SERIES_CUTOFF {
        let x2 = x * x;
        return Ok(0.5 + x2 / 8.0 + x2 * x2 / 16.0);
    }
    // 1 - sqrt(1 - x^2) = x^2 / (1 + sqrt(1 - x^2)), free of cancellation
    Ok(1.0 / (1.0 + (1.0 - x * x).sqrt()))
}

/// A covector `p` at `q` on the unit sphere, standing for the class
/// `[q, p] = [-q, -p]` in the cotangent bundle of real projective space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentPoint<const N: usize> {
    pub q: [f64; N],
    pub p: [f64; N],
}

impl<const N: usize> Serialize for CotangentPoint<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CotangentPoint", 2)?;
        st.serialize_field("q", &self.q[..])?;
        st.serialize_field("p", &self.p[..])?;
        st.end()
    }
}

fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<const N: usize> CotangentPoint<N> {
    pub fn new(q: [f64; N], p: [f64; N]) -> Result<Self> {
        let nq = dot(&q, &q).sqrt();
        if (nq - 1.0).abs() > CONSTRAINT_TOL {
            return domain(format!("|q| = {nq}, expected 1"));
        }
        if dot(&q, &p).abs() > CONSTRAINT_TOL {
            return domain(format!("<q, p> = {:e}, expected 0", dot(&q, &p)));
        }
        let np = dot(&p, &p).sqrt();
        if np > 1.0 + CONSTRAINT_TOL {
            return domain(format!("|p| = {np} exceeds 1"));
        }
        Ok(CotangentPoint { q, p })
    }

    /// Normalize `q` and remove the component of `p` along it.
    pub fn project(q: [f64; N], p: [f64; N]) -> Result<Self> {
        let nq = dot(&q, &q).sqrt();
        if !(nq > 0.0) {
            return domain("q must be nonzero");
        }
        let q = q.map(|v| v / nq);
        let s = dot(&q, &p);
        let mut p = p;
        for k in 0..N {
            p[k] -= s * q[k];
        }
        Self::new(q, p)
    }

    pub fn antipode(&self) -> Self {
        CotangentPoint { q: self.q.map(|v| -v), p: self.p.map(|v| -v) }
    }

    pub fn norm_p(&self) -> f64 {
        dot(&self.p, &self.p).sqrt()
    }
}

/// A point of complex projective space, stored as a unit representative
/// whose first non-negligible coordinate is real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint<const N: usize> {
    z: [C64; N],
}

pub type ProjectivePointC3 = ProjectivePoint<3>;

/// Coordinates smaller than this (after scaling to unit norm) are skipped
/// when fixing the phase.
pub const PHASE_CUTOFF: f64 = 1e-8;

impl<const N: usize> ProjectivePoint<N> {
    pub fn new(z: [C64; N]) -> Result<Self> {
        let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return domain("projective point needs a nonzero finite vector");
        }
        let mut z = z.map(|c| c / n);
        if let Some(lead) = z.iter().find(|c| c.norm() > PHASE_CUTOFF) {
            let phase = lead.conj() / lead.norm();
            z = z.map(|c| c * phase);
        }
        Ok(ProjectivePoint { z })
    }

    pub fn coords(&self) -> &[C64; N] {
        &self.z
    }

    /// Sine of the angle between the lines, `|a ∧ b|` for unit
    /// representatives (stable near zero, unlike `sqrt(1 - |<a, b>|^2)`).
    pub fn distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for j in 0..N {
            for k in j + 1..N {
                acc += (self.z[j] * other.z[k] - self.z[k] * other.z[j]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Index of the largest coordinate: the best-conditioned affine chart.
    pub fn best_chart(&self) -> usize {
        (0..N).max_by(|&a, &b| self.z[a].norm().total_cmp(&self.z[b].norm())).unwrap()
    }

    /// Affine coordinates `z_j / z_k`, `j != k`, in chart `k`.
    pub fn chart(&self, k: usize) -> Result<Vec<C64>> {
        if self.z[k].norm() < 1e-12 {
            return domain(format!("point lies off chart {k}"));
        }
        Ok((0..N).filter(|&j| j != k).map(|j| self.z[j] / self.z[k]).collect())
    }

    /// `sum z_k^2` of the unit representative (phase-dependent; its modulus
    /// is not).
    pub fn quadric(&self) -> C64 {
        self.z.iter().map(|c| c * c).sum()
    }

    pub fn include<const M: usize>(&self) -> Result<ProjectivePoint<M>> {
        if M < N {
            return domain("cannot include into a smaller space");
        }
        let mut w = [C64::new(0.0, 0.0); M];
        w[..N].copy_from_slice(&self.z);
        ProjectivePoint::new(w)
    }
}

impl<const N: usize> Serialize for ProjectivePoint<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.z.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

/// The unnormalized representative `sqrt(f) p + i q / sqrt(f)`, which lies on
/// the sphere of radius `sqrt 2`.
///
/// `f` depends on `sqrt(1 - |p|^2)`, so a unit covector that rounds to
/// `|p|^2 = 1 - 2^-52` would sit `1.5e-8` off the quadric; `|p|^2` within
/// [`BOUNDARY_SNAP`] of 1 is treated as the boundary.
pub fn ou_lift<const N: usize>(cp: &CotangentPoint<N>) -> Result<[C64; N]> {
    let p2 = dot(&cp.p, &cp.p);
    let f = if 1.0 - p2 <= BOUNDARY_SNAP { 1.0 } else { ou_f(p2.sqrt())? };
    let s = f.sqrt();
    let mut z = [C64::new(0.0, 0.0); N];
    for k in 0..N {
        z[k] = C64::new(s * cp.p[k], cp.q[k] / s);
    }
    Ok(z)
}

/// `[q, p] -> [sqrt(f(|p|)) p + i q / sqrt(f(|p|))]`.
pub fn ou_map<const N: usize>(cp: &CotangentPoint<N>) -> Result<ProjectivePoint<N>> {
    ProjectivePoint::new(ou_lift(cp)?)
}

/// Fubini–Study form, scaled so a line has area `2π`, on chart tangent
/// vectors at `w`: `-2 Im sum h_jk u_j conj(v_k)` with
/// `h = ((1 + |w|^2) I - conj(w) w^T) / (1 + |w|^2)^2`.
pub fn fubini_study<const D: usize>(w: &SVector<C64, D>, u: &SVector<C64, D>, v: &SVector<C64, D>) -> f64 {
    let s = 1.0 + w.norm_squared();
    let mut a = C64::new(0.0, 0.0);
    for j in 0..D {
        for k in 0..D {
            let delta = if j == k { s } else { 0.0 };
            let h = (C64::new(delta, 0.0) - w[j].conj() * w[k]) / (s * s);
            a += h * u[j] * v[k].conj();
        }
    }
    -2.0 * a.im
}

/// Orthonormal basis of the tangent space of `{|q| = 1, <q, p> = 0}` at a
/// point of `R^3 x R^3`, as vectors `(dq, dp)`.
pub fn tangent_basis(cp: &CotangentPoint<3>) -> [[f64; 6]; 4] {
    let normals = [[cp.q[0], cp.q[1], cp.q[2], 0.0, 0.0, 0.0], [cp.p[0], cp.p[1], cp.p[2], cp.q[0], cp.q[1], cp.q[2]]];
    let mut basis: Vec<SVector<f64, 6>> = Vec::with_capacity(6);
    for n in normals {
        push_orthonormal(&mut basis, SVector::from(n));
    }
    for e in 0..6 {
        let mut v = SVector::<f64, 6>::zeros();
        v[e] = 1.0;
        push_orthonormal(&mut basis, v);
    }
    let mut out = [[0.0; 6]; 4];
    for (k, b) in basis[2..6].iter().enumerate() {
        out[k] = [b[0], b[1], b[2], b[3], b[4], b[5]];
    }
    out
}

fn push_orthonormal(basis: &mut Vec<SVector<f64, 6>>, mut v: SVector<f64, 6>) {
    // two Gram–Schmidt passes
    for _ in 0..2 {
        for b in basis.iter() {
            v -= b * b.dot(&v);
        }
    }
    let n = v.norm();
    if n > 1e-6 && basis.len() < 6 {
        basis.push(v / n);
    }
}

/// `sum dp ∧ dq` on tangent vectors `(dq, dp)`.
pub fn canonical_form(u: &[f64; 6], v: &[f64; 6]) -> f64 {
    (0..3).map(|k| u[3 + k] * v[k] - v[3 + k] * u[k]).sum()
}

/// Both 4x4 form matrices on the tangent basis at `cp`.
#[derive(Debug, Clone, Serialize)]
pub struct PullbackForms {
    pub chart: usize,
    pub pulled_back: [[f64; 4]; 4],
    pub canonical: [[f64; 4]; 4],
    pub residual: f64,
}

/// Compare the Fubini–Study form pulled back through [`ou_map`] (by central
/// differences of step `h` in a fixed affine chart) with `sum dp ∧ dq`.
pub fn ou_pullback_forms(cp: &CotangentPoint<3>, h: f64) -> Result<PullbackForms> {
    if cp.norm_p() > PULLBACK_MAX_NORM + CONSTRAINT_TOL {
        return domain(format!("|p| = {} too close to the quadric (limit {PULLBACK_MAX_NORM})", cp.norm_p()));
    }
    if !(h > 0.0) {
        return domain("step must be positive");
    }
    let base = ou_map(cp)?;
    let k = base.best_chart();
    let w0 = SVector::<C64, 2>::from_vec(base.chart(k)?);
    let basis = tangent_basis(cp);
    let chart_at = |t: f64, v: &[f64; 6]| -> Result<SVector<C64, 2>> {
        let q = [0, 1, 2].map(|i| cp.q[i] + t * v[i]);
        let p = [0, 1, 2].map(|i| cp.p[i] + t * v[3 + i]);
        let moved = CotangentPoint::project(q, p)?;
        Ok(SVector::from_vec(ou_map(&moved)?.chart(k)?))
    };
    let mut push = Vec::with_capacity(4);
    for v in &basis {
        push.push((chart_at(h, v)? - chart_at(-h, v)?) / C64::new(2.0 * h, 0.0));
    }
    let mut pulled_back = [[0.0; 4]; 4];
    let mut canonical = [[0.0; 4]; 4];
    let mut residual = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            pulled_back[a][b] = fubini_study(&w0, &push[a], &push[b]);
            canonical[a][b] = canonical_form(&basis[a], &basis[b]);
            residual = residual.max((pulled_back[a][b] - canonical[a][b]).abs());
        }
    }
    Ok(PullbackForms { chart: k, pulled_back, canonical, residual })
}

pub fn ou_pullback_residual(cp: &CotangentPoint<3>, h: f64) -> Result<f64> {
    Ok(ou_pullback_forms(cp, h)?.residual)
}

/// Rotate a cotangent point by an orthogonal matrix.
pub fn rotate(g: &SMatrix<f64, 3, 3>, cp: &CotangentPoint<3>) -> CotangentPoint<3> {
    let q = g * SVector::from(cp.q);
    let p = g * SVector::from(cp.p);
    CotangentPoint { q: [q[0], q[1], q[2]], p: [p[0], p[1], p[2]] }
}

/// Act on homogeneous coordinates by a real orthogonal matrix.
pub fn rotate_projective(g: &SMatrix<f64, 3, 3>, z: &ProjectivePointC3) -> Result<ProjectivePointC3> {
    let c = z.coords();
    let mut out = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i] += c[j] * g[(i, j)];
        }
    }
    ProjectivePoint::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_endpoints_and_series_switch() {
        assert_eq!(ou_f(0.0).unwrap(), 0.5);
        assert!((ou_f(1.0).unwrap() - 1.0).abs() < 1e-15);
        let below = ou_f(SERIES_CUTOFF * (1.0 - 1e-9)).unwrap();
        let above = ou_f(SERIES_CUTOFF).unwrap();
        assert!((below - above).abs() < 1e-15);
        assert!(ou_f(-0.1).is_err() && ou_f(1.1).is_err());
    }

    #[test]
    fn normalization_fixes_phase() {
        let z = [C64::new(0.0, 0.0), C64::new(0.0, 3.0), C64::new(4.0, 0.0)];
        let p = ProjectivePoint::new(z).unwrap();
        assert!((p.coords()[1] - C64::new(0.6, 0.0)).norm() < 1e-15);
        let scaled = ProjectivePoint::new(z.map(|c| c * C64::new(-2.0, 5.0))).unwrap();
        assert!(p.distance(&scaled) < 1e-12);
        assert!((p.coords()[2] - scaled.coords()[2]).norm() < 1e-12);
        assert!(ProjectivePoint::new([C64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent() {
        let cp = CotangentPoint::project([1.0, 2.0, -0.5], [0.1, 0.3, 0.2]).unwrap();
        let b = tangent_basis(&cp);
        for i in 0..4 {
            let gq: f64 = (0..3).map(|k| cp.q[k] * b[i][k]).sum();
            let gp: f64 = (0..3).map(|k| cp.p[k] * b[i][k] + cp.q[k] * b[i][3 + k]).sum();
            assert!(gq.abs() < 1e-14 && gp.abs() < 1e-14);
            for j in 0..4 {
                let d: f64 = (0..6).map(|k| b[i][k] * b[j][k]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
