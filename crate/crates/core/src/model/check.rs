use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ou::{ou_f, ou_map, ou_pullback_residual, rotate, rotate_projective, CotangentPoint, PULLBACK_MAX_NORM};
use crate::error::{domain, Result};

pub fn random_unit3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [0; 3].map(|_| rng.gen_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n < 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// Uniform base point on `S^2` with a random covector of length `norm`.
pub fn random_cotangent<R: Rng>(rng: &mut R, norm: f64) -> Result<CotangentPoint<3>> {
    let q = random_unit3(rng);
    let raw = random_unit3(rng);
    let s: f64 = (0..3).map(|k| q[k] * raw[k]).sum();
    let p = [0, 1, 2].map(|k| raw[k] - s * q[k]);
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    CotangentPoint::new(q, p.map(|x| x / n * norm))
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let axis = Unit::new_normalize(Vector3::from(random_unit3(rng)));
    Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..2.0 * PI)).into_inner()
}

/// Worst errors of the four standing checks on the Oakley–Usher map.
#[derive(Debug, Clone, Serialize)]
pub struct OuCheckReport {
    /// `max |x f(x) - tan(arcsin(x)/2)|` on a uniform grid of `[0, 1]`.
    pub identity_error: f64,
    pub grid_points: usize,
    /// `max |Σ z_k^2|` at unit covectors.
    pub fermat_residual: f64,
    pub boundary_points: usize,
    /// `max d(Φ(g x), g Φ(x))` over random rotations.
    pub equivariance_error: f64,
    pub rotations: usize,
    /// `max |Φ^* ω_FS - ω_can|` at interior points with `|p| <= 0.9`.
    pub pullback_residual: f64,
    pub pullback_points: usize,
    pub pullback_step: f64,
    pub seed: u64,
}

impl OuCheckReport {
    pub const IDENTITY_TOL: f64 = 1e-12;
    pub const FERMAT_TOL: f64 = 1e-12;
    pub const EQUIVARIANCE_TOL: f64 = 1e-10;
    pub const PULLBACK_TOL: f64 = 1e-6;

    pub fn passes(&self) -> bool {
        self.identity_error <= Self::IDENTITY_TOL
            && self.fermat_residual <= Self::FERMAT_TOL
            && self.equivariance_error <= Self::EQUIVARIANCE_TOL
            && self.pullback_residual <= Self::PULLBACK_TOL
    }
}

/// Run the identity, Fermat, equivariance and pullback checks with `n`
/// points each (`n` rotations for equivariance).
pub fn ou_check(n: usize, rotations: usize, step: f64, seed: u64) -> Result<OuCheckReport> {
    if n < 2 || !(step > 0.0) {
        return domain(format!("need n >= 2 and a positive step, got n = {n}, h = {step}"));
    }
    let mut identity_error = 0.0f64;
    for k in 0..n {
        let x = k as f64 / (n - 1) as f64;
        identity_error = identity_error.max((x * ou_f(x)? - (0.5 * x.asin()).tan()).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fermat_residual = 0.0f64;
    for _ in 0..n {
        fermat_residual = fermat_residual.max(ou_map(&random_cotangent(&mut rng, 1.0)?)?.quadric().norm());
    }
    let mut equivariance_error = 0.0f64;
    for _ in 0..rotations {
        let g = random_rotation(&mut rng);
        let norm = rng.gen_range(0.0..=1.0);
        let cp = random_cotangent(&mut rng, norm)?;
        let lhs = ou_map(&rotate(&g, &cp))?;
        let rhs = rotate_projective(&g, &ou_map(&cp)?)?;
        equivariance_error = equivariance_error.max(lhs.distance(&rhs));
    }
    let mut pullback_residual = 0.0f64;
    for _ in 0..n {
        // uniform in the codisk of radius 0.9
        let norm = PULLBACK_MAX_NORM * rng.gen::<f64>().sqrt();
        pullback_residual = pullback_residual.max(ou_pullback_residual(&random_cotangent(&mut rng, norm)?, step)?);
    }
    Ok(OuCheckReport {
        identity_error,
        grid_points: n,
        fermat_residual,
        boundary_points: n,
        equivariance_error,
        rotations,
        pullback_residual,
        pullback_points: n,
        pullback_step: step,
        seed,
    })
}
