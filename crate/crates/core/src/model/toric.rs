use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::markov::{qstr, HalfStripFit, Q};

/// `z_j = sqrt(x_j / π) e^{i θ_j}`, returned as `(X1, Y1, X2, Y2)`.
pub fn toric_coords(x: [f64; 2], theta: [f64; 2]) -> Result<[f64; 4]> {
    Ok(toric_coords_with_jacobian(x, theta)?.0)
}

/// [`toric_coords`] with its Jacobian in the variables `(x1, θ1, x2, θ2)`.
///
/// The map pulls `sum dX ∧ dY` back to `(1/2π) sum dx ∧ dθ`, so
/// `J^T Ω J = Ω / 2π`; equivalently it is symplectic for the angle
/// normalized to `θ/2π ∈ [0, 1)`.
pub fn toric_coords_with_jacobian(x: [f64; 2], theta: [f64; 2]) -> Result<([f64; 4], Matrix4<f64>)> {
    if !(x[0] > 0.0 && x[1] > 0.0) {
        return domain(format!("actions must be positive, got {x:?}"));
    }
    let mut out = [0.0; 4];
    let mut jac = Matrix4::zeros();
    for j in 0..2 {
        let r = (x[j] / PI).sqrt();
        let (s, c) = theta[j].sin_cos();
        out[2 * j] = r * c;
        out[2 * j + 1] = r * s;
        // dr/dx = 1 / (2 π r)
        let dr = 1.0 / (2.0 * PI * r);
        jac[(2 * j, 2 * j)] = dr * c;
        jac[(2 * j, 2 * j + 1)] = -r * s;
        jac[(2 * j + 1, 2 * j)] = dr * s;
        jac[(2 * j + 1, 2 * j + 1)] = r * c;
    }
    Ok((out, jac))
}

/// `(π|z1|^2, π|z2|^2)`.
pub fn moment_map(p: [f64; 4]) -> [f64; 2] {
    [PI * (p[0] * p[0] + p[1] * p[1]), PI * (p[2] * p[2] + p[3] * p[3])]
}

/// Angles of `(z1, z2)` in `[0, 2π)`.
pub fn angles(p: [f64; 4]) -> [f64; 2] {
    [p[1].atan2(p[0]).rem_euclid(2.0 * PI), p[3].atan2(p[2]).rem_euclid(2.0 * PI)]
}

/// Result of sampling a fitted triangle's torus fibres.
#[derive(Debug, Clone, Serialize)]
pub struct TorusContainmentReport {
    pub n: usize,
    pub seed: u64,
    /// Exact height of the fitted triangle.
    #[serde(with = "qstr::rational")]
    pub height: Q,
    /// Largest observed `π|z2|^2`; `None` when `n = 0`.
    pub max_second_action: Option<f64>,
    /// Largest observed round-trip error of the moment map.
    pub max_roundtrip_error: f64,
    pub all_inside: bool,
}

impl TorusContainmentReport {
    /// Uniform samples of a triangle of height `h` fall short of the apex by
    /// more than `h δ` with probability `(1 - δ^2)^n`; `δ = 4/sqrt(n)` gives
    /// a miss rate of `e^{-16}`.
    pub fn sampling_slack(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            4.0 / (self.n as f64).sqrt() * self.height.to_f64().unwrap_or(1.0)
        }
    }

    /// Inside the cylinder, below the exact height, and within sampling
    /// slack of it.
    pub fn matches_height(&self) -> bool {
        let h = self.height.to_f64().unwrap_or(f64::NAN);
        match self.max_second_action {
            None => self.all_inside,
            Some(m) => self.all_inside && m <= h + 1e-12 && h - m <= self.sampling_slack(),
        }
    }
}

/// Sample `n` interior points of the fitted triangle with random angles, map
/// them through [`toric_coords`] and check they land in `{π|z2|^2 < 1}`.
pub fn triangle_torus_containment(fit: &HalfStripFit, n: usize, seed: u64) -> Result<TorusContainmentReport> {
    let v: Vec<[f64; 2]> = fit.image.vertices().iter().map(|p| p.to_f64()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_second: Option<f64> = None;
    let mut max_err = 0.0f64;
    let mut all_inside = true;
    let mut taken = 0;
    while taken < n {
        let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
        if a + b > 1.0 {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        let c = 1.0 - a - b;
        let x = [0, 1].map(|k| c * v[0][k] + a * v[1][k] + b * v[2][k]);
        let theta = [rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)];
        if !(x[0] > 0.0 && x[1] > 0.0) {
            continue; // boundary of the strip, measure zero
        }
        taken += 1;
        let z = toric_coords(x, theta)?;
        let m = moment_map(z);
        max_err = max_err.max((m[0] - x[0]).abs().max((m[1] - x[1]).abs()));
        all_inside &= m[1] < 1.0;
        max_second = Some(max_second.map_or(m[1], |s: f64| s.max(m[1])));
    }
    Ok(TorusContainmentReport { n, seed, height: fit.height.clone(), max_second_action: max_second, max_roundtrip_error: max_err, all_inside })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_point() {
        let z = toric_coords([1.0, 1.0], [0.0, 0.0]).unwrap();
        let r = 1.0 / PI.sqrt();
        assert!((z[0] - r).abs() < 1e-15 && z[1] == 0.0 && (z[2] - r).abs() < 1e-15 && z[3] == 0.0);
        let z = toric_coords([1.0 / PI, 1.0 / PI], [0.0, 0.0]).unwrap();
        assert!((z[0] - 1.0 / PI).abs() < 1e-15 && (z[2] - 1.0 / PI).abs() < 1e-15);
        assert!(toric_coords([0.0, 1.0], [0.0, 0.0]).is_err());
    }

    #[test]
    fn jacobian_scales_the_form_by_one_over_two_pi() {
        let (_, j) = toric_coords_with_jacobian([0.3, 2.0], [1.0, 4.0]).unwrap();
        let om = crate::folding::omega();
        assert!((j.transpose() * om * j - om / (2.0 * PI)).abs().max() < 1e-14);
    }
}
