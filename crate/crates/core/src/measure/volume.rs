use serde::Serialize;

use super::sampling::{sharded, uniform_in};
use crate::folding::{cell_count, wall_volume_closed_form, Box4, FoldingPlan, Point4};
use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    #[serde(rename = "n")]
    pub n_samples: usize,
    pub hits: u64,
    pub seed: u64,
    pub bounding_box: Box4,
}

impl VolumeEstimate {
    pub fn hit_fraction(&self) -> f64 {
        if self.n_samples == 0 {
            0.0
        } else {
            self.hits as f64 / self.n_samples as f64
        }
    }

    /// `|value - expected| <= k σ`, with a floor for exact (σ = 0) cases.
    pub fn within_sigma(&self, expected: f64, k: f64) -> bool {
        (self.value - expected).abs() <= k * self.std_error + 1e-12 * expected.abs().max(1.0)
    }
}

/// Monte Carlo volume of `{indicator}` inside `region`.
pub fn mc_volume<F>(indicator: F, region: &Box4, n: usize, seed: u64) -> Result<VolumeEstimate>
where
    F: Fn(&Point4) -> bool + Sync,
{
    if n == 0 {
        return domain("need at least one sample");
    }
    let vol = region.volume();
    if !(vol > 0.0) {
        return domain("bounding box must have positive volume");
    }
    let hits: u64 = sharded(n, seed, |rng, count| {
        let mut h = 0u64;
        for _ in 0..count {
            if indicator(&uniform_in(rng, region)) {
                h += 1;
            }
        }
        h
    })
    .into_iter()
    .sum();
    let p = hits as f64 / n as f64;
    Ok(VolumeEstimate {
        value: vol * p,
        std_error: vol * (p * (1.0 - p) / n as f64).sqrt(),
        n_samples: n,
        hits,
        seed,
        bounding_box: *region,
    })
}

/// The cube `K(R) = [-R, R]^4`.
pub fn cube(r: f64) -> Box4 {
    Box4 { lo: [-r; 4], hi: [r; 4] }
}

/// Volume of the part of `K(R)` whose image leaves the cylinder
/// `{x1^2 + y1^2 < r^2}`.
pub fn defect_volume(plan: &FoldingPlan, r: f64, n: usize, seed: u64) -> Result<VolumeEstimate> {
    if !(r > 0.0) {
        return domain(format!("cylinder radius must be positive, got {r}"));
    }
    let r2 = r * r;
    mc_volume(
        |p| match plan.eval(*p) {
            Ok(q) => q[0] * q[0] + q[1] * q[1] >= r2,
            Err(_) => false,
        },
        &cube(plan.r),
        n,
        seed,
    )
}

/// Volume of `{p in region : distance(p) < t}`.
pub fn neighborhood_volume<D>(distance: D, t: f64, region: &Box4, n: usize, seed: u64) -> Result<VolumeEstimate>
where
    D: Fn(&Point4) -> f64 + Sync,
{
    mc_volume(|p| distance(p) < t, region, n, seed)
}

/// Bounding box of the `t`-neighbourhood of the disk of radius `radius` in
/// the `(x1, x2)`-plane.
pub fn disk_neighborhood_box(radius: f64, t: f64) -> Box4 {
    let a = radius + t;
    Box4 { lo: [-a, -t, -a, -t], hi: [a, t, a, t] }
}

/// Wall volume converted from prism to cube measure: the prism has volume
/// `M^2`, the cube `16 R^4`.
pub fn wall_volume_in_cube(r: f64, lipschitz: f64) -> Result<f64> {
    let m = cell_count(r) as f64;
    Ok(wall_volume_closed_form(r, lipschitz)? * 16.0 * r.powi(4) / (m * m))
}
