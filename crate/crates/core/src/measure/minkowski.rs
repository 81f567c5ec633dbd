use std::f64::consts::PI;

use serde::Serialize;

use super::sampling::derive_seed;
use super::volume::{neighborhood_volume, VolumeEstimate};
use crate::error::{domain, Result};
use crate::folding::{Box4, Point4};

/// Largest `σ / value` accepted for the content estimate.
pub const CONTENT_REL_SIGMA: f64 = 0.05;
/// Allowance for the `o(t^2)` term and sampling noise in the obstruction check.
pub const THEOREM_SLACK: f64 = 0.15;

/// Volume of the unit ball in `R^l`: `π^{l/2} / Γ(l/2 + 1)`.
pub fn unit_ball_volume(l: u32) -> f64 {
    // Γ(l/2 + 1) by the recursion from Γ(1) = 1 or Γ(1/2) = sqrt(π)
    let mut gamma = if l.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if l.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < l as f64 / 2.0 + 1.0 - 1e-9 {
        gamma *= x;
        x += 1.0;
    }
    PI.powf(l as f64 / 2.0) / gamma
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub volume: f64,
    pub std_error: f64,
    /// `Vol(N_t) / (π t^2)`.
    pub content_2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinkowskiCurve {
    /// Sorted by decreasing `t`.
    pub points: Vec<CurvePoint>,
    /// `4 - slope` of the least-squares line through `(log t, log Vol)`.
    pub fitted_dimension: f64,
    /// `Vol(N_t) / (π t^2)` at the smallest `t` with `σ / Vol <= 5%`; a
    /// finite-`t` proxy for the lower Minkowski content.
    pub content_at_2: Option<f64>,
    pub content_t: Option<f64>,
    pub monotone: bool,
    /// Fit-quality notes; empty when the data is clean.
    pub flags: Vec<String>,
}

impl MinkowskiCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,volume,std_error\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.t, p.volume, p.std_error));
        }
        out
    }
}

/// Fit dimension and content to `(t, Vol, σ)` samples.
pub fn minkowski_fit(samples: &[(f64, f64, f64)]) -> Result<MinkowskiCurve> {
    if samples.len() < 4 {
        return domain(format!("need at least 4 t-values, got {}", samples.len()));
    }
    if samples.iter().any(|s| !(s.0 > 0.0)) {
        return domain("t-values must be positive");
    }
    let mut pts: Vec<(f64, f64, f64)> = samples.to_vec();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    if pts[0].0 < 10.0 * pts[pts.len() - 1].0 * (1.0 - 1e-12) {
        return domain("t-values must span at least one decade");
    }
    let mut flags = Vec::new();
    let monotone = pts.windows(2).all(|w| w[0].1 + 3.0 * (w[0].2.hypot(w[1].2)) >= w[1].1);
    if !monotone {
        flags.push("volumes not monotone in t within 3 sigma".to_string());
    }
    let usable: Vec<(f64, f64)> = pts.iter().filter(|p| p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if usable.len() < pts.len() {
        flags.push(format!("{} zero volumes left out of the fit", pts.len() - usable.len()));
    }
    let fitted_dimension = if usable.len() >= 2 {
        let n = usable.len() as f64;
        let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
        let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
        4.0 - sxy / sxx
    } else {
        flags.push("too few positive volumes to fit".to_string());
        f64::NAN
    };
    let reliable = pts.iter().rev().find(|p| p.1 > 0.0 && p.2 <= CONTENT_REL_SIGMA * p.1);
    if reliable.is_none() {
        flags.push("no t passes the 5% sigma gate".to_string());
    }
    let points = pts.iter().map(|&(t, v, s)| CurvePoint { t, volume: v, std_error: s, content_2: v / (PI * t * t) }).collect();
    Ok(MinkowskiCurve {
        points,
        fitted_dimension,
        content_at_2: reliable.map(|p| p.1 / (PI * p.0 * p.0)),
        content_t: reliable.map(|p| p.0),
        monotone,
        flags,
    })
}

/// Sample `Vol(N_t)` for each `t` (seed derived per `t`) and fit.
pub fn neighborhood_curve<D, B>(distance: D, region: B, t_values: &[f64], n: usize, seed: u64) -> Result<(Vec<VolumeEstimate>, MinkowskiCurve)>
where
    D: Fn(&Point4) -> f64 + Sync,
    B: Fn(f64) -> Box4,
{
    let mut est = Vec::with_capacity(t_values.len());
    for (k, &t) in t_values.iter().enumerate() {
        est.push(neighborhood_volume(&distance, t, &region(t), n, derive_seed(seed, k as u64))?);
    }
    let samples: Vec<_> = t_values.iter().zip(&est).map(|(&t, e)| (t, e.value, e.std_error)).collect();
    Ok((est, minkowski_fit(&samples)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionRow {
    pub t: f64,
    pub volume: f64,
    pub std_error: f64,
    /// `π^2 (R^2 - r^2) t^2`.
    pub bound: f64,
    /// `Vol(N_t) / (π^2 (R^2 - r^2) t^2)`.
    pub ratio: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContentCheck {
    pub content: f64,
    /// `π (R^2 - r^2)`.
    pub bound: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub big_r: f64,
    pub small_r: f64,
    pub slack: f64,
    pub rows: Vec<ObstructionRow>,
    /// Present when at least four `t` spanning a decade were given.
    pub curve: Option<MinkowskiCurve>,
    pub content: Option<ContentCheck>,
    pub all_pass: bool,
    pub n: usize,
    pub seed: u64,
}

/// Check `Vol(N_t(E)) >= π^2 (R^2 - r^2) t^2 (1 - slack)` for each `t`, and
/// the content bound `π (R^2 - r^2)` when a curve can be fitted.
pub fn theorem31_check<D, B>(
    distance: D,
    region: B,
    big_r: f64,
    small_r: f64,
    t_values: &[f64],
    n: usize,
    seed: u64,
) -> Result<ObstructionReport>
where
    D: Fn(&Point4) -> f64 + Sync,
    B: Fn(f64) -> Box4,
{
    if !(big_r > small_r && small_r > 0.0) {
        return domain(format!("need R > r > 0, got R = {big_r}, r = {small_r}"));
    }
    let gap = big_r * big_r - small_r * small_r;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for (k, &t) in t_values.iter().enumerate() {
        let e = neighborhood_volume(&distance, t, &region(t), n, derive_seed(seed, k as u64))?;
        let bound = PI * PI * gap * t * t;
        let ratio = e.value / bound;
        rows.push(ObstructionRow { t, volume: e.value, std_error: e.std_error, bound, ratio, passes: ratio >= 1.0 - THEOREM_SLACK });
        samples.push((t, e.value, e.std_error));
    }
    let curve = minkowski_fit(&samples).ok();
    let content = curve.as_ref().and_then(|c| c.content_at_2).map(|content| {
        let bound = PI * gap;
        ContentCheck { content, bound, passes: content >= bound }
    });
    let all_pass = rows.iter().all(|r| r.passes) && content.as_ref().is_none_or(|c| c.passes);
    Ok(ObstructionReport { big_r, small_r, slack: THEOREM_SLACK, rows, curve, content, all_pass, n, seed })
}
