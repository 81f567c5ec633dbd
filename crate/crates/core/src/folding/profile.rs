use serde::Serialize;

use super::quadrature::{adaptive_simpson, bisect};
use crate::error::{domain, Result};

/// Simpson tolerance for every piece of the stretch integral.
pub const QUADRATURE_TOL: f64 = 1e-13;
/// Relative tolerance on `f(1/L) = 1 + 1/L`.
pub const ENDPOINT_REL_TOL: f64 = 1e-12;
pub const MAX_BISECTION_STEPS: usize = 200;

/// Cached nodes per smooth piece of the ramp for evaluating `f`.
const NODES_PER_PIECE: usize = 64;

/// Corner blend used for `G'`. Its derivative is a tent, which gives the
/// smallest third derivative (`4/w^2`) of any C^1 blend of width `w`; central
/// differences on the stretch map are limited by exactly that quantity.
fn blend(t: f64) -> f64 {
    if t <= 0.5 {
        2.0 * t * t
    } else {
        let r = 1.0 - t;
        1.0 - 2.0 * r * r
    }
}

fn blend_d(t: f64) -> f64 {
    4.0 * t.min(1.0 - t)
}

/// `∫_0^t blend`.
fn blend_int(t: f64) -> f64 {
    if t <= 0.5 {
        2.0 * t * t * t / 3.0
    } else {
        let r = 1.0 - t;
        t - 0.5 + 2.0 * r * r * r / 3.0
    }
}

/// Shape of the ramp `g` in the unit coordinate `u = L x`, with
/// `g(x) = G(L x) / L`.
///
/// `G` vanishes on `[0, zero_width]`, rises with slope 1 (blended corners of
/// width `corner_width`), is constant on `[1/4, 3/4]` and falls
/// symmetrically. `G'` is C^1, so `g` is C^2 and `|g'| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RampShape {
    pub zero_width: f64,
    pub corner_width: f64,
}

impl Default for RampShape {
    fn default() -> Self {
        RampShape { zero_width: 1.0 / 128.0, corner_width: 1.0 / 64.0 }
    }
}

impl RampShape {
    pub fn peak(&self) -> f64 {
        0.25 - self.zero_width - self.corner_width
    }

    /// Boundaries of the smooth pieces on `[0, 1/2]`.
    pub fn breakpoints_half(&self) -> [f64; 6] {
        let (d, w) = (self.zero_width, self.corner_width);
        [0.0, d, d + w, 0.25 - w, 0.25, 0.5]
    }

    /// `(G, G_max - G, G', G'')` at `u in [0, 1]`; the deficit is computed
    /// without cancellation near the plateau.
    pub fn eval(&self, u: f64) -> (f64, f64, f64, f64) {
        let (d, w) = (self.zero_width, self.corner_width);
        let (v, sign) = if u > 0.5 { (1.0 - u, -1.0) } else { (u, 1.0) };
        let peak = self.peak();
        let (g, deficit, gp, gpp) = if v <= d {
            (0.0, peak, 0.0, 0.0)
        } else if v <= d + w {
            let t = (v - d) / w;
            let g = w * blend_int(t);
            (g, peak - g, blend(t), blend_d(t) / w)
        } else if v <= 0.25 - w {
            let g = 0.5 * w + (v - d - w);
            (g, peak - g, 1.0, 0.0)
        } else if v < 0.25 {
            let t = (v - (0.25 - w)) / w;
            let deficit = w * blend_int(1.0 - t);
            (peak - deficit, deficit, blend(1.0 - t), -blend_d(t) / w)
        } else {
            (peak, 0.0, 0.0, 0.0)
        };
        (g, deficit, sign * gp, gpp)
    }
}

/// The taffy stretch `f(x) = ∫_0^x dy / (1 - C g(y))` on `[0, 1/L]`.
///
/// `C` is stored through the headroom `eps = 1 - C sup g`, so that
/// `f'(x) = 1 / (eps + (1 - eps) (sup g - g(x)) / sup g)` is evaluated without
/// cancellation. `sup f' = 1/eps`.
#[derive(Debug, Clone, Serialize)]
pub struct StretchProfile {
    pub lipschitz: f64,
    pub c: f64,
    pub eps: f64,
    pub ramp: RampShape,
    pub quadrature_tol: f64,
    /// `f(1/L) - (1 + 1/L)` as computed.
    pub endpoint_error: f64,
    #[serde(skip)]
    nodes: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

/// Ramp parameters for budget `L`.
pub fn build_g(lipschitz: f64) -> Result<RampShape> {
    if !(lipschitz >= 2.0) || !lipschitz.is_finite() {
        return domain(format!("L must be >= 2, got {lipschitz}"));
    }
    Ok(RampShape::default())
}

/// `1 / (1 - C G(u)/L)` in unit coordinates.
fn stretch_rate(ramp: &RampShape, eps: f64, u: f64) -> f64 {
    let (_, deficit, _, _) = ramp.eval(u);
    1.0 / (eps + (1.0 - eps) * deficit / ramp.peak())
}

/// `∫_0^1 stretch_rate du`, i.e. `L * I(C)`.
fn unit_integral(ramp: &RampShape, eps: f64, tol: f64) -> f64 {
    let b = ramp.breakpoints_half();
    let mut half = b[1]; // rate is exactly 1 on the zero zone
    for k in 1..4 {
        half += adaptive_simpson(|u| stretch_rate(ramp, eps, u), b[k], b[k + 1], tol);
    }
    half += (b[5] - b[4]) / eps;
    2.0 * half
}

/// Solve `I(C) = 1 + 1/L` for the headroom `eps = 1 - C sup g`.
pub fn solve_c(ramp: &RampShape, lipschitz: f64) -> Result<f64> {
    let target = lipschitz + 1.0;
    let lo = 0.25 / target; // plateau alone already overshoots
    bisect(
        |eps| unit_integral(ramp, eps, QUADRATURE_TOL) - target,
        lo,
        1.0,
        ENDPOINT_REL_TOL * target,
        MAX_BISECTION_STEPS,
    )
}

impl StretchProfile {
    pub fn new(lipschitz: f64) -> Result<Self> {
        let ramp = build_g(lipschitz)?;
        let eps = solve_c(&ramp, lipschitz)?;
        let c = lipschitz * (1.0 - eps) / ramp.peak();
        // cumulative table in unit coordinates
        let mut pieces: Vec<f64> = ramp.breakpoints_half().to_vec();
        pieces.extend(ramp.breakpoints_half().iter().rev().skip(1).map(|b| 1.0 - b));
        let mut nodes = vec![0.0];
        for win in pieces.windows(2) {
            for k in 1..=NODES_PER_PIECE {
                nodes.push(win[0] + (win[1] - win[0]) * k as f64 / NODES_PER_PIECE as f64);
            }
        }
        let mut cumulative = vec![0.0; nodes.len()];
        for k in 1..nodes.len() {
            cumulative[k] = cumulative[k - 1]
                + adaptive_simpson(|u| stretch_rate(&ramp, eps, u), nodes[k - 1], nodes[k], QUADRATURE_TOL / nodes.len() as f64);
        }
        let endpoint_error = cumulative[nodes.len() - 1] / lipschitz - (1.0 + 1.0 / lipschitz);
        Ok(StretchProfile { lipschitz, c, eps, ramp, quadrature_tol: QUADRATURE_TOL, endpoint_error, nodes, cumulative })
    }

    /// Width `1/L` of the stretched gap.
    pub fn gap(&self) -> f64 {
        1.0 / self.lipschitz
    }

    pub fn g(&self, x: f64) -> f64 {
        self.ramp.eval(x * self.lipschitz).0 / self.lipschitz
    }

    pub fn g_prime(&self, x: f64) -> f64 {
        self.ramp.eval(x * self.lipschitz).2
    }

    pub fn sup_g(&self) -> f64 {
        self.ramp.peak() / self.lipschitz
    }

    /// `I(C) = ∫_0^{1/L} f'`, recomputed from scratch.
    pub fn total_integral(&self) -> f64 {
        unit_integral(&self.ramp, self.eps, self.quadrature_tol) / self.lipschitz
    }

    pub fn f_prime(&self, x: f64) -> f64 {
        stretch_rate(&self.ramp, self.eps, x * self.lipschitz)
    }

    /// `f'' = C g' f'^2`.
    pub fn f_second(&self, x: f64) -> f64 {
        let fp = self.f_prime(x);
        self.c * self.g_prime(x) * fp * fp
    }

    /// `f''/f'^2 = C g'`.
    pub fn f_second_over_fp2(&self, x: f64) -> f64 {
        self.c * self.g_prime(x)
    }

    pub fn sup_f_prime(&self) -> f64 {
        1.0 / self.eps
    }

    pub fn f(&self, x: f64) -> f64 {
        let u = (x * self.lipschitz).clamp(0.0, 1.0);
        let k = match self.nodes.binary_search_by(|n| n.total_cmp(&u)) {
            Ok(k) => return self.cumulative[k] / self.lipschitz,
            Err(k) => k - 1,
        };
        let tail = adaptive_simpson(|v| stretch_rate(&self.ramp, self.eps, v), self.nodes[k], u, QUADRATURE_TOL / self.nodes.len() as f64);
        (self.cumulative[k] + tail) / self.lipschitz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_vanishes_near_both_ends() {
        let p = StretchProfile::new(8.0).unwrap();
        let gap = p.gap();
        assert_eq!(p.g(0.0), 0.0);
        assert_eq!(p.g(gap), 0.0);
        for k in 0..=100 {
            let x = gap / 128.0 * k as f64 / 100.0;
            assert_eq!(p.g(x), 0.0);
            assert_eq!(p.g(gap - x), 0.0);
            assert_eq!(p.f_prime(x), 1.0);
        }
    }

    #[test]
    fn ramp_slope_is_bounded_by_one() {
        let p = StretchProfile::new(32.0).unwrap();
        let n = 100_000;
        let max = (0..=n).map(|k| p.g_prime(p.gap() * k as f64 / n as f64).abs()).fold(0.0, f64::max);
        assert!(max <= 1.0, "max |g'| = {max}");
        let sup = p.sup_g() * p.lipschitz;
        assert!((0.8 / 4.0..=0.25).contains(&sup));
    }

    #[test]
    fn ramp_area_window() {
        for l in [2.0, 8.0, 128.0] {
            let p = StretchProfile::new(l).unwrap();
            let area = adaptive_simpson(|x| p.g(x), 0.0, p.gap(), 1e-15);
            let trapezoid = (0.25 / l) * 0.75 * (1.0 / l);
            let ratio = area / trapezoid;
            assert!(ratio > 0.6 && ratio < 1.0, "L = {l}: ratio {ratio}");
        }
    }

    #[test]
    fn constant_and_endpoint() {
        for l in [2.0, 8.0, 32.0, 128.0, 1000.0] {
            let p = StretchProfile::new(l).unwrap();
            // I(0) = 1/L
            assert!((unit_integral(&p.ramp, 1.0, 1e-13) / l - 1.0 / l).abs() < 1e-15);
            assert!(p.c > 0.0 && p.c < 1.0 / p.sup_g());
            assert!(p.c < 4.5 * l, "L = {l}: C = {}", p.c);
            assert!(p.sup_f_prime() < 2.0 * (l + 1.0) + 0.5, "L = {l}: sup f' = {}", p.sup_f_prime());
            assert!(p.sup_f_prime() >= 1.0);
            let target = 1.0 + 1.0 / l;
            assert!((p.total_integral() - target).abs() <= 1e-12 * target);
            assert!((p.f(p.gap()) - target).abs() <= 1e-12 * target, "L = {l}: {}", p.endpoint_error);
            assert_eq!(p.f(0.0), 0.0);
        }
        assert!(StretchProfile::new(1.5).is_err());
        assert!(StretchProfile::new(f64::NAN).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let p = StretchProfile::new(16.0).unwrap();
        let h = 1e-7 * p.gap();
        for k in 1..200 {
            let x = p.gap() * (k as f64 + 0.37) / 201.0;
            let fd = (p.f(x + h) - p.f(x - h)) / (2.0 * h);
            assert!((fd - p.f_prime(x)).abs() <= 1e-5 * p.f_prime(x), "x = {x}");
            let fd2 = (p.f_prime(x + h) - p.f_prime(x - h)) / (2.0 * h);
            assert!((fd2 - p.f_second(x)).abs() <= 1e-4 * (1.0 + p.f_second(x).abs()), "x = {x}: {fd2} vs {}", p.f_second(x));
        }
    }

    #[test]
    fn f_is_increasing() {
        let p = StretchProfile::new(8.0).unwrap();
        let mut prev = -1.0;
        for k in 0..=1000 {
            let v = p.f(p.gap() * k as f64 / 1000.0);
            assert!(v > prev);
            prev = v;
        }
    }
}
