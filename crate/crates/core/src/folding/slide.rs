use serde::Serialize;

/// Bound on `|rho'|` (quintic smoothstep, jump 2 over a unit gap: 15/4).
pub const RHO_PRIME_BOUND: f64 = 4.0;
/// Bound on `|rho''|` (actual maximum `20/sqrt(3)`).
pub const RHO_SECOND_BOUND: f64 = 16.0;

/// The step function `rho` driving both slide moves.
///
/// `rho = 2i` on `[2i, 2i+1]` for `0 <= i < num_cells`, constant `0` below
/// and `2(num_cells - 1)` above, and a quintic smoothstep from `2i` to
/// `2i + 2` on each gap `(2i+1, 2i+2)`. The result is C^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlideProfile {
    pub num_cells: usize,
}

fn s5(t: f64) -> (f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        t3 * (10.0 - 15.0 * t + 6.0 * t2),
        30.0 * t2 * (1.0 - t) * (1.0 - t),
        60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
    )
}

impl SlideProfile {
    pub fn new(num_cells: usize) -> Self {
        SlideProfile { num_cells: num_cells.max(1) }
    }

    /// Plateau value on `[2i, 2i+1]`.
    pub fn plateau(&self, i: usize) -> f64 {
        2.0 * i.min(self.num_cells - 1) as f64
    }

    /// `(rho, rho', rho'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let top = 2.0 * (self.num_cells - 1) as f64;
        if x <= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        if x >= top {
            return (top, 0.0, 0.0);
        }
        let i = (x / 2.0).floor();
        let r = x - 2.0 * i;
        if r <= 1.0 {
            return (2.0 * i, 0.0, 0.0);
        }
        // transition on (2i + 1, 2i + 2) to the next plateau 2i + 2
        let (s, ds, dds) = s5(r - 1.0);
        (2.0 * i + 2.0 * s, 2.0 * ds, 2.0 * dds)
    }

    pub fn rho(&self, x: f64) -> f64 {
        self.eval(x).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_are_exact() {
        let p = SlideProfile::new(5);
        for i in 0..5 {
            for k in 0..=20 {
                let x = 2.0 * i as f64 + k as f64 / 20.0;
                assert_eq!(p.eval(x), (2.0 * i as f64, 0.0, 0.0));
            }
        }
        assert_eq!(p.rho(-3.0), 0.0);
        assert_eq!(p.rho(100.0), 8.0);
    }

    #[test]
    fn derivative_bounds_and_continuity() {
        let p = SlideProfile::new(4);
        let n = 200_000;
        let (mut d1, mut d2) = (0.0f64, 0.0f64);
        for k in 0..=n {
            let x = -1.0 + 10.0 * k as f64 / n as f64;
            let (_, a, b) = p.eval(x);
            d1 = d1.max(a.abs());
            d2 = d2.max(b.abs());
        }
        assert!(d1 <= RHO_PRIME_BOUND && d1 > 3.7);
        assert!(d2 <= RHO_SECOND_BOUND && d2 > 11.0);
        // seams
        for x in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
            let e = 1e-9;
            let (l, r) = (p.eval(x - e), p.eval(x + e));
            assert!((l.0 - r.0).abs() < 1e-8 && (l.1 - r.1).abs() < 1e-6 && (l.2 - r.2).abs() < 1e-6);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let p = SlideProfile::new(3);
        let h = 1e-6;
        for k in 0..500 {
            let x = 0.5 + 4.5 * (k as f64 + 0.5) / 500.0;
            let (_, d1, d2) = p.eval(x);
            assert!(((p.rho(x + h) - p.rho(x - h)) / (2.0 * h) - d1).abs() < 1e-6);
            assert!(((p.eval(x + h).1 - p.eval(x - h).1) / (2.0 * h) - d2).abs() < 1e-5);
        }
    }
}
