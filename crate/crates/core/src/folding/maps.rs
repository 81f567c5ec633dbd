use nalgebra::{Matrix2, Matrix4};
use serde::Serialize;
use twofloat::TwoFloat;

use super::profile::StretchProfile;
use super::slide::SlideProfile;
use crate::error::{domain, Result};

pub type Point4 = [f64; 4];
pub type Jacobian4 = Matrix4<f64>;

/// Slack allowed when testing membership of rounded coordinates.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Which symplectic plane `(x_k, y_k)` a factor map acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Factor {
    First,
    Second,
}

impl Factor {
    /// Coordinate offset of the plane in `(x1, y1, x2, y2)`.
    pub fn offset(self) -> usize {
        match self {
            Factor::First => 0,
            Factor::Second => 2,
        }
    }
}

/// Cells `X_i = [i, i + 1 - 1/L) x [0, 1]` separated by gaps of width `1/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellLayout {
    pub cells: usize,
    pub lipschitz: f64,
}

/// Position of an abscissa inside a [`CellLayout`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellSlot {
    Cell(usize),
    /// Gap after cell `i`, with offset `s in [0, 1/L]` into the gap.
    Gap(usize, f64),
}

impl CellLayout {
    pub fn width(&self) -> f64 {
        self.cells as f64
    }

    pub fn cell_length(&self) -> f64 {
        1.0 - 1.0 / self.lipschitz
    }

    pub fn locate(&self, x: f64) -> Result<CellSlot> {
        if !(x >= -DOMAIN_SLACK && x <= self.width() + DOMAIN_SLACK) {
            return domain(format!("abscissa {x} outside [0, {}]", self.cells));
        }
        let x = x.clamp(0.0, self.width());
        let i = (x.floor() as usize).min(self.cells - 1);
        let s = x - i as f64;
        let len = self.cell_length();
        Ok(if s < len { CellSlot::Cell(i) } else { CellSlot::Gap(i, (s - len).min(1.0 / self.lipschitz)) })
    }
}

/// The planar stretch ("taffy") map on `[0, M] x [0, 1]`.
///
/// Cell `i` is translated by `(i, 0)`; the gap after it is stretched by
/// `(s, y) -> (2i + 1 - 1/L + f(s), 1/2 + (y - 1/2)/f'(s))`.
pub fn taffy_map(profile: &StretchProfile, cells: &CellLayout, p: [f64; 2]) -> Result<([f64; 2], Matrix2<f64>)> {
    let [x, y] = p;
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&y) {
        return domain(format!("ordinate {y} outside [0, 1]"));
    }
    match cells.locate(x)? {
        CellSlot::Cell(i) => Ok(([x + i as f64, y], Matrix2::identity())),
        CellSlot::Gap(i, s) => {
            let fp = profile.f_prime(s);
            let base = 2.0 * i as f64 + cells.cell_length();
            let dy = y - 0.5;
            let out = [base + profile.f(s), 0.5 + dy / fp];
            let jac = Matrix2::new(fp, 0.0, -dy * profile.f_second_over_fp2(s), 1.0 / fp);
            Ok((out, jac))
        }
    }
}

/// Time-one map of `H = -rho(x1) x2`.
pub fn slide1(profile: &SlideProfile, p: Point4) -> (Point4, Jacobian4) {
    let [x1, y1, x2, y2] = p;
    let (r, r1, r2) = profile.eval(x1);
    let out = [x1, y1 + r1 * x2, x2, y2 + r];
    #[rustfmt::skip]
    let jac = Matrix4::new(
        1.0,     0.0, 0.0, 0.0,
        r2 * x2, 1.0, r1,  0.0,
        0.0,     0.0, 1.0, 0.0,
        r1,      0.0, 0.0, 1.0,
    );
    (out, jac)
}

/// Time-one map of `H = -rho(y2) y1` (same sign convention as [`slide1`]):
/// shifts `x1` back by `rho(y2)`.
pub fn slide2(profile: &SlideProfile, p: Point4) -> (Point4, Jacobian4) {
    let [x1, y1, x2, y2] = p;
    let (r, r1, r2) = profile.eval(y2);
    let out = [x1 - r, y1, x2 - r1 * y1, y2];
    #[rustfmt::skip]
    let jac = Matrix4::new(
        1.0, 0.0, 0.0, -r1,
        0.0, 1.0, 0.0, 0.0,
        0.0, -r1, 1.0, -r2 * y1,
        0.0, 0.0, 0.0, 1.0,
    );
    (out, jac)
}

/// The map `[-R, R]^4 -> ([0, 4R^2] x [0, 1])^2`,
/// `(x, y) -> (2R (x + R), (y + R) / 2R)` on each factor.
pub fn cube_to_prism(r: f64) -> Result<PrimitiveMap> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("R must be positive, got {r}"));
    }
    let (a, b) = (2.0 * r, 1.0 / (2.0 * r));
    let matrix = Matrix4::from_diagonal(&nalgebra::Vector4::new(a, b, a, b));
    let shift = [a * r, 0.5, a * r, 0.5];
    Ok(PrimitiveMap::LinearSymplectic { matrix, shift })
}

/// One closed-form symplectic stage of the folding embedding.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum PrimitiveMap {
    /// `p -> A p + b` with `A` symplectic.
    LinearSymplectic { matrix: Matrix4<f64>, shift: Point4 },
    Translation { shift: Point4 },
    Taffy { factor: Factor, cells: CellLayout },
    Slide1 { profile: SlideProfile },
    Slide2 { profile: SlideProfile },
}

impl PrimitiveMap {
    pub fn name(&self) -> &'static str {
        match self {
            PrimitiveMap::LinearSymplectic { .. } => "linear_symplectic",
            PrimitiveMap::Translation { .. } => "translation",
            PrimitiveMap::Taffy { factor: Factor::First, .. } => "taffy_1",
            PrimitiveMap::Taffy { factor: Factor::Second, .. } => "taffy_2",
            PrimitiveMap::Slide1 { .. } => "slide_1",
            PrimitiveMap::Slide2 { .. } => "slide_2",
        }
    }

    /// Value and Jacobian at `p`. The stretch profile is shared by the
    /// plan and passed in.
    pub fn eval(&self, stretch: &StretchProfile, p: Point4) -> Result<(Point4, Jacobian4)> {
        match self {
            PrimitiveMap::LinearSymplectic { matrix, shift } => {
                let v = matrix * nalgebra::Vector4::from(p);
                Ok(([v[0] + shift[0], v[1] + shift[1], v[2] + shift[2], v[3] + shift[3]], *matrix))
            }
            PrimitiveMap::Translation { shift } => {
                Ok(([p[0] + shift[0], p[1] + shift[1], p[2] + shift[2], p[3] + shift[3]], Matrix4::identity()))
            }
            PrimitiveMap::Taffy { factor, cells } => {
                let k = factor.offset();
                let (q, j2) = taffy_map(stretch, cells, [p[k], p[k + 1]])?;
                let mut out = p;
                out[k] = q[0];
                out[k + 1] = q[1];
                let mut jac = Matrix4::identity();
                jac.fixed_view_mut::<2, 2>(k, k).copy_from(&j2);
                Ok((out, jac))
            }
            PrimitiveMap::Slide1 { profile } => Ok(slide1(profile, p)),
            PrimitiveMap::Slide2 { profile } => Ok(slide2(profile, p)),
        }
    }
}

/// The standard symplectic matrix for coordinates `(x1, y1, x2, y2)`.
pub fn omega() -> Jacobian4 {
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    m
}

/// `max |J^T Ω J - Ω|`.
pub fn symplectic_defect(j: &Jacobian4) -> f64 {
    (j.transpose() * omega() * j - omega()).abs().max()
}

/// Jacobian accumulated in double-double arithmetic.
pub type JacobianDD = Matrix4<TwoFloat>;

pub fn to_dd(j: &Jacobian4) -> JacobianDD {
    j.map(TwoFloat::from)
}

pub fn to_f64(j: &JacobianDD) -> Jacobian4 {
    j.map(|v| v.hi() + v.lo())
}

/// `max |J^T Ω J - Ω|` evaluated in double-double arithmetic.
///
/// Products of symplectic shears carry entries of size `10^5` or more whose
/// contributions to `J^T Ω J` cancel; plain `f64` loses about `|J|^2 eps`
/// to that cancellation.
pub fn symplectic_defect_dd(j: &JacobianDD) -> f64 {
    let om = to_dd(&omega());
    let r = j.transpose() * om * j - om;
    r.iter().map(|v| (v.hi() + v.lo()).abs()).fold(0.0, f64::max)
}
