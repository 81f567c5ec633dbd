use nalgebra::Matrix4;
use serde::Serialize;

use super::maps::{cube_to_prism, to_dd, CellLayout, CellSlot, Factor, Jacobian4, JacobianDD, Point4, PrimitiveMap};
use super::profile::StretchProfile;
use super::slide::SlideProfile;
use crate::error::{domain, Result};

/// The folding embedding of the cube `[-R, R]^4` as a stack of primitive
/// symplectic maps, applied first to last.
#[derive(Debug, Clone, Serialize)]
pub struct FoldingPlan {
    pub r: f64,
    pub lipschitz: f64,
    /// Cells per factor, `ceil(4 R^2)`.
    pub cells: usize,
    pub stretch: StretchProfile,
    pub slide: SlideProfile,
    pub stack: Vec<PrimitiveMap>,
}

/// Number of cells per factor for radius `R`.
pub fn cell_count(r: f64) -> usize {
    // guard against 4R^2 landing a hair above an integer
    let v = 4.0 * r * r;
    let rounded = v.round();
    if (v - rounded).abs() <= 1e-12 * v.max(1.0) {
        (rounded as usize).max(1)
    } else {
        (v.ceil() as usize).max(1)
    }
}

pub fn compose_plan(r: f64, lipschitz: f64) -> Result<FoldingPlan> {
    let prism = cube_to_prism(r)?;
    let stretch = StretchProfile::new(lipschitz)?;
    let cells = cell_count(r);
    let layout = CellLayout { cells, lipschitz };
    let slide = SlideProfile::new(cells);
    let stack = vec![
        prism,
        PrimitiveMap::Taffy { factor: Factor::First, cells: layout },
        PrimitiveMap::Taffy { factor: Factor::Second, cells: layout },
        PrimitiveMap::Slide1 { profile: slide },
        PrimitiveMap::Slide2 { profile: slide },
        PrimitiveMap::Translation { shift: [-0.5, -0.5, 0.0, 0.0] },
    ];
    Ok(FoldingPlan { r, lipschitz, cells, stretch, slide, stack })
}

/// `M^2 (2/L - 1/L^2)`: prism volume of the walls between blocks.
pub fn wall_volume_closed_form(r: f64, lipschitz: f64) -> Result<f64> {
    if !(r > 0.0) || !(lipschitz >= 2.0) {
        return domain(format!("need R > 0 and L >= 2, got R = {r}, L = {lipschitz}"));
    }
    let m = cell_count(r) as f64;
    Ok(m * m * (2.0 / lipschitz - 1.0 / (lipschitz * lipschitz)))
}

/// Axis-aligned box `[lo_k, hi_k]` in `R^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Box4 {
    pub lo: Point4,
    pub hi: Point4,
}

impl Box4 {
    pub fn corners(&self) -> [Point4; 16] {
        let mut out = [[0.0; 4]; 16];
        for (mask, c) in out.iter_mut().enumerate() {
            for k in 0..4 {
                c[k] = if mask >> k & 1 == 1 { self.hi[k] } else { self.lo[k] };
            }
        }
        out
    }

    pub fn contains(&self, p: &Point4, slack: f64) -> bool {
        (0..4).all(|k| p[k] >= self.lo[k] - slack && p[k] <= self.hi[k] + slack)
    }

    /// True when the interiors overlap.
    pub fn overlaps(&self, other: &Box4) -> bool {
        (0..4).all(|k| self.lo[k] < other.hi[k] && other.lo[k] < self.hi[k])
    }

    pub fn volume(&self) -> f64 {
        (0..4).map(|k| self.hi[k] - self.lo[k]).product()
    }
}

impl FoldingPlan {
    fn layout(&self) -> CellLayout {
        CellLayout { cells: self.cells, lipschitz: self.lipschitz }
    }

    pub fn check_domain(&self, p: &Point4) -> Result<()> {
        if p.iter().all(|v| v.abs() <= self.r) {
            Ok(())
        } else {
            domain(format!("point {p:?} outside K(R) with R = {}", self.r))
        }
    }

    pub fn eval(&self, p: Point4) -> Result<Point4> {
        Ok(self.eval_with_jacobian(p)?.0)
    }

    /// Value and chain-rule Jacobian.
    pub fn eval_with_jacobian(&self, p: Point4) -> Result<(Point4, Jacobian4)> {
        self.check_domain(&p)?;
        let mut q = p;
        let mut jac = Matrix4::identity();
        for map in &self.stack {
            let (next, j) = map.eval(&self.stretch, q)?;
            jac = j * jac;
            q = next;
        }
        Ok((q, jac))
    }

    /// As [`Self::eval_with_jacobian`], with the chain product accumulated
    /// in double-double arithmetic.
    pub fn eval_with_jacobian_dd(&self, p: Point4) -> Result<(Point4, JacobianDD)> {
        self.check_domain(&p)?;
        let mut q = p;
        let mut jac = JacobianDD::identity();
        for map in &self.stack {
            let (next, j) = map.eval(&self.stretch, q)?;
            jac = to_dd(&j) * jac;
            q = next;
        }
        Ok((q, jac))
    }

    /// Images after each stage, starting with `p` itself.
    pub fn trace(&self, p: Point4) -> Result<Vec<(Point4, Jacobian4)>> {
        self.check_domain(&p)?;
        let mut out = vec![(p, Matrix4::identity())];
        let mut q = p;
        for map in &self.stack {
            let (next, j) = map.eval(&self.stretch, q)?;
            out.push((next, j));
            q = next;
        }
        Ok(out)
    }

    /// Prism coordinates of a cube point.
    pub fn to_prism(&self, p: Point4) -> Result<Point4> {
        self.check_domain(&p)?;
        Ok(self.stack[0].eval(&self.stretch, p)?.0)
    }

    /// Block `(i, j)` containing `p`, or `None` when `p` lies in a wall.
    pub fn block_index(&self, p: Point4) -> Result<Option<(usize, usize)>> {
        let q = self.to_prism(p)?;
        let layout = self.layout();
        Ok(match (layout.locate(q[0])?, layout.locate(q[2])?) {
            (CellSlot::Cell(i), CellSlot::Cell(j)) => Some((i, j)),
            _ => None,
        })
    }

    /// Whether `p` lies in a wall of the first factor.
    pub fn in_first_wall(&self, p: Point4) -> Result<bool> {
        let q = self.to_prism(p)?;
        Ok(matches!(self.layout().locate(q[0])?, CellSlot::Gap(..)))
    }

    /// Preimage of `X_i x X_j` in the cube.
    pub fn block_preimage(&self, i: usize, j: usize) -> Result<Box4> {
        if i >= self.cells || j >= self.cells {
            return domain(format!("block ({i}, {j}) outside {} cells", self.cells));
        }
        let (r, len) = (self.r, self.layout().cell_length());
        let s = 1.0 / (2.0 * r);
        Ok(Box4 {
            lo: [i as f64 * s - r, -r, j as f64 * s - r, -r],
            hi: [(i as f64 + len) * s - r, r, (j as f64 + len) * s - r, r],
        })
    }

    /// Image of block `(i, j)` predicted from the cell bookkeeping.
    pub fn block_target(&self, i: usize, j: usize) -> Result<Box4> {
        if i >= self.cells || j >= self.cells {
            return domain(format!("block ({i}, {j}) outside {} cells", self.cells));
        }
        let len = self.layout().cell_length();
        let (i, j) = (i as f64, j as f64);
        Ok(Box4 {
            lo: [-0.5, -0.5, 2.0 * j, 2.0 * i],
            hi: [len - 0.5, 0.5, 2.0 * j + len, 2.0 * i + 1.0],
        })
    }
}
