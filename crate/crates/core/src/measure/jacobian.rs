use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use super::sampling::{sharded, uniform_in};
use crate::error::{Error, Result};
use crate::folding::{
    symplectic_defect_dd, to_dd, to_f64, Box4, FoldingPlan, Jacobian4, JacobianDD, Point4, PrimitiveMap,
};

/// Relative step of the central differences: `h = FD_STEP * max(1, |x_k|)`.
pub const FD_STEP: f64 = 1e-6;
pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

/// A map `R^4 -> R^4` with a Jacobian.
pub trait Map4: Sync {
    fn eval(&self, p: Point4) -> Result<Point4>;

    /// Analytic Jacobian, accumulated in double-double where the map is a
    /// composition.
    fn jacobian(&self, p: Point4) -> Result<JacobianDD>;

    /// Central-difference Jacobian.
    fn fd_jacobian(&self, p: Point4) -> Result<JacobianDD> {
        Ok(to_dd(&central_difference(|q| self.eval(q), p)?))
    }

    fn jacobian_in(&self, p: Point4, mode: JacobianMode) -> Result<JacobianDD> {
        match mode {
            JacobianMode::Analytic => self.jacobian(p),
            JacobianMode::FiniteDifference => self.fd_jacobian(p),
        }
    }
}

pub fn central_difference<F: Fn(Point4) -> Result<Point4>>(f: F, p: Point4) -> Result<Jacobian4> {
    let mut j = Matrix4::zeros();
    for k in 0..4 {
        let h = FD_STEP * p[k].abs().max(1.0);
        let (mut a, mut b) = (p, p);
        a[k] += h;
        b[k] -= h;
        let (fa, fb) = (f(a)?, f(b)?);
        for i in 0..4 {
            j[(i, k)] = (fa[i] - fb[i]) / (2.0 * h);
        }
    }
    Ok(j)
}

pub struct Identity;

impl Map4 for Identity {
    fn eval(&self, p: Point4) -> Result<Point4> {
        Ok(p)
    }
    fn jacobian(&self, _: Point4) -> Result<JacobianDD> {
        Ok(JacobianDD::identity())
    }
}

/// `p -> A p + b`.
pub struct AffineMap4 {
    pub matrix: Jacobian4,
    pub shift: Point4,
}

impl Map4 for AffineMap4 {
    fn eval(&self, p: Point4) -> Result<Point4> {
        let v = self.matrix * Vector4::from(p);
        Ok([0, 1, 2, 3].map(|k| v[k] + self.shift[k]))
    }
    fn jacobian(&self, _: Point4) -> Result<JacobianDD> {
        Ok(to_dd(&self.matrix))
    }
}

impl Map4 for FoldingPlan {
    fn eval(&self, p: Point4) -> Result<Point4> {
        FoldingPlan::eval(self, p)
    }

    fn jacobian(&self, p: Point4) -> Result<JacobianDD> {
        Ok(self.eval_with_jacobian_dd(p)?.1)
    }

    /// Central differences of each stage at its own input, chained in
    /// double-double. Differencing the whole composition is useless here:
    /// the plan's Jacobian reaches `10^6` and the difference noise is
    /// amplified quadratically in `J^T Ω J`.
    fn fd_jacobian(&self, p: Point4) -> Result<JacobianDD> {
        let stages = self.trace(p)?;
        let mut jac = JacobianDD::identity();
        for (k, map) in self.stack.iter().enumerate() {
            let j = central_difference(|q| Ok(map.eval(&self.stretch, q)?.0), stages[k].0)?;
            jac = to_dd(&j) * jac;
        }
        Ok(jac)
    }
}

/// One stage of a plan, evaluated with the plan's stretch profile.
pub struct PlanStage<'a> {
    pub plan: &'a FoldingPlan,
    pub index: usize,
}

impl PlanStage<'_> {
    pub fn map(&self) -> &PrimitiveMap {
        &self.plan.stack[self.index]
    }
}

impl Map4 for PlanStage<'_> {
    fn eval(&self, p: Point4) -> Result<Point4> {
        Ok(self.map().eval(&self.plan.stretch, p)?.0)
    }
    fn jacobian(&self, p: Point4) -> Result<JacobianDD> {
        Ok(to_dd(&self.map().eval(&self.plan.stretch, p)?.1))
    }
}

/// `max |J^T Ω J - Ω|` at `p`.
pub fn symplecticity_residual<M: Map4 + ?Sized>(map: &M, p: Point4, mode: JacobianMode) -> Result<f64> {
    Ok(symplectic_defect_dd(&map.jacobian_in(p, mode)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct SymplecticityReport {
    pub mode: JacobianMode,
    pub max: f64,
    pub mean: f64,
    pub argmax: Point4,
    pub n: usize,
    pub seed: u64,
}

/// Merge `(max, argmax, sum)` triples in shard order.
fn merge_max(parts: Vec<(f64, Point4, f64)>) -> (f64, Point4, f64) {
    parts.into_iter().fold((f64::NEG_INFINITY, [0.0; 4], 0.0), |acc, x| {
        let (m, a) = if x.0 > acc.0 { (x.0, x.1) } else { (acc.0, acc.1) };
        (m, a, acc.2 + x.2)
    })
}

pub fn symplecticity_scan<M: Map4 + ?Sized>(
    map: &M,
    region: &Box4,
    n: usize,
    seed: u64,
    mode: JacobianMode,
) -> Result<SymplecticityReport> {
    let parts = sharded(n, seed, |rng, count| -> Result<(f64, Point4, f64)> {
        let mut best = (f64::NEG_INFINITY, [0.0; 4], 0.0);
        for _ in 0..count {
            let p = uniform_in(rng, region);
            let r = symplecticity_residual(map, p, mode)?;
            if r > best.0 {
                best.0 = r;
                best.1 = p;
            }
            best.2 += r;
        }
        Ok(best)
    });
    let (max, argmax, sum) = merge_max(parts.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(SymplecticityReport { mode, max: max.max(0.0), mean: if n > 0 { sum / n as f64 } else { 0.0 }, argmax, n, seed })
}

/// Largest singular value by power iteration on `J^T J`; falls back to a
/// full SVD when the iteration stalls. Returns `(norm, used_fallback)`.
pub fn spectral_norm(j: &Jacobian4) -> (f64, bool) {
    let jtj = j.transpose() * j;
    // start from the heaviest column, which cannot be orthogonal to the top
    // eigenvector unless J^T J vanishes
    let col = (0..4).max_by(|&a, &b| jtj.column(a).norm().total_cmp(&jtj.column(b).norm())).unwrap();
    let mut v: Vector4<f64> = jtj.column(col).into_owned();
    if v.norm() == 0.0 {
        return (0.0, false);
    }
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = jtj * v;
        let n = w.norm();
        if n == 0.0 {
            return (0.0, false);
        }
        let next = v.dot(&w);
        v = w / n;
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            return (next.max(0.0).sqrt(), false);
        }
        lambda = next;
    }
    (j.singular_values().max(), true)
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    pub mode: JacobianMode,
    /// Largest spectral norm of the Jacobian over the samples.
    pub max: f64,
    pub mean: f64,
    pub argmax: Point4,
    /// Largest `|Φ(a) - Φ(b)| / |a - b|` over random pairs.
    pub max_secant: f64,
    pub svd_fallbacks: usize,
    pub n: usize,
    pub seed: u64,
}

pub fn lipschitz_estimate<M: Map4 + ?Sized>(map: &M, region: &Box4, n: usize, seed: u64) -> Result<LipschitzReport> {
    let parts = sharded(n, seed, |rng, count| -> Result<(f64, Point4, f64, f64, usize)> {
        let (mut best, mut arg, mut sum, mut secant, mut fallbacks) = (f64::NEG_INFINITY, [0.0; 4], 0.0, 0.0f64, 0);
        for _ in 0..count {
            let p = uniform_in(rng, region);
            let (s, fb) = spectral_norm(&to_f64(&map.jacobian(p)?));
            fallbacks += fb as usize;
            sum += s;
            if s > best {
                best = s;
                arg = p;
            }
            let (a, b) = (uniform_in(rng, region), uniform_in(rng, region));
            let d: f64 = (0..4).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt();
            if d > 0.0 {
                let (fa, fb) = (map.eval(a)?, map.eval(b)?);
                let e: f64 = (0..4).map(|k| (fa[k] - fb[k]).powi(2)).sum::<f64>().sqrt();
                secant = secant.max(e / d);
            }
        }
        Ok((best, arg, sum, secant, fallbacks))
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    if parts.is_empty() {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let (max, argmax, sum) = merge_max(parts.iter().map(|p| (p.0, p.1, p.2)).collect());
    Ok(LipschitzReport {
        mode: JacobianMode::Analytic,
        max,
        mean: sum / n as f64,
        argmax,
        max_secant: parts.iter().map(|p| p.3).fold(0.0, f64::max),
        svd_fallbacks: parts.iter().map(|p| p.4).sum(),
        n,
        seed,
    })
}
