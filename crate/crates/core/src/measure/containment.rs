use rand::Rng;
use serde::Serialize;

use super::sampling::{sharded, uniform_in};
use crate::error::{domain, Result};
use crate::folding::{FoldingPlan, Point4};

/// Radius bound `x1^2 + y1^2 <= 1/2` for images of block interiors, which
/// land in `[-1/2, 1/2]^2` in the first factor.
pub const BLOCK_RADIUS_SQ: f64 = 0.5;
pub const BLOCK_RADIUS_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct BlockContainmentReport {
    pub n: usize,
    pub seed: u64,
    /// Largest `x1^2 + y1^2` among the images.
    pub max_radius_sq: f64,
    pub argmax: Point4,
    pub bound: f64,
    pub all_inside: bool,
}

/// Push `n` uniform samples of the block interiors (block chosen uniformly,
/// then a uniform point of its preimage) through the plan.
pub fn block_containment(plan: &FoldingPlan, n: usize, seed: u64) -> Result<BlockContainmentReport> {
    if n == 0 {
        return domain("need at least one sample");
    }
    let m = plan.cells;
    let parts = sharded(n, seed, |rng, count| -> Result<(f64, Point4)> {
        let (mut best, mut arg) = (f64::NEG_INFINITY, [0.0; 4]);
        for _ in 0..count {
            let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
            let p = uniform_in(rng, &plan.block_preimage(i, j)?);
            let q = plan.eval(p)?;
            let r2 = q[0] * q[0] + q[1] * q[1];
            if r2 > best {
                best = r2;
                arg = p;
            }
        }
        Ok((best, arg))
    });
    let (mut max_radius_sq, mut argmax) = (f64::NEG_INFINITY, [0.0; 4]);
    for part in parts {
        let (b, a) = part?;
        if b > max_radius_sq {
            max_radius_sq = b;
            argmax = a;
        }
    }
    Ok(BlockContainmentReport {
        n,
        seed,
        max_radius_sq,
        argmax,
        bound: BLOCK_RADIUS_SQ,
        all_inside: max_radius_sq <= BLOCK_RADIUS_SQ + BLOCK_RADIUS_SLACK,
    })
}
