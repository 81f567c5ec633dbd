//! Numerical certification: symplecticity and Lipschitz scans, seeded
//! Monte Carlo volumes, and Minkowski-content fits of tube volumes.
//!
//! Every estimator splits its samples into fixed-size shards, each with its
//! own ChaCha stream keyed by `(seed, shard)`; shard results are merged in
//! shard order, so a fixed seed gives bit-identical output on any number of
//! threads.

mod containment;
mod jacobian;
mod minkowski;
mod sampling;
mod volume;

pub use containment::{block_containment, BlockContainmentReport, BLOCK_RADIUS_SLACK, BLOCK_RADIUS_SQ};
pub use jacobian::{
    central_difference, lipschitz_estimate, spectral_norm, symplecticity_residual, symplecticity_scan, AffineMap4,
    Identity, JacobianMode, LipschitzReport, Map4, PlanStage, SymplecticityReport, FD_STEP, POWER_MAX_ITER, POWER_TOL,
};
pub use minkowski::{
    minkowski_fit, neighborhood_curve, theorem31_check, unit_ball_volume, ContentCheck, CurvePoint, MinkowskiCurve,
    ObstructionRow, ObstructionReport, CONTENT_REL_SIGMA, THEOREM_SLACK,
};
pub use sampling::{derive_seed, shard_rng, sharded, uniform_in, SHARD_SIZE};
pub use volume::{
    cube, defect_volume, disk_neighborhood_box, mc_volume, neighborhood_volume, wall_volume_in_cube,
    VolumeEstimate,
};
