//! Explicit model maps: the Oakley–Usher map from the unit codisk bundle of
//! real projective space to complex projective space, toric action-angle
//! coordinates, and the Lagrangian disk used as a removed set.

mod check;
mod disk;
mod ou;
mod toric;

pub use check::{ou_check, random_cotangent, random_rotation, random_unit3, OuCheckReport};
pub use disk::{disk_tube_volume, lagrangian_disk_distance};
pub use ou::{
    canonical_form, fubini_study, ou_f, ou_lift, ou_map, ou_pullback_forms, ou_pullback_residual, rotate,
    rotate_projective, tangent_basis, CotangentPoint, BOUNDARY_SNAP, ProjectivePoint, ProjectivePointC3, PullbackForms, C64,
    CONSTRAINT_TOL, PHASE_CUTOFF, PULLBACK_MAX_NORM,
};
pub use toric::{
    angles, moment_map, toric_coords, toric_coords_with_jacobian, triangle_torus_containment, TorusContainmentReport,
};
