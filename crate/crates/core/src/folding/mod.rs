//! The Lipschitz folding embedding of a cube into a cylinder.
//!
//! The embedding is a fixed stack of closed-form symplectic maps: a linear
//! change to a long prism, a stretch ("taffy") map on each factor that opens
//! unit gaps between cells, two slide moves that stack the cells on top of
//! each other, and a final translation. Every stage returns its value and an
//! analytic Jacobian. Plans are immutable once built.

mod maps;
mod plan;
mod profile;
mod quadrature;
mod slide;

pub use maps::{
    cube_to_prism, omega, slide1, slide2, symplectic_defect, symplectic_defect_dd, taffy_map, to_dd, to_f64, CellLayout, CellSlot, Factor, Jacobian4,
    JacobianDD, Point4, PrimitiveMap, DOMAIN_SLACK,
};
pub use plan::{cell_count, compose_plan, wall_volume_closed_form, Box4, FoldingPlan};
pub use profile::{build_g, solve_c, RampShape, StretchProfile, ENDPOINT_REL_TOL, MAX_BISECTION_STEPS, QUADRATURE_TOL};
pub use quadrature::{adaptive_simpson, bisect};
pub use slide::{SlideProfile, RHO_PRIME_BOUND, RHO_SECOND_BOUND};
