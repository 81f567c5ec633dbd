//! Exact arithmetic for Markov triples and their lattice triangles.
//!
//! Every quantity here is an arbitrary-precision integer or rational; no
//! floating point is involved anywhere in the module. Values are immutable
//! after construction, so all functions are safe to call concurrently.

mod lattice;
mod normal_form;
pub mod qstr;
mod strip;
mod triangle;
mod triple;

pub use lattice::{affine_distance, affine_length, primitive_direction, unimodular_to_e1, IntAffineMap2, QPoint};
pub use normal_form::{canonical_form, is_aff_equivalent};
pub use strip::{
    find_fitting_triple, find_fitting_triple_with_cap, fit_in_strip, BranchStep, FitResult, HalfStripFit,
    NoFitCertificate, DEFAULT_BRANCH_CAP,
};
pub use triangle::{build_triangle, build_triangle_with_chart, chart_embedding, ChartEmbedding3, MarkovTriangle, RationalTriangle};
pub use triple::{branch_sequence, enumerate_tree, is_markov, mutate, mutate_tracked, MarkovTriple};

/// Arbitrary-precision rational used throughout the module.
pub type Q = num_rational::BigRational;
