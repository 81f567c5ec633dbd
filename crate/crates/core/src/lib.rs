//! Constructive side of quantitative symplectic non-squeezing in dimension four.
//!
//! * [`markov`] decides, in exact arithmetic, when a Markov triangle fits
//!   into the half-strip `R>=0 x [0,1)` after an integral affine change of
//!   coordinates.
//! * [`folding`] builds the Lipschitz-controlled symplectic embedding of the
//!   cube `[-R,R]^4` whose image lies in the unit cylinder up to a volume
//!   defect of order `1/L`.
//! * [`model`] holds the explicit model maps: the Oakley–Usher map on the
//!   cotangent disk bundle of `RP^n`, toric action-angle coordinates and the
//!   Lagrangian disk used as a removed set.
//! * [`measure`] certifies all of the above numerically: symplecticity,
//!   Lipschitz constants, Monte-Carlo volumes and Minkowski fits.

pub mod error;
pub mod folding;
pub mod markov;
pub mod measure;
pub mod model;

pub use error::{Error, Result};
