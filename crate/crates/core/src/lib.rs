//! Numerical differential geometry of surfaces in Minkowski 3-space.
//!
//! Everything is built on exact truncated Taylor jets in the chart variables
//! `(s, t)`: fundamental forms, the Gauss map, mean/Gaussian/second Gaussian
//! curvature and the Laplace–Beltrami operator of the induced metric. A
//! finite-difference engine ([`oracle`]) recomputes the same quantities
//! independently so that every verdict carries a dual-engine agreement.

// `!(x <= tol)` is deliberate: NaN must fail a check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod catalog;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod jet;
pub mod lorentz;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod ruled;
pub mod verify;

pub use catalog::{build, list_entries, CatalogEntry, Params};
pub use error::{Error, Result};
pub use geometry::{PointGeometry, SurfacePatch};
pub use jet::Jet2;
pub use lorentz::{CausalCharacter, LVec3, NormMode, Scalar};
pub use verify::{ClaimResult, Verdict};
