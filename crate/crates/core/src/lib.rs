//! Numerical geometric tomography for convex bodies under general densities.
//!
//! The crate computes measures of bodies, their central sections and
//! projections, weighted projections `P_{μ,K}`, mixed measures, and checks the
//! inequalities that relate them on sampled direction grids.
//!
//! ```
//! use geomtomo::{BodySpec, EvalConfig, MeasureSpec, functionals};
//!
//! let ball = BodySpec::ball(3, 1.0).unwrap();
//! let leb = MeasureSpec::lebesgue(3);
//! let v = functionals::body_measure(&leb, &ball, &EvalConfig::default()).unwrap();
//! assert!((v.value - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
//! ```

pub mod bodies;
pub mod error;
pub mod functionals;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod verifiers;

pub use bodies::{BodyKind, BodySpec, BoundaryElement, Frame, Radii};
pub use error::{GeomError, Result};
pub use functionals::{EvalConfig, FunctionalValue, Method};
pub use measures::{Concavity, MeasureKind, MeasureMeta, MeasureSpec, SupNorm};
pub use quadrature::{Estimate, QuadratureRule};
pub use verifiers::{CheckReport, Verdict};
