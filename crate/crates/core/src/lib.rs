//! Separation of variables for Laplace's equation in 5-cyclide coordinates.
//!
//! The crate is layered bottom-up:
//!
//! * [`geometry`]: focal parameters, sphero-conal and stereographic maps,
//!   5-cyclide coordinates, symmetries, scale factors, regions and meshes.
//! * [`elliptic`]: the weight `ω`, the elliptic integral `Ω` and its inverse `φ`.
//! * [`sturm`]: single Sturm–Liouville equations in the `t = Ω(s)` variable.
//! * [`eigensolver`]: the three two-parameter eigenvalue problems.
//! * [`harmonics`]: internal cyclidic harmonics and Laplacian checks.
//! * [`dirichlet`]: series solutions of the three Dirichlet problems.

pub mod chebyshev;
pub mod dirichlet;
pub mod eigensolver;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod harmonics;
pub mod ode;
pub mod quadrature;
pub mod sturm;

pub use error::{Error, Result};
pub use geometry::{CyclideCoords, ParamsA, Point3, Point4, RegionKind, RegionSpec, SignProfile};
