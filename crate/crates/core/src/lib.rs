//! Quadratic polynomials and complex Hénon maps near semi-parabolic
//! parameters.
//!
//! The crate follows one parameter family end to end:
//!
//! * [`poly1d`]: the quadratic family `p_t(x) = x² + c_t` whose fixed point
//!   has multiplier `λ_t = (1+t)e^{2πip/q}`, its equipotentials, the
//!   pullback iteration converging to the Carathéodory loop, and the 1-D
//!   normal form with its attracting/repelling sectors.
//! * [`henon`]: the Hénon maps `H(x,y) = (x² + c + ay, ax)` on the curve of
//!   parameters where `H` keeps a fixed point with multiplier `λ_t`.
//! * [`normalform2d`]: the perturbed normal form of `H` at that fixed point
//!   and petal/trapping checks.
//! * [`cones`]: sampled cone-field hyperbolicity checks.
//! * [`torus`]: the graph transform on solid tori of vertical-like disks,
//!   its fixed point and the induced model `σ(s,z) = (2s, aφ_s(z))`.
//!
//! [`series`] provides the truncated power-series arithmetic that the
//! normal forms run on.

pub mod cones;
pub mod error;
pub mod henon;
pub mod normalform2d;
pub mod poly1d;
pub mod series;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Cx;
