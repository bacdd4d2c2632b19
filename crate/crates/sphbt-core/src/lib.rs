//! Fast orthogonal spherical Bessel transform on uniform radial grids, and a
//! 3D pseudospectral quantum dynamics layer built on top of it.
//!
//! The radial transform factorizes into an orthonormal sine/cosine stage
//! (O(N log N), via `rustdct`) composed with a banded-structure
//! Fourier-to-Bessel stage that applies in O(ℓN) using discrete Legendre
//! polynomial difference rows. The full map is orthogonal, so round trips
//! are exact to rounding and propagation with it is norm conserving.
//!
//! Everything is generic over the scalar type through [`real::Real`]
//! (`f32`/`f64`); `f64` aliases for the main types are exported at the crate
//! root.

pub mod dlop;
pub mod bessel;
pub mod error;
pub mod fourier;
pub mod radial;
pub mod real;
pub mod dvr3d;
pub mod reference;
pub(crate) mod util;

pub use error::{Error, Result};
pub use real::Real;
