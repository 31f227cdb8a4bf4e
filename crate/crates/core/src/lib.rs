//! Numerical laboratory for the radial tt*-Toda equations (cases 4a, 5a, 6a).
//!
//! The crate is organised around the monodromy data of the associated
//! meromorphic ODE:
//!
//! * [`stokes`]: constant matrices, Stokes factors, Stokes and monodromy
//!   matrices, characteristic polynomials, connection matrices.
//! * [`region`]: maps between asymptotic data and Stokes data, and the
//!   smoothness/positivity regions.
//! * [`toda`]: inward integration of the radial ODE and extraction of the
//!   small-x exponents.
//! * [`fredholm`]: Nyström evaluation of the Fredholm-determinant
//!   representation.
//! * [`rh`]: explicit jump matrices, the leading-order `Y(0, x)` and the
//!   positivity criterion.

// `!(x > 0.0)` guards are written that way to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod case;
pub mod dopri;
pub mod error;
pub mod fredholm;
pub mod linalg;
pub mod poly;
pub mod quad;
pub mod region;
pub mod rh;
pub mod stokes;
pub mod toda;

pub use case::Case;
pub use error::{Error, Result};
pub use linalg::CMat;
pub use region::{AsymptoticData, RegionVerdict};
pub use stokes::{IdentityReport, PalindromicPoly, StokesParams};
pub use toda::{OdeConfig, RadialSolution};
