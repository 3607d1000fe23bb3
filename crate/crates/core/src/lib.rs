//! Exact-arithmetic toolkit for monomial map dynamics on complete simplicial
//! toric varieties.
//!
//! The crate decides strong algebraic stability of monomial maps, computes
//! divisor pullbacks and degree sequences on projective space, weighted
//! projective spaces and products of projective lines, and implements the
//! dominant-term stability test for polynomial maps.
//!
//! All core arithmetic is exact (arbitrary-precision integers and rationals);
//! floating point appears only in spectral estimates that carry explicit
//! error bounds.

pub mod divisor;
pub mod dynamics;
pub mod fan;
pub mod json;
pub mod matrix;
pub mod poly;
pub mod qpoly;
pub mod spectral;
pub mod stability;
pub(crate) mod util;

pub use divisor::{HomogenizationMatrix, SupportFunction, TWeilDivisor};
pub use fan::{Cone, ConeId, Fan, WeightedLattice};
pub use matrix::{IntMatrix, RatMatrix};
pub use poly::{DegreeMatrix, PolynomialMap, SparsePoly};
pub use spectral::SpectrumReport;
pub use stability::StabilityReport;
