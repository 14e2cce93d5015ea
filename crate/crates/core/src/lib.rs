//! Multi-frequency backscatter inverse scattering for perfect conductors.
//!
//! Far-field data are synthesized with a physical-optics surface quadrature,
//! a closed-form Fourier route or the exact Mie series for balls, and the
//! obstacle is located by the direct sampling indicator built from pairs of
//! opposite incident directions over a band of wave numbers.

pub mod dataset;
pub mod error;
pub mod geometry;
pub mod inversion;
pub mod mie;
pub mod physical_optics;

pub use error::{Error, Result};
