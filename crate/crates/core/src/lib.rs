//! Numerical laboratory for Fourier restriction square functions over
//! families of rotated parallelepipeds and sectors, directional maximal
//! functions, wave-packet tiles and directional Carleson functionals.
//!
//! Everything lives on a `d`-dimensional periodic grid (`d` = 1 or 2) with
//! a spectral transform normalized so that discrete quantities approximate
//! their continuum counterparts.

pub mod carleson;
pub mod decompose;
pub(crate) mod density;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod lab;
pub mod operators;
pub mod tiles;

pub use error::{LabError, Result};
pub use grid::{GridFunction, GridSpec, Spectrum};
