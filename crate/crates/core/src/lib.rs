//! Petal domains, invariant functions, Fatou coordinates, parabolic curves and
//! exact blow-up resolution for tangent-to-identity germs of `C^2`.

pub mod curve;
pub mod dynamics;
pub mod error;
pub mod extrapolate;
pub mod fatou;
pub mod gauss;
pub mod io;
pub mod germ;
pub mod poly;
pub mod resolution;
pub mod sector;

pub use error::{Error, Result};
pub use num_complex::Complex64;
