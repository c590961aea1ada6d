//! Heisenberg group geometry on the Siegel domain and the spectral theory of
//! Toeplitz operators with Heisenberg-invariant symbols on weighted Bergman
//! spaces, with the quadratures needed to check it numerically.

pub mod bergman;
pub mod coordinates;
pub mod error;
pub mod fd;
pub mod heisenberg;
pub mod quadrature;
pub mod siegel;
pub mod spectral;
pub mod special;
pub mod suite;
pub mod tolerance;

pub use error::{Error, Result};

/// Double-precision complex number used throughout.
pub type C64 = num_complex::Complex64;
