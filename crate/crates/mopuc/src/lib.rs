//! Matrix Szegő biorthogonal polynomials on the unit circle.
//!
//! Moments of a matrix weight feed block Toeplitz solves for the four Szegő
//! families, their Verblunsky matrices and quasi-tau matrices. On top of these
//! sit Cauchy transforms, the Riemann-Hilbert frames `Y_n`, `X_n`, `Z_n`, the
//! transfer matrix `R_n`, the Pearson matrix `M_n`, and the Fuchsian and
//! non-Fuchsian matrix discrete Painlevé II systems.

pub mod cauchy_rhp;
pub mod error;
pub mod fuchsian;
pub mod io;
pub mod linalg;
pub mod moments;
pub mod ode;
pub mod painleve;
pub mod szego;
pub mod transfer;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
