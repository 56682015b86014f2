//! Numerical toolkit for monic orthogonal polynomials on the bilateral
//! q-lattice `{+-c q^k}` with the Freud-type weight `1/(-x^4; q^4)_inf`:
//! moments and recurrence coefficients, the q-discrete Painleve recurrence,
//! power-series parametrices for the associated Riemann-Hilbert problem, and
//! asymptotic checks of the polynomials against them.

pub mod asymcheck;
pub mod error;
pub mod qcore;
pub mod qortho;
pub mod qpainleve;
pub mod qseries;
pub mod rhpcheck;
pub mod specfun;

pub use error::{QError, Result};
pub use qcore::QContext;
