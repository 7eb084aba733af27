//! Shared 1-D numerical kernels: regularized incomplete gamma functions,
//! adaptive Gauss–Kronrod quadrature, bracketing bisection, and golden-section
//! minimization.
//!
//! Everything here is a pure function of its arguments and safe to call
//! concurrently.

mod gamma;
mod quadrature;
mod search;

pub use gamma::{reg_gamma_lower, reg_gamma_pair, reg_gamma_upper};
pub use quadrature::integrate_adaptive;
pub use search::{bisect_root, golden_min};

/// Convergence control for the iterative kernels.
///
/// `abs_tol` and `rel_tol` must be positive and `max_iter >= 1`. The meaning
/// of `max_iter` is kernel-specific: subdivisions for the quadrature,
/// iterations for the root/minimum searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-12,
            max_iter: 4096,
        }
    }
}

impl ToleranceSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Self {
        assert!(abs_tol > 0.0 && rel_tol > 0.0 && max_iter >= 1);
        Self {
            abs_tol,
            rel_tol,
            max_iter,
        }
    }
}

/// Errors from the numerical kernels.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("series/continued fraction failed to converge")]
    Convergence,
    #[error("quadrature refinement budget exceeded after {0} subdivisions")]
    BudgetExceeded(usize),
    #[error("root not bracketed: f(lo) and f(hi) share a sign")]
    NoBracket,
}
