//! Independent numerical engines used to cross-check the closed forms.
//!
//! - [`fock`]: Schrödinger-picture simulation on a truncated Fock space, gates
//!   applied as exponentials of their generators.
//! - [`gaussian`]: symplectic propagation of quadrature means and covariances.
//! - [`moment`]: operator-monomial expansion of `N1` and `N1^2` evaluated on
//!   product input states.
//! - [`verify`]: randomized comparison of all engines against [`crate::analytic`].

pub mod fock;
pub mod gaussian;
pub mod moment;
pub mod verify;

pub use fock::{fock_simulate, FockMoments, FockOptions, FockState};
pub use gaussian::{gaussian_simulate, GaussianMoments, GaussianState};
pub use moment::{moment_expectation, Ladder, MonomialExpansion};
pub use verify::{run_verify, Engine, VerifyOptions, VerifyReport};

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
