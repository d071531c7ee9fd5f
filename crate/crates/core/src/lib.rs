//! Numerical core for recovering the initial velocity of the time-fractional
//! wave equation `∂_t^α u − Δu = 0`, `1 < α < 2`, on the unit square from
//! noisy terminal values sampled at scattered points.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the experiment
//! runner and the command line live in the `fracwave` crate.
//!
//! Pipeline, bottom-up:
//!
//! - [`mittag_leffler`]: `E_{α,β}` on the real axis, its real roots, and the
//!   modal propagator `T·E_{α,2}(−λT^α)`.
//! - [`spectral`]: the Dirichlet sine eigensystem of `−Δ` on `(0,1)²`,
//!   projection, synthesis and `D((−Δ)^γ)` norms.
//! - [`forward`]: the forward map `a₁ ↦ u(·,T)` and an independent L1
//!   time-stepping oracle per mode.
//! - [`observe`]: point sets, seeded noisy measurements, the discrete norm.
//! - [`tikhonov`]: design matrix, regularized normal equations, errors and
//!   the eigenvalue-growth diagnostic.
//! - [`param_select`]: the fixed-point rule for the regularization parameter.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod builtin;
pub mod error;
pub mod forward;
pub mod linalg;
pub mod mittag_leffler;
pub mod observe;
pub mod param_select;
pub mod quad;
pub mod special;
pub mod spectral;
pub mod tikhonov;

pub use error::{Error, Result};
pub use forward::ForwardConfig;
pub use mittag_leffler::MLParams;
pub use observe::{Observations, PointSet};
pub use param_select::{ParamConfig, ParamTrace};
pub use spectral::{GridFunction, ModeIndex, SpectralField};
pub use tikhonov::{DesignSystem, SolveResult};
