//! Numerical laboratory for the degenerate elliptic operator
//! `L = (1 + |x|^alpha) * Laplacian` acting on functions of `|x|` on R^N.
//!
//! The crate provides, for the radially symmetric setting:
//!
//! - an exact inverse `(-L)^{-1}` built from the Newtonian kernel
//!   ([`potential`]), together with closed-form weighted-norm bounds and
//!   probe machinery that measures how sharp those bounds are;
//! - singular-kernel integrals with weight `1/(1 + |y|^beta)` and their
//!   large-`|x|` asymptotic regimes ([`kernel`], [`asymptotics`]);
//! - the Feller boundary classification of the radial diffusion at infinity
//!   ([`feller`]);
//! - a finite-element eigensolver for the Dirichlet spectrum on balls with
//!   truncation-radius extrapolation and closed-form spectral bounds
//!   ([`spectral`], [`tridiag`]);
//! - a positivity-preserving Crank-Nicolson time stepper for the parabolic
//!   problem `u_t = L u` with expanding-ball limits, contraction checks and
//!   steady states ([`semigroup`]);
//! - sesquilinear-form sector angles and weighted Hardy-type inequalities
//!   for the `L^p` theory ([`forms`]).
//!
//! Every verification routine returns a [`BoundReport`] comparing a closed
//! form against a numerical probe, so callers (and the CLI) can render a
//! uniform pass/fail table.

// Input validation deliberately uses negated comparisons (`!(x > 0.0)`):
// unlike the un-negated opposite, they reject NaN. Frozen oracle constants
// keep their full printed decimal expansions even where f64 rounds them.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod asymptotics;
pub mod error;
pub mod feller;
pub mod forms;
pub mod grid;
pub mod kernel;
pub mod params;
pub mod potential;
pub mod probes;
pub mod quad;
pub mod report;
pub mod semigroup;
pub mod spectral;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{GridScheme, RadialFunction, RadialGrid};
pub use params::OperatorParams;
pub use report::BoundReport;
