//! Numerical laboratory for the drift-diffusion conservation law
//!
//! ```text
//!     u_t + (b(t,x) u^{k+1})_x = u_xx,    u(0,x) = u0(x) >= 0
//! ```
//!
//! on a truncated 1D domain, where the drift `b` is classified by weak-Lp
//! regularity: either `b` itself lies in the Lorentz space `L^{p,inf}`, or its
//! spatial derivative `b_x` does. The threshold exponent
//!
//! ```text
//!     critic(p) = 1 - 1/p   (drift in weak-Lp)
//!     critic(p) = 2 - 1/p   (drift gradient in weak-Lp)
//! ```
//!
//! separates three regimes for the nonlinearity power `k`: global existence
//! without decay (subcritical), global existence with `t^{-1/2}` sup-norm
//! decay (critical), and possible finite-time blow-up (supercritical).
//!
//! The crate provides the building blocks to probe all three regimes
//! empirically:
//!
//! * [`lorentz`] — decreasing rearrangements, Lorentz norms in both the `f*`
//!   and `f**` conventions, and inequality checkers (Hölder, Young,
//!   interpolation, Gagliardo-Nirenberg).
//! * [`heat`] — heat kernel sampling, discrete convolution (direct and FFT),
//!   the Duhamel integral operator and the Picard fixed-point local solver.
//! * [`solver`] — a conservative finite-volume IMEX integrator with upwinded
//!   advective fluxes, implicit diffusion, blow-up event detection and
//!   moment/energy diagnostics.
//! * [`selfsim`] — self-similar rescaling about a reference time, entropy
//!   dissipation diagnostics, dyadic norm ladders and decay-exponent fits.
//! * [`drift`] — the drift families used by the experiments: stationary
//!   pairs, critical drifts, blow-up envelopes and tabulated drifts.
//! * [`lab`] — experiment orchestration: configs, (p,k) sweeps, regime
//!   classification, CSV persistence and the verification suites.

pub mod drift;
pub mod error;
pub mod fit;
pub mod grid;
pub mod heat;
pub mod lab;
pub mod lorentz;
pub mod selfsim;
pub mod solver;

pub use drift::{DriftClass, DriftSpec};
pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use heat::Trajectory;
pub use lorentz::{Convention, LorentzIndex, MomentSet, Rearrangement};
pub use selfsim::RescaledFrame;
pub use solver::{Classification, RunConfig, RunReport};
