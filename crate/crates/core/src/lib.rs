//! Numerical toolkit for the sign-changing self-similar solution of the
//! mixed-type equation `u u_x = u_yy`.
//!
//! The ansatz `u(x, y) = λ(x) f(y / δ(x))` reduces the equation to the
//! profile ODE `f'' + A f f' η - B f² = 0`. This crate integrates the
//! profile as a first-order system with an adaptive embedded Runge-Kutta
//! pair, locates the sign change `f(η₀) = 0`, extracts the finite limit
//! `a = lim f(η)`, reconstructs the two-dimensional field together with
//! its derivatives, and certifies the quantitative properties of the
//! solution (crossing-time and derivative bounds, interface geometry,
//! pointwise residual of the equation, and the integral energy balance
//! over rectangles straddling the interface).
//!
//! Modules mirror the pipeline:
//!
//! - [`ode`] — right-hand side, coefficient handling, closed-form
//!   special solutions used as algebraic oracles.
//! - [`solver`] — adaptive integration with dense output, crossing
//!   detection, asymptote extraction.
//! - [`field`] — scaling recovery, field evaluation, contours, boundary
//!   trace.
//! - [`verify`] — bound checks and the energy identity.
//! - [`quadrature`] — Gauss-Legendre rules used by [`verify`].
//!
//! ```
//! use selfsim_core::{ScalingPair, SimilarityProfile, SolveConfig};
//!
//! let profile =
//!     SimilarityProfile::compute(-1.0, 1.0, SolveConfig::default(), ScalingPair::default())?;
//! // The profile crosses zero before |a0|/a1 and levels off at a > 0.
//! assert!(profile.eta0() > 0.0 && profile.eta0() <= 1.0);
//! assert!(profile.asymptote().a > 0.0);
//! // u is negative below the interface parabola and positive above it.
//! assert!(profile.eval_u(1.0, 0.1)? < 0.0);
//! assert!(profile.eval_u(1.0, 3.0)? > 0.0);
//! # Ok::<(), selfsim_core::Error>(())
//! ```

pub mod error;
pub mod field;
pub mod ode;
pub mod quadrature;
pub mod solver;
pub mod verify;

pub use error::Error;
pub use field::{recover_scaling, FieldDerivatives, ScalingPair, SimilarityProfile};
pub use ode::{closed_form_b1, linear_solution_residual, rescale_to_unit_a, rhs, Params, State};
pub use solver::{
    find_asymptote, find_crossing, integrate, integrate_fixed, AsymptoteEstimate, CrossingEvent,
    SolveConfig, Trajectory,
};
pub use verify::{
    check_asymptote, check_crossing_bounds, energy_balance, second_quadrant_slope_check,
    AsymptoteReport, BoundCheck, CrossingBoundsReport, EnergyReport, Rectangle, SlopeReport,
};
