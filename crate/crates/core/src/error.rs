//! Error type shared across the crate.

use crate::solver::Trajectory;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Coefficients outside the case an operation supports.
    #[error("invalid coefficients: {0}")]
    InvalidParams(String),

    /// Initial data outside the admissible cone f(0) < 0, f'(0) > 0.
    #[error("invalid initial data: {0}")]
    InvalidInitial(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    /// Closed-form evaluation at its pole η = C₂.
    #[error("pole at eta = {eta}: eta coincides with c2")]
    Pole { eta: f64 },

    /// Step budget exhausted; carries the trajectory accepted so far.
    #[error("step count exhausted after {steps} steps at eta = {eta}")]
    MaxSteps {
        steps: usize,
        eta: f64,
        partial: Box<Trajectory>,
    },

    /// Step size shrank below representable progress.
    #[error("step size underflow at eta = {eta} (h = {h:e})")]
    StepUnderflow {
        eta: f64,
        h: f64,
        partial: Box<Trajectory>,
    },

    /// Dense evaluation outside the covered η-range.
    #[error("eta = {eta} outside covered range [{lo}, {hi}]")]
    OutOfRange { eta: f64, lo: f64, hi: f64 },

    /// A property the construction guarantees failed numerically.
    /// Diagnostic, never silent.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Field evaluation outside {x > 0, y ≥ 0}.
    #[error("point (x, y) = ({x}, {y}) outside the field domain {{x > 0, y >= 0}}")]
    OutsideDomain { x: f64, y: f64 },

    /// Contour level outside the open range of u.
    #[error("level {level} outside the field range ({lo}, {hi})")]
    LevelOutOfRange { level: f64, lo: f64, hi: f64 },

    /// Scaling recovery requested outside the solved coefficient case.
    #[error("unsupported scaling case: {0}")]
    UnsupportedScaling(String),

    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
}
