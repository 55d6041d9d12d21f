//! The profile equation `f'' + A f f' η - B f² = 0` as a first-order
//! system, plus the closed-form special solutions used as algebraic
//! oracles elsewhere in the crate.

use crate::error::Error;

/// Coefficients of the profile equation.
///
/// Both are carried explicitly so the general right-hand side is
/// exercised, even though only the `a > 0`, `b = 0` case is integrated
/// to completion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Coefficient of the `f f' η` term.
    pub a: f64,
    /// Coefficient of the `f²` term.
    pub b: f64,
}

impl Params {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Coefficients the solve path accepts: finite, `a > 0`, `b = 0`.
    pub(crate) fn check_solvable(&self) -> Result<(), Error> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "coefficients must be finite, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if self.a <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "coefficient a must be positive, got a = {}",
                self.a
            )));
        }
        if self.b != 0.0 {
            return Err(Error::InvalidParams(format!(
                "only the b = 0 case is supported, got b = {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// A point on the trajectory: the similarity variable η, the profile
/// value f, and its slope g = f'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub eta: f64,
    pub f: f64,
    pub g: f64,
}

impl State {
    pub const fn new(eta: f64, f: f64, g: f64) -> Self {
        Self { eta, f, g }
    }
}

/// Right-hand side of the first-order system:
/// `(f', g') = (g, -A f g η + B f²)`.
pub fn rhs(state: State, params: Params) -> (f64, f64) {
    let df = state.g;
    let dg = -params.a * state.f * state.g * state.eta + params.b * state.f * state.f;
    (df, dg)
}

/// Absorb a positive coefficient `a` into the state.
///
/// If s(η) solves the system with coefficient `a` from (f₀, g₀), then
/// a·s(η) solves the a = 1 system from (a·f₀, a·g₀); this maps between
/// the two. Only derived for `b = 0`.
pub fn rescale_to_unit_a(state: State, params: Params) -> Result<(State, Params), Error> {
    params.check_solvable()?;
    let scaled = State::new(state.eta, params.a * state.f, params.a * state.g);
    Ok((scaled, Params::new(1.0, 0.0)))
}

/// The `a = 0`, `b = 1` closed form `f(η) = 6 / (η - c₂)²`.
///
/// Returns the value together with the residual `f'' - f²`, computed
/// from the analytic second derivative `f'' = 36 / (η - c₂)⁴` so
/// callers can assert it vanishes to rounding.
pub fn closed_form_b1(eta: f64, c2: f64) -> Result<(f64, f64), Error> {
    let p = eta - c2;
    if p == 0.0 {
        return Err(Error::Pole { eta });
    }
    let f = 6.0 / (p * p);
    let fpp = 36.0 / (p * p * p * p);
    Ok((f, fpp - f * f))
}

/// Residual of the linear profile f(η) = η in
/// `f'' + (α³/3) f f' η - (α³/3) f²`.
///
/// With f = η, f' = 1, f'' = 0 the two nonlinear terms cancel exactly;
/// exposed as an oracle for cross-checking the generic right-hand side.
pub fn linear_solution_residual(eta: f64, alpha: f64) -> f64 {
    let k = alpha * alpha * alpha / 3.0;
    k * (eta * 1.0 * eta - eta * eta)
}
