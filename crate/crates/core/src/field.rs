//! Reconstruction of the two-dimensional field u(x, y) = λ f(y/δ(x))
//! from an integrated profile: scaling recovery, pointwise evaluation
//! with analytic derivatives, contour extraction, and the continuous
//! extension to the positive y-axis.

use crate::error::Error;
use crate::ode::{Params, State};
use crate::solver::{solve_full, AsymptoteEstimate, CrossingEvent, SolveConfig, Trajectory};

/// The scaling pair (λ, δ) solving λδδ' = 1, λ'δ² = 0:
/// λ ≡ c₁ and δ²(x) = (2/c₁)x + c₂.
#[derive(Debug, Clone, Copy)]
pub struct ScalingPair {
    c1: f64,
    c2: f64,
}

/// Solve the constraint equations for the coefficient pair (a, b).
/// Only the integrated case a = 1, b = 0 is supported.
pub fn recover_scaling(a: f64, b: f64, c1: f64, c2: f64) -> Result<ScalingPair, Error> {
    if a != 1.0 || b != 0.0 {
        return Err(Error::UnsupportedScaling(format!(
            "scaling recovery is derived for (a, b) = (1, 0), got ({a}, {b})"
        )));
    }
    if !(c1 != 0.0 && c1.is_finite()) {
        return Err(Error::UnsupportedScaling(format!(
            "c1 must be nonzero and finite, got {c1}"
        )));
    }
    if !c2.is_finite() {
        return Err(Error::UnsupportedScaling(format!(
            "c2 must be finite, got {c2}"
        )));
    }
    Ok(ScalingPair { c1, c2 })
}

impl Default for ScalingPair {
    /// λ ≡ 2 and δ(x) = √x.
    fn default() -> Self {
        ScalingPair { c1: 2.0, c2: 0.0 }
    }
}

impl ScalingPair {
    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// λ(x), constant in x.
    pub fn lambda(&self) -> f64 {
        self.c1
    }

    pub fn delta_sq(&self, x: f64) -> f64 {
        (2.0 / self.c1) * x + self.c2
    }

    pub fn delta(&self, x: f64) -> f64 {
        self.delta_sq(x).sqrt()
    }
}

/// u and its derivatives at one point, with u_yy obtained from the
/// profile equation rather than numerical differentiation.
#[derive(Debug, Clone, Copy)]
pub struct FieldDerivatives {
    pub u: f64,
    pub u_x: f64,
    pub u_y: f64,
    pub u_yy: f64,
}

/// An integrated profile together with everything needed to evaluate
/// the field: crossing, asymptote, and the scaling pair.
#[derive(Debug, Clone)]
pub struct SimilarityProfile {
    traj: Trajectory,
    crossing: CrossingEvent,
    asym: AsymptoteEstimate,
    scaling: ScalingPair,
    /// Interface abscissa: the η at which f = 0.
    eta0: f64,
}

impl SimilarityProfile {
    /// Integrate the profile from (a₀, a₁) with unit leading coefficient
    /// and attach the scaling pair.
    pub fn compute(
        a0: f64,
        a1: f64,
        config: SolveConfig,
        scaling: ScalingPair,
    ) -> Result<Self, Error> {
        let initial = State::new(0.0, a0, a1);
        let params = Params::new(1.0, 0.0);
        let (crossing, asym, traj) = solve_full(initial, params, config)?;
        Ok(Self {
            traj,
            crossing,
            asym,
            scaling,
            eta0: crossing.t1,
        })
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn crossing(&self) -> CrossingEvent {
        self.crossing
    }

    pub fn asymptote(&self) -> AsymptoteEstimate {
        self.asym
    }

    pub fn scaling(&self) -> ScalingPair {
        self.scaling
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    /// Profile state at any η ≥ 0; beyond the integrated range the tail
    /// model (f, g) = (a, 0) applies.
    pub fn profile_state(&self, eta: f64) -> Result<State, Error> {
        if eta.is_nan() || eta < 0.0 {
            return Err(Error::OutOfRange {
                eta,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if eta > self.traj.eta_end() {
            return Ok(State::new(eta, self.asym.a, 0.0));
        }
        self.traj.dense_eval(eta)
    }

    fn check_domain(&self, x: f64, y: f64) -> Result<f64, Error> {
        if !x.is_finite() || !y.is_finite() || x <= 0.0 || y < 0.0 {
            return Err(Error::OutsideDomain { x, y });
        }
        let d2 = self.scaling.delta_sq(x);
        if d2.is_nan() || d2 <= 0.0 {
            return Err(Error::OutsideDomain { x, y });
        }
        Ok(d2)
    }

    /// u(x, y) = λ f(y/δ(x)) on {x > 0, y ≥ 0}.
    pub fn eval_u(&self, x: f64, y: f64) -> Result<f64, Error> {
        let d2 = self.check_domain(x, y)?;
        let eta = y / d2.sqrt();
        Ok(self.scaling.lambda() * self.profile_state(eta)?.f)
    }

    /// u together with u_x, u_y, u_yy. With λδδ' = 1 the derivatives are
    /// u_x = -f'η/δ², u_y = λf'/δ, u_yy = λf''/δ², f'' = -f f' η.
    pub fn eval_u_derivatives(&self, x: f64, y: f64) -> Result<FieldDerivatives, Error> {
        let d2 = self.check_domain(x, y)?;
        let delta = d2.sqrt();
        let eta = y / delta;
        let s = self.profile_state(eta)?;
        let lambda = self.scaling.lambda();
        let fpp = -s.f * s.g * eta;
        // + 0.0 normalizes the negative zeros that appear on y = 0 and
        // in the constant tail.
        Ok(FieldDerivatives {
            u: lambda * s.f,
            u_x: -s.g * eta / d2 + 0.0,
            u_y: lambda * s.g / delta,
            u_yy: lambda * fpp / d2 + 0.0,
        })
    }

    /// u·u_x - u_yy; identically zero for the exact profile, so the
    /// value measures interpolation error only.
    pub fn pde_residual(&self, x: f64, y: f64) -> Result<f64, Error> {
        let d = self.eval_u_derivatives(x, y)?;
        Ok(d.u * d.u_x - d.u_yy)
    }

    /// The unique η at which λ f(η) equals `level`; the level set of u
    /// is then the curve y = η_c · δ(x).
    pub fn contour_eta(&self, level: f64) -> Result<f64, Error> {
        let lambda = self.scaling.lambda();
        let lo_u = lambda * self.traj.initial().f;
        let hi_u = lambda * self.asym.a;
        if !(level > lo_u && level < hi_u) {
            return Err(Error::LevelOutOfRange {
                level,
                lo: lo_u,
                hi: hi_u,
            });
        }
        let target = level / lambda;
        let end = self.traj.eta_end();
        let f_end = self.traj.last_state().f;
        if target >= f_end {
            // Inside the tail gap (a - f_end ≈ tail correction); the end
            // of the integrated range is the closest attainable abscissa.
            return Ok(end);
        }
        let (mut lo, mut hi) = (0.0, end);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.traj.dense_eval(mid)?.f;
            if f_mid < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * end {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The continuous extension of u to the positive y-axis: λ·a,
    /// independent of y.
    pub fn boundary_trace(&self) -> f64 {
        self.scaling.lambda() * self.asym.a
    }
}
