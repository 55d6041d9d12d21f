//! Adaptive integration of the first-order profile system.
//!
//! The integrator is the Dormand-Prince 5(4) embedded pair with
//! proportional-integral step control. Accepted steps store endpoint
//! states and endpoint derivatives, giving cubic Hermite dense output
//! without extra stages. On top of the stepper sit the two domain
//! drivers: locating the sign change f(T₁) = 0 by bracketing and
//! bisection on the dense interpolant, and integrating the tail until
//! the slope g decays below a threshold, with a closed-form correction
//! for the remaining ∫ g dη.

use crate::error::Error;
use crate::ode::{Params, State};

/// Tolerances and step-size limits for a solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    /// Per-step relative error target.
    pub rel_tol: f64,
    /// Per-step absolute error target.
    pub abs_tol: f64,
    /// Initial step size in η-units.
    pub h_init: f64,
    pub h_max: f64,
    /// Budget on step attempts, accepted or rejected.
    pub max_steps: usize,
    /// Stop threshold on g for the asymptote phase.
    pub tail_g_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        // Two digits of headroom over the 1e-6 verification tolerances.
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            h_init: 1e-3,
            h_max: 0.1,
            max_steps: 1_000_000,
            tail_g_tol: 1e-12,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<(), Error> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidConfig("rel_tol must be positive and finite"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidConfig("abs_tol must be positive and finite"));
        }
        if !(self.h_init > 0.0 && self.h_init.is_finite()) {
            return Err(Error::InvalidConfig("h_init must be positive and finite"));
        }
        if !(self.h_max > 0.0 && self.h_max.is_finite()) {
            return Err(Error::InvalidConfig("h_max must be positive and finite"));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1"));
        }
        if !(self.tail_g_tol > 0.0 && self.tail_g_tol.is_finite()) {
            return Err(Error::InvalidConfig(
                "tail_g_tol must be positive and finite",
            ));
        }
        Ok(())
    }
}

/// One accepted step with everything dense output needs: endpoint
/// states plus the slope derivative g' at both ends (f' is g itself).
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub eta0: f64,
    pub eta1: f64,
    pub f0: f64,
    pub g0: f64,
    pub f1: f64,
    pub g1: f64,
    pub dg0: f64,
    pub dg1: f64,
}

impl Step {
    /// Cubic Hermite interpolation of (f, g) inside the step. Exact at
    /// both endpoints.
    ///
    /// Evaluated in anchored form, base value plus increment, so the
    /// base never participates in basis-weight cancellation; with the
    /// clamp this keeps dense f monotone even where the true per-step
    /// change is below one ulp.
    pub fn eval(&self, eta: f64) -> State {
        if eta == self.eta0 {
            return State::new(eta, self.f0, self.g0);
        }
        if eta == self.eta1 {
            return State::new(eta, self.f1, self.g1);
        }
        let h = self.eta1 - self.eta0;
        let s = (eta - self.eta0) / h;
        let s2 = s * s;
        let w01 = s2 * (3.0 - 2.0 * s);
        let w10 = s * (1.0 - s) * (1.0 - s);
        let w11 = -s2 * (1.0 - s);
        let f = if self.f0 == self.f1 {
            self.f0
        } else {
            let df = (self.f1 - self.f0) * w01 + h * (self.g0 * w10 + self.g1 * w11);
            // f' = g > 0 on every accepted step, so the in-step range
            // of f is exactly [f0, f1].
            let (lo, hi) = if self.f0 <= self.f1 {
                (self.f0, self.f1)
            } else {
                (self.f1, self.f0)
            };
            (self.f0 + df).clamp(lo, hi)
        };
        let g = if self.g0 == self.g1 {
            self.g0
        } else {
            let dg = (self.g1 - self.g0) * w01 + h * (self.dg0 * w10 + self.dg1 * w11);
            self.g0 + dg
        };
        State::new(eta, f, g)
    }
}

/// Accepted steps of one solve, contiguous and strictly increasing in η.
#[derive(Debug, Clone)]
pub struct Trajectory {
    initial: State,
    steps: Vec<Step>,
    params: Params,
    config: SolveConfig,
}

impl Trajectory {
    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn config(&self) -> SolveConfig {
        self.config
    }

    pub fn eta_start(&self) -> f64 {
        self.initial.eta
    }

    pub fn eta_end(&self) -> f64 {
        self.steps.last().map_or(self.initial.eta, |s| s.eta1)
    }

    pub fn last_state(&self) -> State {
        self.steps
            .last()
            .map_or(self.initial, |s| State::new(s.eta1, s.f1, s.g1))
    }

    /// Interpolated state at any η inside the covered range.
    pub fn dense_eval(&self, eta: f64) -> Result<State, Error> {
        let lo = self.eta_start();
        let hi = self.eta_end();
        if !(eta >= lo && eta <= hi) {
            return Err(Error::OutOfRange { eta, lo, hi });
        }
        if self.steps.is_empty() {
            return Ok(self.initial);
        }
        let idx = self
            .steps
            .partition_point(|s| s.eta1 < eta)
            .min(self.steps.len() - 1);
        Ok(self.steps[idx].eval(eta))
    }
}

/// The η where f crosses zero, and the slope there.
#[derive(Debug, Clone, Copy)]
pub struct CrossingEvent {
    pub t1: f64,
    pub g_at_t1: f64,
}

/// The finite limit of f, and how it was extracted.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoteEstimate {
    /// Limit of f as η → ∞.
    pub a: f64,
    /// Where integration halted.
    pub eta_stop: f64,
    /// Estimate of the remaining ∫ g dη beyond eta_stop.
    pub tail_correction: f64,
    /// g at eta_stop.
    pub residual_g: f64,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order weights; the seventh stage is FSAL.
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the fifth- and embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 10.0;
const PI_BETA: f64 = 0.04;
const PI_EXPO: f64 = 0.2 - PI_BETA * 0.75;

#[inline]
fn eval_rhs(eta: f64, y: [f64; 2], params: Params) -> [f64; 2] {
    [y[1], -params.a * y[0] * y[1] * eta + params.b * y[0] * y[0]]
}

/// One trial step of the pair: 5th-order solution, embedded error
/// estimate, and the derivative at the right endpoint (FSAL stage).
fn trial_step(
    eta: f64,
    y: [f64; 2],
    k1: [f64; 2],
    h: f64,
    params: Params,
) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let stage = |coeffs: &[f64], ks: &[[f64; 2]]| {
        let mut out = y;
        for (c, k) in coeffs.iter().zip(ks) {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let k2 = eval_rhs(eta + C[1] * h, stage(&A2, &[k1]), params);
    let k3 = eval_rhs(eta + C[2] * h, stage(&A3, &[k1, k2]), params);
    let k4 = eval_rhs(eta + C[3] * h, stage(&A4, &[k1, k2, k3]), params);
    let k5 = eval_rhs(eta + C[4] * h, stage(&A5, &[k1, k2, k3, k4]), params);
    let k6 = eval_rhs(eta + C[5] * h, stage(&A6, &[k1, k2, k3, k4, k5]), params);
    let y_new = stage(&B5, &[k1, k2, k3, k4, k5, k6]);
    let k7 = eval_rhs(eta + h, y_new, params);
    let ks = [k1, k2, k3, k4, k5, k6, k7];
    let mut err = [0.0; 2];
    for (c, k) in E.iter().zip(&ks) {
        err[0] += h * c * k[0];
        err[1] += h * c * k[1];
    }
    (y_new, err, k7)
}

fn check_initial(initial: State) -> Result<(), Error> {
    if !(initial.f.is_finite() && initial.g.is_finite() && initial.eta.is_finite()) {
        return Err(Error::InvalidInitial("initial state must be finite".into()));
    }
    if initial.eta != 0.0 {
        return Err(Error::InvalidInitial(format!(
            "integration starts at eta = 0, got eta = {}",
            initial.eta
        )));
    }
    if initial.f >= 0.0 {
        return Err(Error::InvalidInitial(format!(
            "admissible cone requires f(0) < 0, got f(0) = {}",
            initial.f
        )));
    }
    if initial.g <= 0.0 {
        return Err(Error::InvalidInitial(format!(
            "admissible cone requires f'(0) > 0, got f'(0) = {}",
            initial.g
        )));
    }
    Ok(())
}

/// Live adaptive integration state.
struct Run {
    params: Params,
    config: SolveConfig,
    traj: Trajectory,
    eta: f64,
    y: [f64; 2],
    /// Derivative at (eta, y); FSAL carries it between steps.
    dy: [f64; 2],
    h: f64,
    err_old: f64,
    attempts: usize,
}

impl Run {
    fn start(initial: State, params: Params, config: SolveConfig) -> Result<Self, Error> {
        config.validate()?;
        params.check_solvable()?;
        check_initial(initial)?;
        let y = [initial.f, initial.g];
        let dy = eval_rhs(initial.eta, y, params);
        Ok(Self {
            params,
            config,
            traj: Trajectory {
                initial,
                steps: Vec::new(),
                params,
                config,
            },
            eta: initial.eta,
            y,
            dy,
            h: config.h_init.min(config.h_max),
            err_old: 1e-4,
            attempts: 0,
        })
    }

    /// Take one accepted step. With a target, the attempt is clipped so
    /// the step lands exactly on it when within reach.
    fn step_once(&mut self, target: Option<f64>) -> Result<(), Error> {
        loop {
            if self.attempts >= self.config.max_steps {
                return Err(Error::MaxSteps {
                    steps: self.attempts,
                    eta: self.eta,
                    partial: Box::new(self.traj.clone()),
                });
            }
            self.attempts += 1;

            let h_free = self.h.min(self.config.h_max);
            let (h, hits_target) = match target {
                Some(t) => {
                    let remaining = t - self.eta;
                    if h_free >= remaining {
                        (remaining, true)
                    } else {
                        (h_free, false)
                    }
                }
                None => (h_free, false),
            };
            if self.eta + h == self.eta {
                return Err(Error::StepUnderflow {
                    eta: self.eta,
                    h,
                    partial: Box::new(self.traj.clone()),
                });
            }

            let (mut y_new, err, k7) = trial_step(self.eta, self.y, self.dy, h, self.params);
            // f' = g > 0, so f never decreases; once the true increment
            // drops below one ulp the mixed-sign stage sum can round to
            // a net -1 ulp, which the floor removes.
            if y_new[0] < self.y[0] {
                y_new[0] = self.y[0];
            }

            let mut err_norm_sq = 0.0;
            for i in 0..2 {
                let sc =
                    self.config.abs_tol + self.config.rel_tol * self.y[i].abs().max(y_new[i].abs());
                let r = err[i] / sc;
                err_norm_sq += r * r;
            }
            let err_norm = (err_norm_sq / 2.0).sqrt();

            if err_norm <= 1.0 {
                let eta1 = if hits_target {
                    target.unwrap()
                } else {
                    self.eta + h
                };
                self.traj.steps.push(Step {
                    eta0: self.eta,
                    eta1,
                    f0: self.y[0],
                    g0: self.y[1],
                    f1: y_new[0],
                    g1: y_new[1],
                    dg0: self.dy[1],
                    dg1: k7[1],
                });
                self.eta = eta1;
                self.y = y_new;
                self.dy = k7;

                let fac11 = err_norm.powf(PI_EXPO);
                let fac = (fac11 / self.err_old.powf(PI_BETA) / SAFETY)
                    .clamp(1.0 / MAX_SCALE, 1.0 / MIN_SCALE);
                self.h = (h / fac).min(self.config.h_max);
                self.err_old = err_norm.max(1e-4);
                return Ok(());
            }

            // Rejected: shrink and retry.
            let fac11 = err_norm.powf(PI_EXPO);
            self.h = h / (fac11 / SAFETY).min(1.0 / MIN_SCALE);
        }
    }

    fn last_step(&self) -> &Step {
        self.traj
            .steps
            .last()
            .expect("driver only calls this after at least one accepted step")
    }
}

/// Integrate over [0, eta_end]. `eta_end = 0` yields the trajectory
/// holding only the initial state.
pub fn integrate(
    initial: State,
    params: Params,
    config: SolveConfig,
    eta_end: f64,
) -> Result<Trajectory, Error> {
    if !(eta_end.is_finite() && eta_end >= 0.0) {
        return Err(Error::InvalidConfig(
            "eta_end must be nonnegative and finite",
        ));
    }
    let mut run = Run::start(initial, params, config)?;
    while run.eta < eta_end {
        run.step_once(Some(eta_end))?;
    }
    Ok(run.traj)
}

/// Fixed-step mode of the same embedded pair: every step is accepted at
/// constant h with no error control. Used for convergence-order studies.
pub fn integrate_fixed(
    initial: State,
    params: Params,
    h: f64,
    eta_end: f64,
) -> Result<Trajectory, Error> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(
            "fixed step h must be positive and finite",
        ));
    }
    if !(eta_end.is_finite() && eta_end >= 0.0) {
        return Err(Error::InvalidConfig(
            "eta_end must be nonnegative and finite",
        ));
    }
    if eta_end / h > 1e8 {
        return Err(Error::InvalidConfig(
            "fixed-step run would exceed 1e8 steps",
        ));
    }
    params.check_solvable()?;
    check_initial(initial)?;

    let config = SolveConfig {
        h_init: h,
        h_max: h,
        ..SolveConfig::default()
    };
    let mut traj = Trajectory {
        initial,
        steps: Vec::new(),
        params,
        config,
    };
    let mut eta = initial.eta;
    let mut y = [initial.f, initial.g];
    let mut dy = eval_rhs(eta, y, params);
    while eta < eta_end {
        let remaining = eta_end - eta;
        let (h_step, eta1) = if h >= remaining {
            (remaining, eta_end)
        } else {
            (h, eta + h)
        };
        if eta + h_step == eta {
            return Err(Error::StepUnderflow {
                eta,
                h: h_step,
                partial: Box::new(traj),
            });
        }
        let (mut y_new, _err, k7) = trial_step(eta, y, dy, h_step, params);
        if y_new[0] < y[0] {
            y_new[0] = y[0];
        }
        traj.steps.push(Step {
            eta0: eta,
            eta1,
            f0: y[0],
            g0: y[1],
            f1: y_new[0],
            g1: y_new[1],
            dg0: dy[1],
            dg1: k7[1],
        });
        eta = eta1;
        y = y_new;
        dy = k7;
    }
    Ok(traj)
}

/// Bisection of the dense interpolant over the bracketing step.
fn locate_crossing(step: &Step, abs_tol: f64) -> CrossingEvent {
    let (mut lo, mut hi) = (step.eta0, step.eta1);
    let mut mid = if step.f1 == 0.0 { hi } else { 0.5 * (lo + hi) };
    for _ in 0..60 {
        let s = step.eval(mid);
        if s.f.abs() <= abs_tol {
            break;
        }
        if s.f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
    }
    let at = step.eval(mid);
    CrossingEvent {
        t1: mid,
        g_at_t1: at.g,
    }
}

fn advance_to_crossing(run: &mut Run) -> Result<CrossingEvent, Error> {
    let a0 = run.traj.initial.f;
    let a1 = run.traj.initial.g;
    let t1_bound = a0.abs() / a1;
    // f' = g ≥ a₁ up to the crossing forces f through zero before
    // |a₀|/a₁; going past it means the solve is broken, not the bound.
    let eta_guard = t1_bound * (1.0 + 1e-6);
    while run.y[0] < 0.0 {
        if run.eta > eta_guard {
            return Err(Error::InvariantViolation(format!(
                "f never crossed zero before eta = {:.6e}, violating the crossing-time bound T1 <= |a0|/a1 = {:.6e}",
                run.eta, t1_bound
            )));
        }
        run.step_once(None)?;
    }
    let event = locate_crossing(run.last_step(), run.config.abs_tol);
    if !(event.t1 > 0.0 && event.t1 <= t1_bound) {
        return Err(Error::InvariantViolation(format!(
            "crossing time T1 = {:.6e} outside (0, |a0|/a1] = (0, {:.6e}]",
            event.t1, t1_bound
        )));
    }
    let g_bound = a1 + a0.abs().powi(3) / a1;
    if !(event.g_at_t1 > 0.0 && event.g_at_t1 <= g_bound) {
        return Err(Error::InvariantViolation(format!(
            "slope at crossing g(T1) = {:.6e} outside (0, a1 + |a0|^3/a1] = (0, {:.6e}]",
            event.g_at_t1, g_bound
        )));
    }
    Ok(event)
}

fn advance_to_tail(run: &mut Run) -> Result<AsymptoteEstimate, Error> {
    while run.y[1] >= run.config.tail_g_tol {
        let f_before = run.y[0];
        let g_before = run.y[1];
        run.step_once(None)?;
        // Past the crossing g' = -f g η < 0, so g must not grow.
        if f_before > 0.0 && run.y[1] > g_before {
            return Err(Error::InvariantViolation(format!(
                "g increased from {:.6e} to {:.6e} across [{:.6e}, {:.6e}] although f > 0",
                g_before,
                run.y[1],
                run.last_step().eta0,
                run.eta
            )));
        }
    }
    let eta_stop = run.eta;
    let f_stop = run.y[0];
    let g_stop = run.y[1];
    if !(f_stop > 0.0 && g_stop >= 0.0) {
        return Err(Error::InvariantViolation(format!(
            "tail phase ended in an inadmissible state f = {:.6e}, g = {:.6e}",
            f_stop, g_stop
        )));
    }
    // Once f ≈ a, g(s) ≈ g(η) exp(-a (s² - η²)/2), whose integral is
    // bounded by g(η)/(a·η); f_stop stands in for a.
    let tail_correction = g_stop / (f_stop * eta_stop);
    let a = f_stop + tail_correction;
    Ok(AsymptoteEstimate {
        a,
        eta_stop,
        tail_correction,
        residual_g: g_stop,
    })
}

/// Locate the zero crossing of f. The returned trajectory covers at
/// least [0, T₁].
pub fn find_crossing(
    initial: State,
    params: Params,
    config: SolveConfig,
) -> Result<(CrossingEvent, Trajectory), Error> {
    let mut run = Run::start(initial, params, config)?;
    let event = advance_to_crossing(&mut run)?;
    Ok((event, run.traj))
}

/// Integrate past the crossing until g decays below `tail_g_tol` and
/// estimate the finite limit of f.
pub fn find_asymptote(
    initial: State,
    params: Params,
    config: SolveConfig,
) -> Result<(AsymptoteEstimate, Trajectory), Error> {
    let (_, est, traj) = solve_full(initial, params, config)?;
    Ok((est, traj))
}

/// Full run: crossing event, asymptote estimate, and one trajectory
/// covering both phases.
pub(crate) fn solve_full(
    initial: State,
    params: Params,
    config: SolveConfig,
) -> Result<(CrossingEvent, AsymptoteEstimate, Trajectory), Error> {
    let mut run = Run::start(initial, params, config)?;
    let event = advance_to_crossing(&mut run)?;
    let est = advance_to_tail(&mut run)?;
    Ok((event, est, run.traj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_problem() -> (State, Params, SolveConfig) {
        (
            State::new(0.0, -1.0, 1.0),
            Params::new(1.0, 0.0),
            SolveConfig::default(),
        )
    }

    #[test]
    fn zero_length_interval_keeps_initial_state_only() {
        let (initial, params, config) = default_problem();
        let traj = integrate(initial, params, config, 0.0).unwrap();
        assert!(traj.steps().is_empty());
        assert_eq!(traj.dense_eval(0.0).unwrap(), initial);
        assert!(traj.dense_eval(0.5).is_err());
    }

    #[test]
    fn rejects_inadmissible_initial_data() {
        let (_, params, config) = default_problem();
        // f(0) = 0 sits on the constant-solution trap, f'(0) = 0 likewise.
        assert!(integrate(State::new(0.0, 0.0, 1.0), params, config, 1.0).is_err());
        assert!(integrate(State::new(0.0, -1.0, 0.0), params, config, 1.0).is_err());
        assert!(integrate(State::new(0.0, 1.0, 1.0), params, config, 1.0).is_err());
        assert!(integrate(State::new(0.5, -1.0, 1.0), params, config, 1.0).is_err());
    }

    #[test]
    fn rejects_unsupported_coefficients() {
        let (initial, _, config) = default_problem();
        assert!(integrate(initial, Params::new(0.0, 0.0), config, 1.0).is_err());
        assert!(integrate(initial, Params::new(-1.0, 0.0), config, 1.0).is_err());
        assert!(integrate(initial, Params::new(1.0, 0.5), config, 1.0).is_err());
    }

    #[test]
    fn trajectory_is_contiguous_and_increasing() {
        let (initial, params, config) = default_problem();
        let traj = integrate(initial, params, config, 5.0).unwrap();
        assert!(!traj.steps().is_empty());
        assert_eq!(traj.eta_start(), 0.0);
        assert_eq!(traj.eta_end(), 5.0);
        let mut prev = traj.eta_start();
        for step in traj.steps() {
            assert_eq!(step.eta0, prev);
            assert!(step.eta1 > step.eta0);
            prev = step.eta1;
        }
    }

    #[test]
    fn dense_eval_reproduces_endpoints_exactly() {
        let (initial, params, config) = default_problem();
        let traj = integrate(initial, params, config, 3.0).unwrap();
        for step in traj.steps() {
            let at_start = traj.dense_eval(step.eta0).unwrap();
            let at_end = traj.dense_eval(step.eta1).unwrap();
            // Interpolant matches nodes bit for bit.
            assert_eq!(at_end.f, step.f1);
            assert_eq!(at_end.g, step.g1);
            // The shared node may resolve to the previous step; values agree.
            assert_eq!(at_start.f, step.f0);
            assert_eq!(at_start.g, step.g0);
        }
    }

    #[test]
    fn dense_eval_rejects_outside_range() {
        let (initial, params, config) = default_problem();
        let traj = integrate(initial, params, config, 2.0).unwrap();
        assert!(matches!(
            traj.dense_eval(-0.1),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            traj.dense_eval(2.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn profile_is_monotone_with_positive_slope() {
        let (initial, params, config) = default_problem();
        let traj = integrate(initial, params, config, 5.0).unwrap();
        let mut prev_f = initial.f;
        for i in 0..=500 {
            let eta = 5.0 * f64::from(i) / 500.0;
            let s = traj.dense_eval(eta).unwrap();
            assert!(
                s.g > 0.0,
                "g must stay positive, got {} at eta = {eta}",
                s.g
            );
            if i > 0 {
                assert!(s.f > prev_f, "f must increase strictly");
            }
            prev_f = s.f;
        }
    }

    #[test]
    fn crossing_respects_proof_bounds() {
        let (initial, params, config) = default_problem();
        let (event, traj) = find_crossing(initial, params, config).unwrap();
        assert!(event.t1 > 0.0 && event.t1 <= 1.0);
        assert!(event.g_at_t1 > 0.0 && event.g_at_t1 <= 2.0);
        assert!(traj.eta_end() >= event.t1);
        let f_at_t1 = traj.dense_eval(event.t1).unwrap().f;
        assert!(f_at_t1.abs() <= config.abs_tol);

        let (event, _) = find_crossing(State::new(0.0, -2.0, 1.0), params, config).unwrap();
        assert!(event.t1 <= 2.0);
    }

    #[test]
    fn max_steps_failure_carries_partial_trajectory() {
        let (initial, params, _) = default_problem();
        let config = SolveConfig {
            max_steps: 5,
            ..SolveConfig::default()
        };
        match integrate(initial, params, config, 10.0) {
            Err(Error::MaxSteps { partial, .. }) => {
                assert!(!partial.steps().is_empty());
                assert!(partial.eta_end() < 10.0);
            }
            other => panic!("expected MaxSteps, got {other:?}"),
        }
    }

    #[test]
    fn asymptote_is_positive_and_converged() {
        let (initial, params, config) = default_problem();
        let (est, traj) = find_asymptote(initial, params, config).unwrap();
        assert!(est.a > 0.0);
        assert!(est.residual_g < config.tail_g_tol);
        assert!(est.residual_g >= 0.0);
        assert!(est.a >= traj.last_state().f);
        assert!(est.tail_correction >= 0.0);
        assert_eq!(est.eta_stop, traj.eta_end());
    }

    #[test]
    fn slope_decays_strictly_after_crossing() {
        let (initial, params, config) = default_problem();
        let (event, _, traj) = solve_full(initial, params, config).unwrap();
        let start = event.t1 + 0.05;
        let end = traj.eta_end();
        let mut prev_g = f64::INFINITY;
        for i in 0..=400 {
            let eta = start + (end - start) * f64::from(i) / 400.0;
            let g = traj.dense_eval(eta).unwrap().g;
            assert!(g < prev_g, "g failed to decrease at eta = {eta}");
            prev_g = g;
        }
    }

    #[test]
    fn fixed_step_mode_lands_on_target() {
        let (initial, params, _) = default_problem();
        let traj = integrate_fixed(initial, params, 0.01, 2.0).unwrap();
        assert_eq!(traj.eta_end(), 2.0);
        assert_eq!(traj.steps().len(), 200);
    }

    #[test]
    fn fixed_step_mode_validates_inputs() {
        let (initial, params, _) = default_problem();
        assert!(integrate_fixed(initial, params, 0.0, 2.0).is_err());
        assert!(integrate_fixed(initial, params, -0.1, 2.0).is_err());
        assert!(integrate_fixed(initial, params, f64::NAN, 2.0).is_err());
        assert!(integrate_fixed(initial, params, 1e-12, 2.0).is_err());
        assert!(integrate_fixed(initial, params, 0.01, -1.0).is_err());
    }

    #[test]
    fn invalid_config_is_rejected() {
        let (initial, params, config) = default_problem();
        for bad in [
            SolveConfig {
                rel_tol: 0.0,
                ..config
            },
            SolveConfig {
                abs_tol: -1.0,
                ..config
            },
            SolveConfig {
                h_init: 0.0,
                ..config
            },
            SolveConfig {
                h_max: f64::INFINITY,
                ..config
            },
            SolveConfig {
                max_steps: 0,
                ..config
            },
            SolveConfig {
                tail_g_tol: 0.0,
                ..config
            },
        ] {
            assert!(integrate(initial, params, bad, 1.0).is_err());
        }
    }
}
