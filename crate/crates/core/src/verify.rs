//! Certification of the quantitative claims: crossing-time and slope
//! bounds, asymptote convergence, the phase-plane slope estimate, and
//! the integral energy balance over rectangles straddling the
//! interface.
//!
//! Reports carry measured values and slack, not just booleans; slack
//! trends are the regression signal.

use crate::error::Error;
use crate::field::SimilarityProfile;
use crate::quadrature::GaussLegendre;
use crate::solver::{AsymptoteEstimate, CrossingEvent, Trajectory};

/// Relative energy imbalance expected at 64 quadrature points.
pub const ENERGY_DEFAULT_REL_TOL: f64 = 1e-5;

/// Tail correction must be below this fraction of the limit for the
/// asymptote to count as converged.
pub const TAIL_CONVERGENCE_FACTOR: f64 = 1e-10;

/// Pointwise slack allowed when asserting the sign of u on the panels
/// either side of the interface; covers event-location error.
const SIGN_GUARD: f64 = 1e-8;

/// One inequality `measured ≤ bound` with its slack.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn le(name: &'static str, measured: f64, bound: f64) -> Self {
        Self {
            name,
            measured,
            bound,
            pass: measured <= bound,
        }
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.measured
    }
}

/// Outcome of the two crossing bounds T₁ ≤ |a₀|/a₁ and
/// g(T₁) ≤ a₁ + |a₀|³/a₁.
#[derive(Debug, Clone, Copy)]
pub struct CrossingBoundsReport {
    pub crossing_time: BoundCheck,
    pub crossing_slope: BoundCheck,
}

impl CrossingBoundsReport {
    pub fn pass(&self) -> bool {
        self.crossing_time.pass && self.crossing_slope.pass
    }
}

pub fn check_crossing_bounds(a0: f64, a1: f64, event: &CrossingEvent) -> CrossingBoundsReport {
    CrossingBoundsReport {
        crossing_time: BoundCheck::le("T1 <= |a0|/a1", event.t1, a0.abs() / a1),
        crossing_slope: BoundCheck::le(
            "g(T1) <= a1 + |a0|^3/a1",
            event.g_at_t1,
            a1 + a0.abs().powi(3) / a1,
        ),
    }
}

/// Outcome of the asymptote checks: positivity of the limit, decay of
/// the residual slope, and smallness of the tail correction.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoteReport {
    pub a0: f64,
    pub a1: f64,
    pub limit: f64,
    pub positive: bool,
    pub residual_g: f64,
    pub residual_below_threshold: bool,
    pub tail_correction: f64,
    pub tail_converged: bool,
}

impl AsymptoteReport {
    pub fn pass(&self) -> bool {
        self.positive && self.residual_below_threshold && self.tail_converged
    }
}

pub fn check_asymptote(
    a0: f64,
    a1: f64,
    est: &AsymptoteEstimate,
    tail_g_tol: f64,
) -> AsymptoteReport {
    AsymptoteReport {
        a0,
        a1,
        limit: est.a,
        positive: est.a > 0.0,
        residual_g: est.residual_g,
        residual_below_threshold: est.residual_g < tail_g_tol,
        tail_correction: est.tail_correction,
        tail_converged: est.tail_correction <= TAIL_CONVERGENCE_FACTOR * est.a,
    }
}

/// Outcome of the phase-plane slope bound g'/f' = -A f η ≤ A a₀²/a₁
/// over the portion of the trajectory with f ≤ 0.
#[derive(Debug, Clone, Copy)]
pub struct SlopeReport {
    pub max_ratio: f64,
    pub at_eta: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn second_quadrant_slope_check(traj: &Trajectory, a0: f64, a1: f64) -> SlopeReport {
    let coeff_a = traj.params().a;
    let bound = coeff_a * a0 * a0 / a1;
    let mut max_ratio = 0.0;
    let mut at_eta = 0.0;
    const SAMPLES_PER_STEP: usize = 16;
    for step in traj.steps() {
        if step.f0 >= 0.0 {
            break;
        }
        for i in 0..=SAMPLES_PER_STEP {
            let eta = step.eta0 + (step.eta1 - step.eta0) * i as f64 / SAMPLES_PER_STEP as f64;
            let s = step.eval(eta);
            if s.f > 0.0 {
                continue;
            }
            let ratio = -coeff_a * s.f * eta;
            if ratio > max_ratio {
                max_ratio = ratio;
                at_eta = eta;
            }
        }
    }
    SlopeReport {
        max_ratio,
        at_eta,
        bound,
        pass: max_ratio <= bound,
    }
}

/// An axis-aligned rectangle in the (x, y) domain, 0 < x₁ < x₂ and
/// 0 ≤ y₁ < y₂.
#[derive(Debug, Clone, Copy)]
pub struct Rectangle {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl Rectangle {
    pub fn new(x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Self, Error> {
        if !(x1.is_finite() && x2.is_finite() && y1.is_finite() && y2.is_finite()) {
            return Err(Error::InvalidRectangle("coordinates must be finite".into()));
        }
        if !(0.0 < x1 && x1 < x2) {
            return Err(Error::InvalidRectangle(format!(
                "need 0 < x1 < x2, got x1 = {x1}, x2 = {x2}"
            )));
        }
        if !(0.0 <= y1 && y1 < y2) {
            return Err(Error::InvalidRectangle(format!(
                "need 0 <= y1 < y2, got y1 = {y1}, y2 = {y2}"
            )));
        }
        Ok(Self { x1, x2, y1, y2 })
    }
}

/// Both sides of the energy balance over a rectangle, with the raw
/// two-dimensional integrals the balance is derived from.
///
/// Multiplying the equation by u and integrating by parts (with
/// u²u_x = (u³)_x / 3) gives
///
/// lhs = ∬ u_y² + ⅓∫_B^{Y₂} |u|³(X₂) + ⅓∫_{Y₁}^{A} |u|³(X₁)
/// rhs = ⅓∫_{Y₁}^{B} |u|³(X₂) + ⅓∫_{A}^{Y₂} |u|³(X₁)
///     + ∫ u_y|u|(·, Y₂) + ∫ u_y|u|(·, Y₁)
///
/// where A and B are the interface ordinates on the left and right
/// edges. The cube-term fields below already carry the ⅓, so
/// lhs = area_uy2 + right_above + left_below term by term.
#[derive(Debug, Clone, Copy)]
pub struct EnergyReport {
    pub lhs: f64,
    pub rhs: f64,
    /// ∬ u² u_x — first half of the unsplit identity.
    pub raw_i1: f64,
    /// ∬ -u_yy u — second half; raw_i1 + raw_i2 ≈ 0.
    pub raw_i2: f64,
    pub quad_points: usize,
    pub area_uy2: f64,
    /// ⅓∫_B^{Y₂} |u|³(X₂, y) dy.
    pub right_above: f64,
    /// ⅓∫_{Y₁}^{A} |u|³(X₁, y) dy.
    pub left_below: f64,
    /// ⅓∫_{Y₁}^{B} |u|³(X₂, y) dy.
    pub right_below: f64,
    /// ⅓∫_{A}^{Y₂} |u|³(X₁, y) dy.
    pub left_above: f64,
    /// ∫ u_y |u| (x, Y₂) dx.
    pub top_flux: f64,
    /// ∫ u_y |u| (x, Y₁) dx.
    pub bottom_flux: f64,
}

impl EnergyReport {
    /// |lhs - rhs| / max(lhs, rhs).
    pub fn relative_imbalance(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.max(self.rhs).max(f64::MIN_POSITIVE)
    }

    /// |raw_i1 + raw_i2| relative to the magnitude of the halves.
    pub fn raw_identity_residual(&self) -> f64 {
        (self.raw_i1 + self.raw_i2).abs()
            / self
                .raw_i1
                .abs()
                .max(self.raw_i2.abs())
                .max(f64::MIN_POSITIVE)
    }
}

/// ⅓∫|u|³ along a vertical edge panel on which u has a known sign.
/// The sign is asserted pointwise before taking absolute values; a
/// violation means the interface ordinate is mislocated.
fn edge_cube(
    profile: &SimilarityProfile,
    rule: &GaussLegendre,
    x: f64,
    y_lo: f64,
    y_hi: f64,
    expected_sign: f64,
    failure: &mut Option<Error>,
) -> f64 {
    rule.integrate(y_lo, y_hi, |y| {
        let u = match profile.eval_u(x, y) {
            Ok(u) => u,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        if u * expected_sign < -SIGN_GUARD && failure.is_none() {
            *failure = Some(Error::InvariantViolation(format!(
                "u({x}, {y}) = {u:e} has the wrong sign on a panel expecting sign {expected_sign}"
            )));
        }
        let a = u.abs();
        a * a * a / 3.0
    })
}

/// u_y·|u| along a horizontal edge on which u has a known sign.
fn edge_flux(
    profile: &SimilarityProfile,
    rule: &GaussLegendre,
    y: f64,
    x_lo: f64,
    x_hi: f64,
    expected_sign: f64,
    failure: &mut Option<Error>,
) -> f64 {
    rule.integrate(x_lo, x_hi, |x| {
        let d = match profile.eval_u_derivatives(x, y) {
            Ok(d) => d,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        if d.u * expected_sign < -SIGN_GUARD && failure.is_none() {
            *failure = Some(Error::InvariantViolation(format!(
                "u({x}, {y}) = {:e} has the wrong sign on a horizontal edge expecting sign {expected_sign}",
                d.u
            )));
        }
        d.u_y * d.u.abs()
    })
}

/// Evaluate the energy balance over `rect` with composite
/// Gauss-Legendre panels of `quad_points` nodes, split at the interface
/// ordinates (1-D) and along the interface curve per x-column (2-D).
pub fn energy_balance(
    profile: &SimilarityProfile,
    rect: &Rectangle,
    quad_points: usize,
) -> Result<EnergyReport, Error> {
    if quad_points < 8 {
        return Err(Error::InvalidConfig("quad_points must be at least 8"));
    }
    let eta0 = profile.eta0();
    let scaling = profile.scaling();
    let ordinate_a = eta0 * scaling.delta(rect.x1);
    let ordinate_b = eta0 * scaling.delta(rect.x2);
    if !(rect.y1 <= ordinate_a && ordinate_b <= rect.y2) {
        return Err(Error::InvalidRectangle(format!(
            "interface must cross the left and right edges: need y1 <= {ordinate_a:.6} and {ordinate_b:.6} <= y2, got y1 = {}, y2 = {}",
            rect.y1, rect.y2
        )));
    }

    let rule = GaussLegendre::new(quad_points)?;
    let mut failure: Option<Error> = None;

    // Vertical edges, split at the interface ordinates: u < 0 below,
    // u > 0 above.
    let left_below = edge_cube(
        profile,
        &rule,
        rect.x1,
        rect.y1,
        ordinate_a,
        -1.0,
        &mut failure,
    );
    let left_above = edge_cube(
        profile,
        &rule,
        rect.x1,
        ordinate_a,
        rect.y2,
        1.0,
        &mut failure,
    );
    let right_below = edge_cube(
        profile,
        &rule,
        rect.x2,
        rect.y1,
        ordinate_b,
        -1.0,
        &mut failure,
    );
    let right_above = edge_cube(
        profile,
        &rule,
        rect.x2,
        ordinate_b,
        rect.y2,
        1.0,
        &mut failure,
    );

    // Horizontal edges: the crossing condition puts the whole top edge
    // above the interface and the whole bottom edge below it.
    let top_flux = edge_flux(profile, &rule, rect.y2, rect.x1, rect.x2, 1.0, &mut failure);
    let bottom_flux = edge_flux(
        profile,
        &rule,
        rect.y1,
        rect.x1,
        rect.x2,
        -1.0,
        &mut failure,
    );

    // Area integrals in one tensor-product pass, inner panels split at
    // the interface curve.
    let mut area_uy2 = 0.0;
    let mut raw_i1 = 0.0;
    let mut raw_i2 = 0.0;
    let x_half = 0.5 * (rect.x2 - rect.x1);
    let x_mid = 0.5 * (rect.x1 + rect.x2);
    for (&xn, &xw) in rule.nodes().iter().zip(rule.weights()) {
        let x = x_mid + x_half * xn;
        let wx = xw * x_half;
        let y_split = (eta0 * scaling.delta(x)).clamp(rect.y1, rect.y2);
        for &(lo, hi) in &[(rect.y1, y_split), (y_split, rect.y2)] {
            if hi <= lo {
                continue;
            }
            let y_half = 0.5 * (hi - lo);
            let y_mid = 0.5 * (lo + hi);
            for (&yn, &yw) in rule.nodes().iter().zip(rule.weights()) {
                let y = y_mid + y_half * yn;
                let w = wx * yw * y_half;
                match profile.eval_u_derivatives(x, y) {
                    Ok(d) => {
                        area_uy2 += w * d.u_y * d.u_y;
                        raw_i1 += w * d.u * d.u * d.u_x;
                        raw_i2 += w * (-d.u_yy * d.u);
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                    }
                }
            }
        }
    }

    if let Some(e) = failure {
        return Err(e);
    }

    for (name, value) in [
        ("area u_y^2", area_uy2),
        ("right edge above interface", right_above),
        ("left edge below interface", left_below),
    ] {
        if value < 0.0 {
            return Err(Error::InvariantViolation(format!(
                "nonnegative energy term '{name}' came out negative: {value:e}"
            )));
        }
    }

    Ok(EnergyReport {
        lhs: area_uy2 + right_above + left_below,
        rhs: right_below + left_above + top_flux + bottom_flux,
        raw_i1,
        raw_i2,
        quad_points,
        area_uy2,
        right_above,
        left_below,
        right_below,
        left_above,
        top_flux,
        bottom_flux,
    })
}
