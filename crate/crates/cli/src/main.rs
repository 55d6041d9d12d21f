//! Command-line front end: solve the similarity profile, export the
//! reconstructed field and contours as CSV, and run the verification
//! checks as a gate.
//!
//! Exit status: 0 on success and all checks passing, 1 when a check or
//! runtime invariant fails, 2 on invalid arguments.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use selfsim_core::{
    check_asymptote, check_crossing_bounds, energy_balance, find_asymptote, find_crossing,
    integrate, recover_scaling, rescale_to_unit_a, second_quadrant_slope_check, verify, Error,
    Params, Rectangle, SimilarityProfile, SolveConfig, State,
};

#[derive(Parser)]
#[command(
    name = "selfsim",
    version,
    about = "Sign-changing self-similar solutions of u u_x = u_yy: profile solver, field export, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Initial data, coefficients, and solver settings shared by every
/// subcommand.
#[derive(Args, Clone)]
struct ProblemArgs {
    /// Profile value f(0); must be negative
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    a0: f64,

    /// Profile slope f'(0); must be positive
    #[arg(long, default_value_t = 1.0)]
    a1: f64,

    /// Coefficient A of the f f' eta term; absorbed into the initial
    /// data for field and verification commands
    #[arg(long = "coeff-a", default_value_t = 1.0)]
    coeff_a: f64,

    /// Per-step relative error target
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,

    /// Per-step absolute error target
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,

    /// Initial step size
    #[arg(long, default_value_t = 1e-3)]
    h_init: f64,

    /// Maximum step size
    #[arg(long, default_value_t = 0.1)]
    h_max: f64,

    /// Budget on step attempts
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,

    /// Slope threshold ending the asymptote phase
    #[arg(long, default_value_t = 1e-12)]
    tail_g_tol: f64,

    /// Write to this file instead of stdout (relative paths honor
    /// SELFSIM_OUTPUT_DIR)
    #[arg(long)]
    output: Option<PathBuf>,
}

impl ProblemArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            h_init: self.h_init,
            h_max: self.h_max,
            max_steps: self.max_steps,
            tail_g_tol: self.tail_g_tol,
        }
    }

    fn initial(&self) -> State {
        State::new(0.0, self.a0, self.a1)
    }

    fn params(&self) -> Params {
        Params::new(self.coeff_a, 0.0)
    }

    /// Absorb the coefficient into the initial data and build the field.
    fn profile(&self) -> Result<SimilarityProfile, Error> {
        let (unit_state, _) = rescale_to_unit_a(self.initial(), self.params())?;
        let scaling = recover_scaling(1.0, 0.0, 2.0, 0.0)?;
        SimilarityProfile::compute(unit_state.f, unit_state.g, self.config(), scaling)
    }

    /// Canonical flag string for the provenance comment.
    fn provenance(&self) -> String {
        format!(
            "a0={} a1={} coeff_a={} rel_tol={} abs_tol={} h_init={} h_max={} max_steps={} tail_g_tol={}",
            self.a0,
            self.a1,
            self.coeff_a,
            self.rel_tol,
            self.abs_tol,
            self.h_init,
            self.h_max,
            self.max_steps,
            self.tail_g_tol
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the profile and export eta,f,g samples as CSV
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Right end of the integration interval
        #[arg(long, default_value_t = 10.0)]
        eta_end: f64,
        /// Number of uniformly spaced samples
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },

    /// Locate the sign change f(T1) = 0 and report it with its bounds
    Crossing {
        #[command(flatten)]
        problem: ProblemArgs,
    },

    /// Integrate the decaying tail and report the limit of f
    Asymptote {
        #[command(flatten)]
        problem: ProblemArgs,
    },

    /// Export x,y,u,ux,uy,uyy,residual on a rectangular grid as CSV
    Field {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        grid: GridArgs,
    },

    /// Export contour abscissas and polylines as CSV
    Contours {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Contour levels of u, comma separated
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "-1.5,-1,-0.5,0,0.5,1,1.5,2"
        )]
        levels: Vec<f64>,
        /// Largest x of the exported polylines
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        /// Points per polyline
        #[arg(long, default_value_t = 101)]
        points: usize,
    },

    /// Report the largest pointwise residual of u u_x - u_yy on a grid
    Residual {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        grid: GridArgs,
    },

    /// Evaluate the energy balance over one rectangle
    Energy {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1.0)]
        x1: f64,
        #[arg(long, default_value_t = 4.0)]
        x2: f64,
        #[arg(long, default_value_t = 0.0)]
        y1: f64,
        /// Top edge; defaults to twice the interface height at x2
        #[arg(long)]
        y2: Option<f64>,
        #[arg(long, default_value_t = 64)]
        quad_points: usize,
    },

    /// Run every verification check; exit 0 only if all pass
    VerifyAll {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 64)]
        quad_points: usize,
    },
}

#[derive(Args, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = 0.1)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 0.0)]
    y_min: f64,
    #[arg(long, default_value_t = 10.0)]
    y_max: f64,
    #[arg(long, default_value_t = 100)]
    nx: usize,
    #[arg(long, default_value_t = 100)]
    ny: usize,
}

impl GridArgs {
    fn provenance(&self) -> String {
        format!(
            "x_min={} x_max={} y_min={} y_max={} nx={} ny={}",
            self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny
        )
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.x_min > 0.0
            && self.x_min < self.x_max
            && self.y_min >= 0.0
            && self.y_min < self.y_max)
        {
            return Err(Error::InvalidConfig(
                "grid needs 0 < x_min < x_max and 0 <= y_min < y_max",
            ));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidConfig("grid needs nx >= 2 and ny >= 2"));
        }
        Ok(())
    }

    fn x_at(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    fn y_at(&self, j: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64
    }
}

/// 17 significant digits, locale-independent.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn provenance_line(subcommand: &str, rest: &str) -> String {
    format!(
        "# selfsim {} {subcommand} {rest}\n",
        env!("CARGO_PKG_VERSION")
    )
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), std::io::Error> {
    match path {
        Some(p) => {
            let resolved = match std::env::var_os("SELFSIM_OUTPUT_DIR") {
                Some(dir) if p.is_relative() => Path::new(&dir).join(p),
                _ => p.clone(),
            };
            std::fs::write(resolved, content)
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        // Runtime failures of the solve or a guaranteed property.
        Error::MaxSteps { .. } | Error::StepUnderflow { .. } | Error::InvariantViolation(_) => 1,
        // Everything else is a misuse of the interface.
        _ => 2,
    }
}

fn run_solve(problem: &ProblemArgs, eta_end: f64, samples: usize) -> Result<String, Error> {
    if samples < 2 {
        return Err(Error::InvalidConfig("samples must be at least 2"));
    }
    let traj = integrate(
        problem.initial(),
        problem.params(),
        problem.config(),
        eta_end,
    )?;
    let mut out = provenance_line(
        "solve",
        &format!(
            "{} eta_end={eta_end} samples={samples}",
            problem.provenance()
        ),
    );
    out.push_str("eta,f,g\n");
    for i in 0..samples {
        let eta = eta_end * i as f64 / (samples - 1) as f64;
        let s = traj.dense_eval(eta)?;
        let _ = writeln!(out, "{},{},{}", num(eta), num(s.f), num(s.g));
    }
    Ok(out)
}

fn run_crossing(problem: &ProblemArgs) -> Result<String, Error> {
    let (event, _) = find_crossing(problem.initial(), problem.params(), problem.config())?;
    let report = check_crossing_bounds(problem.a0, problem.a1, &event);
    let mut out = provenance_line("crossing", &problem.provenance());
    let _ = writeln!(out, "t1={}", num(event.t1));
    let _ = writeln!(out, "g_at_t1={}", num(event.g_at_t1));
    let _ = writeln!(out, "t1_bound={}", num(report.crossing_time.bound));
    let _ = writeln!(out, "t1_slack={}", num(report.crossing_time.slack()));
    let _ = writeln!(out, "g_bound={}", num(report.crossing_slope.bound));
    let _ = writeln!(out, "g_slack={}", num(report.crossing_slope.slack()));
    Ok(out)
}

fn run_asymptote(problem: &ProblemArgs) -> Result<String, Error> {
    let (est, _) = find_asymptote(problem.initial(), problem.params(), problem.config())?;
    let mut out = provenance_line("asymptote", &problem.provenance());
    let _ = writeln!(out, "a={}", num(est.a));
    let _ = writeln!(out, "eta_stop={}", num(est.eta_stop));
    let _ = writeln!(out, "tail_correction={}", num(est.tail_correction));
    let _ = writeln!(out, "residual_g={}", num(est.residual_g));
    Ok(out)
}

fn run_field(problem: &ProblemArgs, grid: &GridArgs) -> Result<String, Error> {
    grid.validate()?;
    let profile = problem.profile()?;
    let mut out = provenance_line(
        "field",
        &format!("{} {}", problem.provenance(), grid.provenance()),
    );
    out.push_str("x,y,u,ux,uy,uyy,residual\n");
    for i in 0..grid.nx {
        let x = grid.x_at(i);
        for j in 0..grid.ny {
            let y = grid.y_at(j);
            let d = profile.eval_u_derivatives(x, y)?;
            let residual = d.u * d.u_x - d.u_yy;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(x),
                num(y),
                num(d.u),
                num(d.u_x),
                num(d.u_y),
                num(d.u_yy),
                num(residual)
            );
        }
    }
    Ok(out)
}

fn run_contours(
    problem: &ProblemArgs,
    levels: &[f64],
    x_max: f64,
    points: usize,
) -> Result<String, Error> {
    if points < 2 {
        return Err(Error::InvalidConfig("points must be at least 2"));
    }
    if x_max.is_nan() || x_max <= 0.0 {
        return Err(Error::InvalidConfig("x_max must be positive"));
    }
    let profile = problem.profile()?;
    let scaling = profile.scaling();
    let mut out = provenance_line(
        "contours",
        &format!(
            "{} levels={} x_max={x_max} points={points}",
            problem.provenance(),
            levels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    out.push_str("level,eta_c,x,y\n");
    for &level in levels {
        let eta_c = profile.contour_eta(level)?;
        for k in 0..points {
            let x = x_max * k as f64 / (points - 1) as f64;
            let y = eta_c * scaling.delta(x);
            let _ = writeln!(out, "{},{},{},{}", num(level), num(eta_c), num(x), num(y));
        }
    }
    Ok(out)
}

fn run_residual(problem: &ProblemArgs, grid: &GridArgs) -> Result<String, Error> {
    grid.validate()?;
    let profile = problem.profile()?;
    let mut max_res: f64 = 0.0;
    let mut at = (grid.x_min, grid.y_min);
    for i in 0..grid.nx {
        let x = grid.x_at(i);
        for j in 0..grid.ny {
            let y = grid.y_at(j);
            let r = profile.pde_residual(x, y)?.abs();
            if r > max_res {
                max_res = r;
                at = (x, y);
            }
        }
    }
    let mut out = provenance_line(
        "residual",
        &format!("{} {}", problem.provenance(), grid.provenance()),
    );
    let _ = writeln!(out, "max_residual={}", num(max_res));
    let _ = writeln!(out, "at_x={}", num(at.0));
    let _ = writeln!(out, "at_y={}", num(at.1));
    Ok(out)
}

fn energy_rectangle(
    profile: &SimilarityProfile,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: Option<f64>,
) -> Result<Rectangle, Error> {
    let y2 = y2.unwrap_or_else(|| 2.0 * profile.eta0() * profile.scaling().delta(x2));
    Rectangle::new(x1, x2, y1, y2)
}

fn run_energy(
    problem: &ProblemArgs,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: Option<f64>,
    quad_points: usize,
) -> Result<String, Error> {
    let profile = problem.profile()?;
    let rect = energy_rectangle(&profile, x1, x2, y1, y2)?;
    let report = energy_balance(&profile, &rect, quad_points)?;
    let mut out = provenance_line(
        "energy",
        &format!(
            "{} x1={x1} x2={x2} y1={} y2={} quad_points={quad_points}",
            problem.provenance(),
            rect.y1,
            rect.y2
        ),
    );
    let _ = writeln!(out, "lhs={}", num(report.lhs));
    let _ = writeln!(out, "rhs={}", num(report.rhs));
    let _ = writeln!(out, "raw_i1={}", num(report.raw_i1));
    let _ = writeln!(out, "raw_i2={}", num(report.raw_i2));
    let _ = writeln!(out, "quad_points={}", report.quad_points);
    let _ = writeln!(out, "area_uy2={}", num(report.area_uy2));
    let _ = writeln!(out, "right_above={}", num(report.right_above));
    let _ = writeln!(out, "left_below={}", num(report.left_below));
    let _ = writeln!(out, "right_below={}", num(report.right_below));
    let _ = writeln!(out, "left_above={}", num(report.left_above));
    let _ = writeln!(out, "top_flux={}", num(report.top_flux));
    let _ = writeln!(out, "bottom_flux={}", num(report.bottom_flux));
    let _ = writeln!(
        out,
        "relative_imbalance={}",
        num(report.relative_imbalance())
    );
    let _ = writeln!(
        out,
        "raw_identity_residual={}",
        num(report.raw_identity_residual())
    );
    Ok(out)
}

/// All verification checks; the bool is the overall verdict.
fn run_verify_all(problem: &ProblemArgs, quad_points: usize) -> Result<(String, bool), Error> {
    // Bounds are stated for the unit-coefficient system; absorb A.
    let (unit_state, unit_params) = rescale_to_unit_a(problem.initial(), problem.params())?;
    let config = problem.config();
    let (a0, a1) = (unit_state.f, unit_state.g);

    let mut out = provenance_line(
        "verify-all",
        &format!("{} quad_points={quad_points}", problem.provenance()),
    );
    let mut all_pass = true;
    let mut line = |name: &str, pass: bool, detail: String| {
        let _ = writeln!(
            out,
            "{name}: {} {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    };

    let (event, traj) = find_crossing(unit_state, unit_params, config)?;
    let bounds = check_crossing_bounds(a0, a1, &event);
    line(
        "crossing_time_bound",
        bounds.crossing_time.pass,
        format!(
            "T1={} bound |a0|/a1={} slack={}",
            num(bounds.crossing_time.measured),
            num(bounds.crossing_time.bound),
            num(bounds.crossing_time.slack())
        ),
    );
    line(
        "crossing_slope_bound",
        bounds.crossing_slope.pass,
        format!(
            "g(T1)={} bound a1+|a0|^3/a1={} slack={}",
            num(bounds.crossing_slope.measured),
            num(bounds.crossing_slope.bound),
            num(bounds.crossing_slope.slack())
        ),
    );
    all_pass &= bounds.pass();

    let slope = second_quadrant_slope_check(&traj, a0, a1);
    line(
        "second_quadrant_slope",
        slope.pass,
        format!(
            "max -f*eta={} at eta={} bound a0^2/a1={}",
            num(slope.max_ratio),
            num(slope.at_eta),
            num(slope.bound)
        ),
    );
    all_pass &= slope.pass;

    let (est, _) = find_asymptote(unit_state, unit_params, config)?;
    let asym = check_asymptote(a0, a1, &est, config.tail_g_tol);
    line(
        "asymptote",
        asym.pass(),
        format!(
            "a={} residual_g={} tail_correction={}",
            num(asym.limit),
            num(asym.residual_g),
            num(asym.tail_correction)
        ),
    );
    all_pass &= asym.pass();

    let profile = problem.profile()?;
    let rect = energy_rectangle(&profile, 1.0, 4.0, 0.0, None)?;
    let report = energy_balance(&profile, &rect, quad_points)?;
    let energy_pass = report.relative_imbalance() <= verify::ENERGY_DEFAULT_REL_TOL
        && report.raw_identity_residual() <= verify::ENERGY_DEFAULT_REL_TOL;
    line(
        "energy_balance",
        energy_pass,
        format!(
            "relative_imbalance={} raw_identity_residual={} tolerance={}",
            num(report.relative_imbalance()),
            num(report.raw_identity_residual()),
            num(verify::ENERGY_DEFAULT_REL_TOL)
        ),
    );
    all_pass &= energy_pass;

    let _ = writeln!(
        out,
        "verify_all: {}",
        if all_pass { "PASS" } else { "FAIL" }
    );
    Ok((out, all_pass))
}

fn dispatch(cli: Cli) -> Result<u8, Error> {
    let (output, content, code) = match &cli.command {
        Command::Solve {
            problem,
            eta_end,
            samples,
        } => (
            problem.output.clone(),
            run_solve(problem, *eta_end, *samples)?,
            0,
        ),
        Command::Crossing { problem } => (problem.output.clone(), run_crossing(problem)?, 0),
        Command::Asymptote { problem } => (problem.output.clone(), run_asymptote(problem)?, 0),
        Command::Field { problem, grid } => (problem.output.clone(), run_field(problem, grid)?, 0),
        Command::Contours {
            problem,
            levels,
            x_max,
            points,
        } => (
            problem.output.clone(),
            run_contours(problem, levels, *x_max, *points)?,
            0,
        ),
        Command::Residual { problem, grid } => {
            (problem.output.clone(), run_residual(problem, grid)?, 0)
        }
        Command::Energy {
            problem,
            x1,
            x2,
            y1,
            y2,
            quad_points,
        } => (
            problem.output.clone(),
            run_energy(problem, *x1, *x2, *y1, *y2, *quad_points)?,
            0,
        ),
        Command::VerifyAll {
            problem,
            quad_points,
        } => {
            let (content, all_pass) = run_verify_all(problem, *quad_points)?;
            (
                problem.output.clone(),
                content,
                if all_pass { 0 } else { 1 },
            )
        }
    };
    if let Err(e) = write_output(&output, &content) {
        eprintln!("error: cannot write output: {e}");
        return Ok(2);
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
