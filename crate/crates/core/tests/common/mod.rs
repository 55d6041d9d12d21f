//! Reference oracle for the integration tests: classical fixed-step
//! fourth-order Runge-Kutta, written independently of the library's
//! solver path (its own right-hand side, stepping, and interpolation).
#![allow(dead_code)]

/// One classical RK4 step of the system (f', g') = (g, -A f g η).
pub fn rk4_step(eta: f64, y: [f64; 2], h: f64, coeff_a: f64) -> [f64; 2] {
    let f = |eta: f64, y: [f64; 2]| [y[1], -coeff_a * y[0] * y[1] * eta];
    let k1 = f(eta, y);
    let k2 = f(
        eta + 0.5 * h,
        [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]],
    );
    let k3 = f(
        eta + 0.5 * h,
        [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]],
    );
    let k4 = f(eta + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrate `n_steps` of size `h` from (a0, a1) at η = 0, returning
/// (η, f, g) every `stride` steps, final state included.
pub fn rk4_sampled(
    a0: f64,
    a1: f64,
    coeff_a: f64,
    h: f64,
    n_steps: usize,
    stride: usize,
) -> Vec<(f64, f64, f64)> {
    let mut samples = Vec::with_capacity(n_steps / stride + 2);
    let mut y = [a0, a1];
    samples.push((0.0, y[0], y[1]));
    for k in 0..n_steps {
        let eta = k as f64 * h;
        y = rk4_step(eta, y, h, coeff_a);
        if (k + 1) % stride == 0 || k + 1 == n_steps {
            samples.push(((k + 1) as f64 * h, y[0], y[1]));
        }
    }
    samples
}

/// Final (η, f, g) after `n_steps` of size `h`.
pub fn rk4_final(a0: f64, a1: f64, coeff_a: f64, h: f64, n_steps: usize) -> (f64, f64, f64) {
    let mut y = [a0, a1];
    for k in 0..n_steps {
        y = rk4_step(k as f64 * h, y, h, coeff_a);
    }
    (n_steps as f64 * h, y[0], y[1])
}

/// (η, f, g) at an arbitrary η: full steps of size `h`, then one short
/// closing step.
pub fn rk4_at(a0: f64, a1: f64, coeff_a: f64, h: f64, eta: f64) -> (f64, f64, f64) {
    let n = (eta / h).floor() as usize;
    let mut y = [a0, a1];
    for k in 0..n {
        y = rk4_step(k as f64 * h, y, h, coeff_a);
    }
    let reached = n as f64 * h;
    if eta > reached {
        y = rk4_step(reached, y, eta - reached, coeff_a);
    }
    (eta, y[0], y[1])
}

/// Cubic Hermite value of f inside one oracle step.
fn hermite_f(eta0: f64, h: f64, f0: f64, g0: f64, f1: f64, g1: f64, eta: f64) -> f64 {
    let s = (eta - eta0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * f0
        + (s3 - 2.0 * s2 + s) * h * g0
        + (-2.0 * s3 + 3.0 * s2) * f1
        + (s3 - s2) * h * g1
}

/// First zero crossing of f: bracket on fixed steps, then bisect a
/// cubic Hermite interpolant of the bracketing step. Returns (T1, g(T1)).
pub fn rk4_crossing(a0: f64, a1: f64, coeff_a: f64, h: f64) -> (f64, f64) {
    let mut y = [a0, a1];
    let mut k = 0usize;
    loop {
        let eta = k as f64 * h;
        let y_next = rk4_step(eta, y, h, coeff_a);
        if y_next[0] >= 0.0 {
            let eta1 = (k + 1) as f64 * h;
            let (f0, g0) = (y[0], y[1]);
            let (f1, g1) = (y_next[0], y_next[1]);
            let (mut lo, mut hi) = (eta, eta1);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if hermite_f(eta, eta1 - eta, f0, g0, f1, g1, mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t1 = 0.5 * (lo + hi);
            let s = (t1 - eta) / (eta1 - eta);
            let g_at = (1.0 - s) * g0 + s * g1;
            return (t1, g_at);
        }
        y = y_next;
        k += 1;
        assert!(
            (k as f64) * h < 1e3,
            "oracle found no crossing before eta = 1e3"
        );
    }
}
