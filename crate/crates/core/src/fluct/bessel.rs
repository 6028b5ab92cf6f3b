//! Bessel zeros and the Dirichlet eigenvalue of a ball.

use statrs::function::gamma::gamma;

use crate::lattice::unit_ball_volume;

/// `J_nu(x)` by its power series, each term from the previous one. Accurate
/// to ~1e-13 for `x <= 12`, which covers the first zero for every `nu` used
/// here (`nu <= 1/2` for `d <= 3`).
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    for m in 1..200 {
        term *= q / (m as f64 * (m as f64 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && m as f64 > 0.5 * x {
            break;
        }
    }
    sum
}

/// First positive zero of `J_nu`, by scanning for a sign change and bisecting
/// to an absolute width of `1e-13`.
pub fn first_bessel_zero(nu: f64) -> f64 {
    let step = 0.05;
    let mut a = step;
    let mut fa = bessel_j(nu, a);
    loop {
        let b = a + step;
        let fb = bessel_j(nu, b);
        if fa == 0.0 {
            return a;
        }
        if fa.signum() != fb.signum() {
            let (mut lo, mut hi) = (a, b);
            while hi - lo > 1e-13 {
                let mid = 0.5 * (lo + hi);
                let fm = bessel_j(nu, mid);
                if fm.signum() == fa.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        a = b;
        fa = fb;
    }
}

/// First Dirichlet eigenvalue of the radius-one ball: `j_{d/2-1,1}^2`.
pub fn unit_radius_ball_eigenvalue(d: usize) -> f64 {
    first_bessel_zero(d as f64 / 2.0 - 1.0).powi(2)
}

/// First Dirichlet eigenvalue of the ball of unit measure,
/// `|B_1|^{2/d} j_{d/2-1,1}^2`. This is the limit of `m_{lambda,N}`.
pub fn ball_eigenvalue(d: usize) -> f64 {
    unit_ball_volume(d).powf(2.0 / d as f64) * unit_radius_ball_eigenvalue(d)
}

/// First Dirichlet eigenvalue of the ball of measure `measure`.
pub fn ball_eigenvalue_of_measure(d: usize, measure: f64) -> f64 {
    ball_eigenvalue(d) / measure.powf(2.0 / d as f64)
}
