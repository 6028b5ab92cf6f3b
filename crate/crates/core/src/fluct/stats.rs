//! Log-log slope fits and the Kendall trend test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

/// Least squares `y = slope x + intercept`; `None` below two points or for
/// constant `x`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    Some(LineFit {
        slope,
        intercept,
        residual: (rss / n as f64).sqrt(),
        points: n,
    })
}

/// Fit of `log y` against `log x` over the pairs with `y > 0`.
pub fn log_log_fit(pairs: &[(f64, f64)]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    least_squares(&pts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KendallTrend {
    /// Kendall's tau-a.
    pub tau: f64,
    /// Normal score of the statistic, with continuity correction.
    pub z: f64,
    /// One-sided p-value against an increasing trend.
    pub p_increasing: f64,
}

impl KendallTrend {
    pub fn increasing_at(&self, alpha: f64) -> bool {
        self.p_increasing < alpha
    }
}

/// Mann-Kendall test of `ys` against `xs`. Needs at least three points.
pub fn kendall_trend(xs: &[f64], ys: &[f64]) -> Option<KendallTrend> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return None;
    }
    let sign = |v: f64| if v > 0.0 { 1i64 } else if v < 0.0 { -1 } else { 0 };
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += sign(xs[j] - xs[i]) * sign(ys[j] - ys[i]);
        }
    }
    let nf = n as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    let var = nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0;
    let corrected = match s.signum() {
        1 => s - 1,
        -1 => s + 1,
        _ => 0,
    } as f64;
    let z = corrected / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Some(KendallTrend {
        tau: s as f64 / pairs,
        z,
        p_increasing: 1.0 - normal.cdf(z),
    })
}
