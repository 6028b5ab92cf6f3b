//! Asymmetry functionals, the Faber-Krahn deficit and the fluctuation sweep.

mod asymmetry;
mod bessel;
mod experiment;
mod output;
mod quadrature;
mod stats;

pub use asymmetry::{discrete_asymmetry, reference_cap, symmetric_difference_at, DiscreteAsymmetry};
pub use bessel::{
    ball_eigenvalue, ball_eigenvalue_of_measure, bessel_j, first_bessel_zero, unit_radius_ball_eigenvalue,
};
pub use experiment::{
    fit_exponent, run_experiment, run_record, run_records, sweep_config, target_exponent, Cardinalities,
    ExperimentRecord, SearchSettings, Source, Sweep, SweepSpec,
};
pub use output::{content_hash, gnuplot_script, parse_records_csv, records_to_csv, RECORDS_HEADER, RECORDS_VERSION};
pub use quadrature::{
    ball_intersection_volume, continuum_symmetric_difference, default_tolerance, QuadratureResult, MAX_DEPTH,
};
pub use stats::{kendall_trend, least_squares, log_log_fit, KendallTrend, LineFit};

use serde::Serialize;

use crate::error::Result;
use crate::kuhn::{zeta, KuhnMesh};
use crate::lattice::{faber_radius, Config};

/// Discrete asymmetry together with the continuum symmetric difference of
/// `zeta(X)` and `B_{r_N}` at the same shift.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymmetryResult {
    pub best_shift: Vec<i32>,
    pub discrete_asym: usize,
    pub continuum_asym: f64,
    pub quadrature_error: f64,
}

/// `tol` is relative to `|zeta(X)|`.
pub fn asymmetry(x: &Config, tol: f64) -> Result<AsymmetryResult> {
    let disc = discrete_asymmetry(x)?;
    let mesh = zeta(x);
    let z: Vec<f64> = disc.best_shift.iter().map(|&c| c as f64).collect();
    let q = continuum_symmetric_difference(&mesh, faber_radius(x.len(), x.dim()), &z, tol * mesh.measure())?;
    Ok(AsymmetryResult {
        best_shift: disc.best_shift,
        discrete_asym: disc.discrete_asym,
        continuum_asym: q.value,
        quadrature_error: q.error_bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FkDeficit {
    /// `(lambda(Omega) - lambda(B)) / lambda(B)` with `|B| = |Omega|`.
    pub deficit: f64,
    pub sqrt_deficit: f64,
    /// The FEM value fell below the ball eigenvalue and was clamped to 0.
    pub clamped: bool,
}

/// Faber-Krahn deficit of `Omega = zeta(X)`, with `lambda(Omega)` replaced by
/// its FEM upper bound `fem_mu`.
pub fn fk_deficit(mesh: &KuhnMesh, fem_mu: f64) -> FkDeficit {
    let ball = ball_eigenvalue_of_measure(mesh.dim(), mesh.measure());
    let raw = (fem_mu - ball) / ball;
    let clamped = raw < 0.0;
    let deficit = raw.max(0.0);
    if clamped {
        log::warn!("negative Faber-Krahn deficit {raw:.3e} clamped to 0");
    }
    log::debug!("Faber-Krahn deficit {deficit:.6e}, square root {:.6e}", deficit.sqrt());
    FkDeficit {
        deficit,
        sqrt_deficit: deficit.sqrt(),
        clamped,
    }
}

/// The bracket `N (N^{-1/(2d)} P_N^{1/2} + alpha_N^{1/2} + N^{-1/d})` of the
/// fluctuation estimate, without its constant.
pub fn fluctuation_bound_rhs(n: usize, p_n: f64, alpha_n: f64, d: usize) -> f64 {
    let nf = n as f64;
    let df = d as f64;
    nf * (nf.powf(-1.0 / (2.0 * df)) * p_n.sqrt() + alpha_n.sqrt() + nf.powf(-1.0 / df))
}
