//! The fluctuation sweep: one record per `N` with the asymmetry, the
//! fluctuation bracket and the constants of the continuum comparison chain.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::asymmetry::discrete_asymmetry;
use super::quadrature::continuum_symmetric_difference;
use super::stats::{log_log_fit, LineFit};
use super::{fk_deficit, fluctuation_bound_rhs};
use crate::error::{Error, Result};
use crate::kuhn::{fem_first_eigenvalue_warm, zeta};
use crate::lattice::{faber_radius, perimeter, scaled_perimeter, Config};
use crate::optimize::{ball_competitor, local_search, oracle_minimize, SearchBudget};
use crate::spectral::{lambda_n, DEFAULT_TOL};

/// Largest `N` for which the exhaustive minimum is computed, per dimension.
fn oracle_limit(d: usize) -> usize {
    match d {
        1 => 64,
        2 => 8,
        3 => 5,
        _ => 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// The ball competitor.
    Ball,
    /// Local search seeded with the ball competitor.
    LocalSearch,
    /// Exhaustive minimizers (small `N` only).
    Oracle,
}

/// Cardinalities of a sweep: an explicit list or a geometric range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cardinalities {
    List(Vec<usize>),
    Range { from: usize, to: usize, points: usize },
}

impl Cardinalities {
    /// Sorted, deduplicated values.
    pub fn values(&self) -> Vec<usize> {
        let mut v = match self {
            Cardinalities::List(v) => v.clone(),
            Cardinalities::Range { from, to, points } => {
                let (a, b) = ((*from).max(1) as f64, (*to).max(1) as f64);
                match points {
                    0 => Vec::new(),
                    1 => vec![*from],
                    p => (0..*p)
                        .map(|k| (a * (b / a).powf(k as f64 / (*p - 1) as f64)).round() as usize)
                        .collect(),
                }
            }
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_quadrature() -> f64 {
    1e-6
}

fn default_source() -> Source {
    Source::Ball
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSettings {
    pub max_rounds: usize,
    pub trials_per_round: usize,
    pub max_evaluations: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        let b = SearchBudget::default();
        SearchSettings {
            max_rounds: b.max_rounds,
            trials_per_round: b.trials_per_round,
            max_evaluations: b.max_evaluations,
        }
    }
}

impl From<SearchSettings> for SearchBudget {
    fn from(s: SearchSettings) -> Self {
        SearchBudget {
            max_rounds: s.max_rounds,
            trials_per_round: s.trials_per_round,
            max_evaluations: s.max_evaluations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: Cardinalities,
    #[serde(default = "default_source")]
    pub source: Source,
    /// Eigensolver residual tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Quadrature tolerance relative to `|zeta(X)|`.
    #[serde(default = "default_quadrature")]
    pub quadrature_tol: f64,
    #[serde(default)]
    pub search: SearchSettings,
}

impl SweepSpec {
    pub fn new(d: usize, n: Vec<usize>, source: Source) -> Self {
        SweepSpec {
            d,
            n: Cardinalities::List(n),
            source,
            tol: DEFAULT_TOL,
            quadrature_tol: default_quadrature(),
            search: SearchSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.d > 3 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        if [self.tol, self.quadrature_tol].iter().any(|t| t.is_nan() || *t <= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        let ns = self.n.values();
        if ns.is_empty() || ns[0] == 0 {
            return Err(Error::InvalidArgument("the sweep needs cardinalities N >= 1".into()));
        }
        Ok(())
    }
}

/// One row of the sweep. Fields that could not be computed are NaN and
/// `failure` says why.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub d: usize,
    pub lambda_n: f64,
    /// `lambda_N - reference`, where the reference is the exact minimum when
    /// `alpha_exact`, otherwise the best value observed for this `N`.
    pub alpha_n: f64,
    pub alpha_exact: bool,
    pub p_n: f64,
    pub discrete_asym: usize,
    pub cap_size: usize,
    pub bound_rhs: f64,
    /// `discrete_asym / bound_rhs`.
    pub fitted_c: f64,
    pub zeta_measure: f64,
    /// `(|zeta(X)| - N) / P(X)`.
    pub measure_constant: f64,
    pub continuum_asym: f64,
    pub quadrature_error: f64,
    /// `(discrete_asym - continuum_asym) / P(X)`.
    pub asym_constant: f64,
    pub fem_mu: f64,
    /// `(mu_fem - N^{-2/d} lambda_N) N^{3/d}`.
    pub fem_constant: f64,
    pub fk_deficit: f64,
    pub failure: String,
}

impl ExperimentRecord {
    fn failed(n: usize, d: usize, why: String) -> Self {
        ExperimentRecord {
            n,
            d,
            lambda_n: f64::NAN,
            alpha_n: f64::NAN,
            alpha_exact: false,
            p_n: f64::NAN,
            discrete_asym: 0,
            cap_size: 0,
            bound_rhs: f64::NAN,
            fitted_c: f64::NAN,
            zeta_measure: f64::NAN,
            measure_constant: f64::NAN,
            continuum_asym: f64::NAN,
            quadrature_error: f64::NAN,
            asym_constant: f64::NAN,
            fem_mu: f64::NAN,
            fem_constant: f64::NAN,
            fk_deficit: f64::NAN,
            failure: why,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.failure.is_empty()
    }
}

/// The configuration a sweep evaluates at `n`, and the smallest `lambda_N`
/// met on the way (for `alpha_N`).
pub fn sweep_config(spec: &SweepSpec, n: usize) -> Result<(Config, f64)> {
    match spec.source {
        Source::Ball => {
            let b = ball_competitor(n, spec.d)?;
            Ok((b.config, b.lambda_n))
        }
        Source::LocalSearch => {
            let b = ball_competitor(n, spec.d)?;
            let r = local_search(&b.config, spec.search.into())?;
            let best = r.m_lambda_n.min(b.lambda_n);
            Ok((r.minimizers.into_iter().next().expect("one result"), best))
        }
        Source::Oracle => {
            let r = oracle_minimize(n, spec.d)?;
            Ok((r.minimizers.into_iter().next().expect("one minimizer"), r.m_lambda_n))
        }
    }
}

/// Evaluates one record of the sweep.
pub fn run_record(spec: &SweepSpec, n: usize) -> Result<ExperimentRecord> {
    let d = spec.d;
    let (x, observed) = sweep_config(spec, n)?;
    let eig = lambda_n(&x, spec.tol)?;
    let (reference, alpha_exact) = if spec.source == Source::Oracle {
        (observed, true)
    } else if n <= oracle_limit(d) {
        (oracle_minimize(n, d)?.m_lambda_n, true)
    } else {
        (observed, false)
    };
    let alpha_n = (eig.lambda_n - reference.min(eig.lambda_n)).max(0.0);
    let p_n = scaled_perimeter(&x);
    let p = perimeter(&x) as f64;
    let asym = discrete_asymmetry(&x)?;
    let bound_rhs = fluctuation_bound_rhs(n, p_n, alpha_n, d);
    let mesh = zeta(&x);
    let zeta_measure = mesh.measure();
    let shift: Vec<f64> = asym.best_shift.iter().map(|&c| c as f64).collect();
    let quad = continuum_symmetric_difference(&mesh, faber_radius(n, d), &shift, spec.quadrature_tol * zeta_measure)?;
    let fem = fem_first_eigenvalue_warm(&mesh, spec.tol, Some(&eig.eigenfunction))?;
    let deficit = fk_deficit(&mesh, fem.mu);
    Ok(ExperimentRecord {
        n,
        d,
        lambda_n: eig.lambda_n,
        alpha_n,
        alpha_exact,
        p_n,
        discrete_asym: asym.discrete_asym,
        cap_size: asym.cap_size,
        bound_rhs,
        fitted_c: asym.discrete_asym as f64 / bound_rhs,
        zeta_measure,
        measure_constant: mesh.measure_excess_constant(),
        continuum_asym: quad.value,
        quadrature_error: quad.error_bound,
        asym_constant: (asym.discrete_asym as f64 - quad.value) / p,
        fem_mu: fem.mu,
        fem_constant: (fem.mu - eig.mu_min) * (n as f64).powf(3.0 / d as f64),
        fk_deficit: deficit.deficit,
        failure: if quad.converged {
            String::new()
        } else {
            format!("quadrature bracket {:.3e} above tolerance", quad.error_bound)
        },
    })
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub records: Vec<ExperimentRecord>,
    /// Seconds per record, same order. Kept out of the records so their
    /// serialization is reproducible.
    pub wall_times: Vec<f64>,
}

/// Runs the records for `ns` in parallel; failures become records with a
/// message and never abort the sweep. Output is in the order of `ns`.
pub fn run_records(spec: &SweepSpec, ns: &[usize]) -> Result<Sweep> {
    spec.validate()?;
    let out: Vec<(ExperimentRecord, f64)> = ns
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let rec = run_record(spec, n).unwrap_or_else(|e| {
                log::warn!("N={n}: {e}");
                ExperimentRecord::failed(n, spec.d, e.to_string())
            });
            (rec, start.elapsed().as_secs_f64())
        })
        .collect();
    let (records, wall_times) = out.into_iter().unzip();
    Ok(Sweep { records, wall_times })
}

pub fn run_experiment(spec: &SweepSpec) -> Result<Sweep> {
    run_records(spec, &spec.n.values())
}

/// Log-log slope of the discrete asymmetry against `N` over the successful
/// records with positive asymmetry. Compare with `1 - 1/(2d)`.
pub fn fit_exponent(records: &[ExperimentRecord]) -> Option<LineFit> {
    let pairs: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| (r.n as f64, r.discrete_asym as f64))
        .collect();
    log_log_fit(&pairs)
}

/// The exponent the fluctuation estimate predicts.
pub fn target_exponent(d: usize) -> f64 {
    1.0 - 1.0 / (2.0 * d as f64)
}
