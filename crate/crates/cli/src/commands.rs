//! Handlers for the single-configuration subcommands.

use std::fs;
use std::path::Path;

use lattice_spectra::fluct::{asymmetry, fk_deficit};
use lattice_spectra::io::{format_config, function_to_text, parse_function_text, read_config, write_atomic, ConfigFormat};
use lattice_spectra::kuhn::{fem_first_eigenvalue, mesh_summary, write_vtk, zeta};
use lattice_spectra::lattice::{
    internal_edges, is_connected, is_direction_convex, outer_boundary, perimeter, scaled_perimeter,
};
use lattice_spectra::optimize::{ball_competitor, local_search, oracle_minimize, SearchBudget};
use lattice_spectra::rearrange::{rearrange_full, set_rearrange};
use lattice_spectra::spectral::{cube_competitor_bound, lambda_n};
use lattice_spectra::{Config, Error, Result, Site};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{emit, Global};

/// Reads a configuration and checks it against `--dim`.
fn load(g: &Global, path: &Path) -> Result<Config> {
    let x = read_config(path)?;
    if let Some(d) = g.dim {
        if d != x.dim() {
            return Err(Error::DimensionMismatch { expected: d, found: x.dim() });
        }
    }
    Ok(x)
}

fn required_dim(g: &Global) -> Result<usize> {
    match g.dim {
        None => Err(Error::InvalidArgument("--dim is required".into())),
        Some(0) => Err(Error::ZeroDimension),
        Some(d) => Ok(d),
    }
}

fn write_config(x: &Config, path: &Path) -> Result<()> {
    write_atomic(path, format_config(x, ConfigFormat::from_path(path)).as_bytes())
}

pub fn eig(g: &Global, path: &Path, dump: Option<&Path>) -> Result<()> {
    let x = load(g, path)?;
    let e = lambda_n(&x, g.tol)?;
    if let Some(out) = dump {
        write_atomic(out, function_to_text(&e.eigenfunction).as_bytes())?;
    }
    emit::print(&e, g.format)
}

pub fn perimeter_cmd(g: &Global, path: &Path) -> Result<()> {
    let x = load(g, path)?;
    emit::print(
        &json!({
            "N": x.len(),
            "d": x.dim(),
            "perimeter": perimeter(&x),
            "P_N": scaled_perimeter(&x),
            "internal_edges": internal_edges(&x),
            "connected": is_connected(&x),
            "direction_convex": is_direction_convex(&x),
        }),
        g.format,
    )
}

pub fn rearrange(g: &Global, path: &Path, function: bool, out: Option<&Path>) -> Result<()> {
    if function {
        let text = fs::read_to_string(path)?;
        let u = parse_function_text(&text, g.dim)?;
        let r = rearrange_full(&u)?;
        let body = function_to_text(&r);
        return match out {
            Some(p) => write_atomic(p, body.as_bytes()),
            None => {
                print!("{body}");
                Ok(())
            }
        };
    }
    let x = load(g, path)?;
    let r = set_rearrange(&x)?;
    let (before, after) = (lambda_n(&x, g.tol)?, lambda_n(&r, g.tol)?);
    if let Some(p) = out {
        write_config(&r, p)?;
    }
    emit::print(
        &json!({
            "N": x.len(),
            "d": x.dim(),
            "lambda_N_before": before.lambda_n,
            "lambda_N_after": after.lambda_n,
            "config": r,
        }),
        g.format,
    )
}

pub fn zeta_cmd(g: &Global, path: &Path) -> Result<()> {
    let x = load(g, path)?;
    let mesh = zeta(&x);
    let s = mesh_summary(&mesh);
    emit::print(
        &json!({
            "N": x.len(),
            "d": s.d,
            "n_simplices": s.n_simplices,
            "measure": s.measure,
            "n_dof": s.n_dof,
            "measure_constant": mesh.measure_excess_constant(),
        }),
        g.format,
    )
}

pub fn fem(g: &Global, path: &Path) -> Result<()> {
    let x = load(g, path)?;
    let mesh = zeta(&x);
    let f = fem_first_eigenvalue(&mesh, g.tol)?;
    let e = lambda_n(&x, g.tol)?;
    let fk = fk_deficit(&mesh, f.mu);
    let n = x.len() as f64;
    emit::print(
        &json!({
            "N": x.len(),
            "d": x.dim(),
            "fem_mu": f.mu,
            "mu_min": e.mu_min,
            "fem_constant": (f.mu - e.mu_min) * n.powf(3.0 / x.dim() as f64),
            "fk_deficit": fk.deficit,
            "fk_clamped": fk.clamped,
            "iterations": f.iterations,
            "residual": f.residual,
        }),
        g.format,
    )
}

pub fn asym(g: &Global, path: &Path, quadrature_tol: f64) -> Result<()> {
    let x = load(g, path)?;
    let a = asymmetry(&x, quadrature_tol)?;
    emit::print(&a, g.format)
}

pub fn minimize_exact(g: &Global, n: usize) -> Result<()> {
    let r = oracle_minimize(n, required_dim(g)?)?;
    emit::print(&r, g.format)
}

/// Grows a connected configuration of `n` sites by random boundary additions.
fn random_connected(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Result<Config> {
    let mut x = Config::new(vec![Site::origin(d)])?;
    while x.len() < n {
        let b = outer_boundary(&x);
        let mut sites = x.sites().to_vec();
        sites.push(b[rng.random_range(0..b.len())].clone());
        x = Config::new(sites)?;
    }
    Ok(x)
}

pub fn minimize_local(g: &Global, n: usize, restarts: usize, start: Option<&Path>) -> Result<()> {
    let seed = match start {
        Some(p) => {
            let x = load(g, p)?;
            if x.len() != n {
                return Err(Error::InvalidArgument(format!("start has {} sites, not {n}", x.len())));
            }
            x
        }
        None => ball_competitor(n, required_dim(g)?)?.config,
    };
    let d = seed.dim();
    let mut best = local_search(&seed, SearchBudget::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    for k in 0..restarts {
        let r = local_search(&random_connected(&mut rng, n, d)?, SearchBudget::default())?;
        log::info!("restart {k}: {}", r.m_lambda_n);
        if r.m_lambda_n < best.m_lambda_n {
            best = r;
        }
    }
    emit::print(&best, g.format)
}

pub fn competitor_ball(g: &Global, n: usize, out: Option<&Path>) -> Result<()> {
    let b = ball_competitor(n, required_dim(g)?)?;
    if let Some(p) = out {
        write_config(&b.config, p)?;
    }
    emit::print(&b, g.format)
}

pub fn competitor_cube(g: &Global, n: usize, out: Option<&Path>) -> Result<()> {
    let c = cube_competitor_bound(n, required_dim(g)?)?;
    if let Some(p) = out {
        write_config(&c.config, p)?;
    }
    let e = lambda_n(&c.config, g.tol)?;
    emit::print(
        &json!({
            "N": n,
            "d": c.config.dim(),
            "k": c.k,
            "profile_energy": c.energy,
            "lambda_N": e.lambda_n,
        }),
        g.format,
    )
}

pub fn mesh_export(g: &Global, path: &Path, out: &Path) -> Result<()> {
    let x = load(g, path)?;
    let mesh = zeta(&x);
    let mut buf = Vec::new();
    write_vtk(&mesh, &mut buf)?;
    write_atomic(out, &buf)?;
    emit::print(&mesh_summary(&mesh), g.format)
}
