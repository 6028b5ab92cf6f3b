//! Dirichlet Laplacian of a configuration and its scaled first eigenvalue.
//!
//! With `N = #X`, minimizing `N^{-(d-2)/d} D(u)` over `u` vanishing off `X`
//! with `(1/N) sum u^2 = 1` is a Rayleigh quotient problem, so
//! `lambda_N(X) = N^{2/d} mu_min` where `mu_min` is the smallest eigenvalue of
//! the Laplacian restricted to `X`.

mod eigen;
mod operator;

pub use eigen::{smallest_eigenpair, smallest_generalized, Eigenpair, SolverOptions, DEFAULT_TOL};
pub use operator::SparseSymmetric;

use serde::Serialize;

use crate::error::Result;
use crate::function::LatticeFunction;
use crate::lattice::{connected_components, Config, Site};

/// Matrix of `D(u)` on functions supported in `X`: `2d` on the diagonal, `-1`
/// for each internal nearest-neighbor pair. Row `r` is `x.sites()[r]`.
pub fn assemble_dirichlet_laplacian(x: &Config) -> SparseSymmetric {
    let d = x.dim();
    let diag = 2.0 * d as f64;
    let entries = x.iter().enumerate().flat_map(|(r, p)| {
        let mut row = vec![(r, r, diag)];
        for k in 0..d {
            if let Some(c) = x.index_of(&p.offset(k, 1)) {
                row.push((c, r, -1.0));
            }
        }
        row
    });
    SparseSymmetric::from_triangle_entries(x.len(), entries.collect::<Vec<_>>())
}

/// First eigenpair of a configuration.
#[derive(Clone, Debug, Serialize)]
pub struct EigenResult {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    #[serde(rename = "lambda_N")]
    pub lambda_n: f64,
    pub mu_min: f64,
    pub gap: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// Normalized to `(1/N) sum u^2 = 1`, nonnegative.
    #[serde(skip)]
    pub eigenfunction: LatticeFunction,
}

/// `N^{2/d}` for `N = #X`.
pub fn eigenvalue_scale(n: usize, d: usize) -> f64 {
    (n as f64).powf(2.0 / d as f64)
}

pub fn lambda_n(x: &Config, tol: f64) -> Result<EigenResult> {
    lambda_n_with(x, SolverOptions::with_tol(tol), None)
}

/// `lambda_N` with an optional warm start (values read at the sites of `X`).
///
/// Disconnected configurations are solved per component; the eigenfunction
/// lives on a component with the smallest eigenvalue and vanishes elsewhere.
pub fn lambda_n_with(x: &Config, opts: SolverOptions, warm: Option<&LatticeFunction>) -> Result<EigenResult> {
    let comps = connected_components(x);
    let (mu, gap, residual, iterations, values) = if comps.len() == 1 {
        let e = solve_connected(x, opts, warm)?;
        let values = e.vector.clone();
        (e.value, e.gap, e.residual, e.iterations, values)
    } else {
        let mut solved = Vec::with_capacity(comps.len());
        for c in &comps {
            solved.push(solve_connected(c, opts, warm)?);
        }
        let best = (0..solved.len())
            .min_by(|&a, &b| solved[a].value.total_cmp(&solved[b].value))
            .expect("at least one component");
        let mu = solved[best].value;
        let second = solved
            .iter()
            .enumerate()
            .map(|(i, e)| if i == best { e.gap.map_or(f64::INFINITY, |g| e.value + g) } else { e.value })
            .fold(f64::INFINITY, f64::min);
        let mut values = vec![0.0; x.len()];
        for (p, v) in comps[best].iter().zip(&solved[best].vector) {
            values[x.index_of(p).expect("component site")] = *v;
        }
        (
            mu,
            second.is_finite().then_some(second - mu),
            solved[best].residual,
            solved.iter().map(|e| e.iterations).sum(),
            values,
        )
    };
    let n = x.len();
    let scale = (n as f64).sqrt() / values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let values: Vec<f64> = values.iter().map(|v| (v * scale).max(0.0)).collect();
    Ok(EigenResult {
        n,
        d: x.dim(),
        lambda_n: eigenvalue_scale(n, x.dim()) * mu,
        mu_min: mu,
        gap,
        residual,
        iterations,
        eigenfunction: LatticeFunction::on_config(x, &values),
    })
}

fn solve_connected(x: &Config, opts: SolverOptions, warm: Option<&LatticeFunction>) -> Result<Eigenpair> {
    let a = assemble_dirichlet_laplacian(x);
    let start: Option<Vec<f64>> = warm.map(|w| x.iter().map(|p| w.get(p)).collect());
    smallest_generalized(&a, None, opts, start.as_deref())
}

/// `E_N(u) = N^{-(d-2)/d} D(u)`.
pub fn scaled_energy(u: &LatticeFunction, n: usize) -> f64 {
    let d = u.dim() as f64;
    (n as f64).powf(-(d - 2.0) / d) * u.dirichlet_energy()
}

/// Scaled Rayleigh quotient `E_N(u) / ((1/N) sum u^2)`; an upper bound for
/// `lambda_N(X)` whenever `u` vanishes off `X` and `#X = n`.
pub fn scaled_rayleigh(u: &LatticeFunction, n: usize) -> f64 {
    scaled_energy(u, n) / (u.sum_squares() / n as f64)
}

/// Cube competitor: `[-k, k]^d` with the largest `k` such that `(2k+1)^d <= N`,
/// padded with sites carrying zero, and the cone profile `C (k - |i|_inf)`.
#[derive(Clone, Debug)]
pub struct CubeCompetitor {
    pub k: usize,
    pub config: Config,
    pub profile: LatticeFunction,
    /// `E_N` of the profile normalized to `sum u^2 = N`.
    pub energy: f64,
}

pub fn cube_competitor_bound(n: usize, d: usize) -> Result<CubeCompetitor> {
    if n == 0 {
        return Err(crate::Error::EmptyConfig);
    }
    if d == 0 {
        return Err(crate::Error::ZeroDimension);
    }
    let mut k = 0usize;
    while (2 * k + 3).pow(d as u32) <= n {
        k += 1;
    }
    let side = 2 * k as i32 + 1;
    let mut sites = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let cube_len = (side as usize).pow(d as u32);
    for idx in 0..cube_len {
        let mut rest = idx;
        let coords: Vec<i32> = (0..d)
            .map(|_| {
                let c = (rest % side as usize) as i32 - k as i32;
                rest /= side as usize;
                c
            })
            .collect();
        let linf = coords.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
        // k = 0 degenerates to the point mass at the origin
        weights.push(if k == 0 { 1.0 } else { (k - linf) as f64 });
        sites.push(Site::from(coords));
    }
    // padding along the first axis, beyond the cube
    for j in 0..n - cube_len {
        let mut c = vec![0; d];
        c[0] = k as i32 + 1 + j as i32;
        sites.push(Site::from(c));
        weights.push(0.0);
    }
    let norm2: f64 = weights.iter().map(|w| w * w).sum();
    let c = (n as f64 / norm2).sqrt();
    let profile = LatticeFunction::from_pairs(d, sites.iter().cloned().zip(weights.iter().map(|w| c * w)))?;
    let config = Config::new(sites)?;
    let energy = scaled_energy(&profile, n);
    log::debug!("cube competitor N={n} d={d} k={k}: E_N = {energy}");
    Ok(CubeCompetitor {
        k,
        config,
        profile,
        energy,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::Direction;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg<const D: usize>(c: &[[i32; D]]) -> Config {
        Config::from_coords(c.iter()).unwrap()
    }

    #[test]
    fn assembly_examples() {
        let single = assemble_dirichlet_laplacian(&cfg(&[[0, 0]]));
        assert_eq!(single.to_dense(), vec![vec![4.0]]);
        let domino = assemble_dirichlet_laplacian(&cfg(&[[0, 0], [1, 0]]));
        assert_eq!(domino.to_dense(), vec![vec![4.0, -1.0], vec![-1.0, 4.0]]);
        let path = assemble_dirichlet_laplacian(&Config::from_coords((1..=4).map(|i| [i])).unwrap());
        let dense = path.to_dense();
        for (i, row) in dense.iter().enumerate() {
            for (j, &entry) in row.iter().enumerate() {
                let expect = if i == j {
                    2.0
                } else if i.abs_diff(j) == 1 {
                    -1.0
                } else {
                    0.0
                };
                assert_eq!(entry, expect);
            }
        }
    }

    #[test]
    fn quadratic_form_is_edge_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=3 {
            for _ in 0..20 {
                let x = random_config(&mut rng, d, 30);
                let vals: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let a = assemble_dirichlet_laplacian(&x);
                let u = LatticeFunction::on_config(&x, &vals);
                let q = a.quadratic_form(&vals);
                assert!((q - u.dirichlet_energy()).abs() <= 1e-12 * q.abs().max(1.0));
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let r = lambda_n(&cfg(&[[0, 0]]), 1e-10).unwrap();
        assert_eq!(r.lambda_n, 4.0);
        let r = lambda_n(&cfg(&[[0, 0], [1, 0]]), 1e-10).unwrap();
        assert!((r.lambda_n - 6.0).abs() < 1e-12);
        let r = lambda_n(&cfg(&[[0], [1], [2]]), 1e-10).unwrap();
        assert!((r.lambda_n - 9.0 * (2.0 - 2f64.sqrt())).abs() < 1e-10);
        assert!((r.lambda_n - 5.27208).abs() < 1e-5);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["N", "d", "lambda_N", "mu_min", "gap", "residual", "iterations"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn eigenfunction_normalization_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=3 {
            for _ in 0..10 {
                let x = random_connected(&mut rng, d, 40);
                let r = lambda_n(&x, 1e-10).unwrap();
                let u = &r.eigenfunction;
                assert!((u.sum_squares() / x.len() as f64 - 1.0).abs() < 1e-12);
                assert!(u.iter().all(|(_, v)| v > 0.0));
                if x.len() > 1 {
                    assert!(r.gap.unwrap() > 1e-8);
                }
                assert!((scaled_rayleigh(u, x.len()) - r.lambda_n).abs() < 1e-8 * r.lambda_n);
            }
        }
    }

    #[test]
    fn disconnected_uses_best_component() {
        // a singleton and a domino far apart: the domino has the smaller mu
        let x = cfg(&[[0, 0], [1, 0], [10, 10]]);
        let r = lambda_n(&x, 1e-10).unwrap();
        assert!((r.mu_min - 3.0).abs() < 1e-12);
        assert_eq!(r.eigenfunction.get(&Site::new(&[10, 10])), 0.0);
        assert!((r.gap.unwrap() - 1.0).abs() < 1e-10);
        // two equal components: eigenvalue is degenerate, gap zero
        let y = cfg(&[[0, 0], [5, 5]]);
        let r = lambda_n(&y, 1e-10).unwrap();
        assert_eq!(r.mu_min, 4.0);
        assert_eq!(r.gap, Some(0.0));
    }

    #[test]
    fn domain_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=3 {
            for _ in 0..20 {
                let y = random_config(&mut rng, d, 40);
                let keep: Vec<Site> = y.iter().filter(|_| rng.random_bool(0.7)).cloned().collect();
                if keep.is_empty() {
                    continue;
                }
                let x = Config::new(keep).unwrap();
                let mx = lambda_n(&x, 1e-10).unwrap().mu_min;
                let my = lambda_n(&y, 1e-10).unwrap().mu_min;
                assert!(my <= mx + 1e-10);
            }
        }
    }

    #[test]
    fn isometry_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = random_connected(&mut rng, 2, 30);
            let l = lambda_n(&x, 1e-11).unwrap().lambda_n;
            let rot = x.map_sites(|p| Site::new(&[-p.coords()[1] + 3, p.coords()[0] - 7])).unwrap();
            let refl = x.map_sites(|p| Site::new(&[p.coords()[0], -p.coords()[1]])).unwrap();
            for y in [rot, refl] {
                let m = lambda_n(&y, 1e-11).unwrap().lambda_n;
                assert!((l - m).abs() <= 1e-10 * l);
            }
        }
    }

    #[test]
    fn cube_competitor_examples() {
        let c = cube_competitor_bound(9, 2).unwrap();
        assert_eq!(c.k, 1);
        assert!((c.profile.get(&Site::new(&[0, 0])) - 3.0).abs() < 1e-14);
        assert!((c.energy - 36.0).abs() < 1e-12);
        assert!(lambda_n(&c.config, 1e-10).unwrap().lambda_n < 36.0);
        let c = cube_competitor_bound(3, 1).unwrap();
        assert_eq!(c.k, 1);
        assert!((c.energy - 18.0).abs() < 1e-12);
        // direct evaluation of the cone profile energy
        for (n, d) in [(10usize, 2usize), (30, 2), (27, 3), (100, 3), (7, 1)] {
            let c = cube_competitor_bound(n, d).unwrap();
            assert_eq!(c.config.len(), n);
            assert!((c.profile.sum_squares() - n as f64).abs() < 1e-9 * n as f64);
            let l = lambda_n(&c.config, 1e-10).unwrap().lambda_n;
            assert!(c.energy >= l - 1e-9);
        }
    }

    #[test]
    fn cube_competitor_bounded_in_two_dimensions() {
        let energies: Vec<f64> = (1..=10_000)
            .step_by(97)
            .map(|n| cube_competitor_bound(n, 2).unwrap().energy)
            .collect();
        let max = energies.iter().cloned().fold(0.0, f64::max);
        assert!(max < 100.0, "max {max}");
    }

    pub(crate) fn random_config(rng: &mut ChaCha8Rng, d: usize, max: usize) -> Config {
        let n = rng.random_range(1..=max);
        let span = 2 * (n as f64).powf(1.0 / d as f64).ceil() as i32 + 1;
        let mut set = std::collections::BTreeSet::new();
        while set.len() < n {
            let c: Vec<i32> = (0..d).map(|_| rng.random_range(0..span)).collect();
            set.insert(c);
        }
        Config::from_coords(set).unwrap()
    }

    pub(crate) fn random_connected(rng: &mut ChaCha8Rng, d: usize, max: usize) -> Config {
        let n = rng.random_range(1..=max);
        let mut sites = vec![Site::origin(d)];
        let mut set: std::collections::HashSet<Site> = sites.iter().cloned().collect();
        while sites.len() < n {
            let base = sites[rng.random_range(0..sites.len())].clone();
            let e = Direction::axis(d, rng.random_range(0..d));
            let step = if rng.random_bool(0.5) { 1 } else { -1 };
            let p = base.add_scaled(&e.vector(), step);
            if set.insert(p.clone()) {
                sites.push(p);
            }
        }
        Config::new(sites).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn variational_upper_bound(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_config(&mut rng, d, 50);
            let l = lambda_n(&x, 1e-10).unwrap().lambda_n;
            for _ in 0..20 {
                let vals: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let u = LatticeFunction::on_config(&x, &vals);
                if u.sum_squares() > 0.0 {
                    prop_assert!(l <= scaled_rayleigh(&u, x.len()) * (1.0 + 1e-10));
                }
            }
        }
    }
}
