//! Smallest eigenpair of a sparse symmetric positive definite pencil.
//!
//! Subspace inverse iteration on a block of two vectors with a Rayleigh-Ritz
//! step after every solve. The factorization is computed once per call; the
//! second block vector gives the gap estimate and keeps the iteration honest
//! when the two lowest eigenvalues are close.

use std::sync::Once;

use faer::prelude::*;
use faer::sparse::linalg::solvers::Llt;
use faer::{Mat, Par, Side};

use super::SparseSymmetric;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 5000;

/// Result of a smallest-eigenpair solve.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalized to `v^T B v = 1`, largest entry positive.
    pub vector: Vec<f64>,
    /// Second Ritz value minus the first; `None` for 1x1 problems.
    pub gap: Option<f64>,
    pub iterations: usize,
    /// `|K v - mu B v| / |B v|`.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

static SEQUENTIAL: Once = Once::new();

// Solves are single-threaded; callers parallelize over independent problems.
// This also keeps results bitwise reproducible.
fn sequential_factorization() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(Par::Seq));
}

/// Smallest eigenpair of `A v = mu v`.
pub fn smallest_eigenpair(a: &SparseSymmetric, tol: f64) -> Result<Eigenpair> {
    smallest_generalized(a, None, SolverOptions::with_tol(tol), None)
}

/// Smallest eigenpair of `K v = mu B v` (`B = I` when `None`). `warm`
/// replaces the all-ones first start vector.
pub fn smallest_generalized(
    k: &SparseSymmetric,
    b: Option<&SparseSymmetric>,
    opts: SolverOptions,
    warm: Option<&[f64]>,
) -> Result<Eigenpair> {
    let n = k.dim();
    if n == 0 {
        return Err(Error::EmptyConfig);
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if let Some(b) = b {
        assert_eq!(b.dim(), n, "pencil dimensions differ");
    }
    let bmul = |x: &[f64]| -> Vec<f64> {
        match b {
            Some(b) => b.apply(x),
            None => x.to_vec(),
        }
    };
    if n == 1 {
        let kk = k.get(0, 0);
        let bb = b.map_or(1.0, |b| b.get(0, 0));
        if !(kk > 0.0 && bb > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        return Ok(Eigenpair {
            value: kk / bb,
            vector: vec![1.0 / bb.sqrt()],
            gap: None,
            iterations: 0,
            residual: 0.0,
        });
    }

    let mut block: Vec<Vec<f64>> = vec![
        match warm {
            Some(w) if w.len() == n && w.iter().any(|v| *v != 0.0) => w.to_vec(),
            _ => vec![1.0; n],
        },
        second_start(n, 0),
    ];
    let mut llt: Option<Llt<usize, f64>> = None;
    let mut best_residual = f64::INFINITY;
    for iteration in 0..=opts.max_iterations {
        if iteration > 0 {
            let factor = match &llt {
                Some(f) => f,
                None => {
                    sequential_factorization();
                    llt = Some(k.to_faer().sp_cholesky(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?);
                    llt.as_ref().unwrap()
                }
            };
            let mut rhs = Mat::<f64>::from_fn(n, 2, |_, _| 0.0);
            for (j, col) in block.iter().enumerate() {
                for (i, v) in bmul(col).into_iter().enumerate() {
                    rhs[(i, j)] = v;
                }
            }
            factor.solve_in_place(rhs.as_mut());
            for (j, col) in block.iter_mut().enumerate() {
                for (i, v) in col.iter_mut().enumerate() {
                    *v = rhs[(i, j)];
                }
            }
        }
        b_orthonormalize(&mut block, &bmul, iteration);
        let kblock: Vec<Vec<f64>> = block.iter().map(|c| k.apply(c)).collect();
        let h = [
            [dot(&block[0], &kblock[0]), dot(&block[0], &kblock[1])],
            [dot(&block[1], &kblock[0]), dot(&block[1], &kblock[1])],
        ];
        let (theta, coeffs) = eig2(h);
        let combine = |cols: &[Vec<f64>], c: [f64; 2]| -> Vec<f64> {
            cols[0].iter().zip(&cols[1]).map(|(a, b)| c[0] * a + c[1] * b).collect()
        };
        let x1 = combine(&block, coeffs[0]);
        let kx1 = combine(&kblock, coeffs[0]);
        let bx1 = bmul(&x1);
        let res: f64 = kx1
            .iter()
            .zip(&bx1)
            .map(|(kv, bv)| (kv - theta[0] * bv).powi(2))
            .sum::<f64>()
            .sqrt();
        let residual = res / norm(&bx1);
        best_residual = best_residual.min(residual);
        let x2 = combine(&block, coeffs[1]);
        block = vec![x1, x2];
        if residual <= opts.tol {
            let mut vector = std::mem::take(&mut block[0]);
            normalize_sign(&mut vector);
            return Ok(Eigenpair {
                value: theta[0],
                vector,
                gap: Some(theta[1] - theta[0]),
                iterations: iteration,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual: best_residual,
    })
}

/// Deterministic start vector with no special structure.
fn second_start(n: usize, salt: usize) -> Vec<f64> {
    const PHI: f64 = 0.618_033_988_749_894_9;
    (0..n)
        .map(|i| (((i + 1) as f64 * PHI + salt as f64 * 0.371).fract() - 0.5) + 1e-3 * (i as f64 / n as f64))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two-pass Gram-Schmidt in the `B` inner product. A collapsed second column
/// is replaced by a fresh start vector.
fn b_orthonormalize(block: &mut [Vec<f64>], bmul: &dyn Fn(&[f64]) -> Vec<f64>, salt: usize) {
    let bnorm = |x: &[f64]| dot(x, &bmul(x)).sqrt();
    let n0 = bnorm(&block[0]);
    block[0].iter_mut().for_each(|v| *v /= n0);
    let mut attempt = 0;
    loop {
        let before = bnorm(&block[1]);
        for _ in 0..2 {
            let b0 = bmul(&block[0]);
            let c = dot(&block[1], &b0);
            let (first, second) = block.split_at_mut(1);
            second[0].iter_mut().zip(&first[0]).for_each(|(y, x)| *y -= c * x);
        }
        let after = bnorm(&block[1]);
        if after > 1e-10 * before && after > 0.0 {
            block[1].iter_mut().for_each(|v| *v /= after);
            return;
        }
        attempt += 1;
        block[1] = second_start(block[1].len(), salt + attempt);
    }
}

/// Eigen-decomposition of a symmetric 2x2 matrix, ascending, with unit
/// eigenvectors.
fn eig2(h: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let a = h[0][0];
    let c = h[1][1];
    let b = 0.5 * (h[0][1] + h[1][0]);
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let hi = mean + rad;
    let det = a * c - b * b;
    let lo = if hi > 0.0 && det > 0.0 { det / hi } else { mean - rad };
    let v1 = if b == 0.0 {
        if a <= c {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    } else {
        let p = [lo - c, b];
        let q = [b, lo - a];
        let (pn, qn) = (p[0].hypot(p[1]), q[0].hypot(q[1]));
        if pn >= qn {
            [p[0] / pn, p[1] / pn]
        } else {
            [q[0] / qn, q[1] / qn]
        }
    };
    ([lo, hi], [v1, [-v1[1], v1[0]]])
}

/// Flips the sign so the largest-magnitude entry is positive.
fn normalize_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
