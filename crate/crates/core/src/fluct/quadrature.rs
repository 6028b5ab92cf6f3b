//! `|zeta(X) Δ B_r(z)|` with a certified error bound.
//!
//! Each mesh simplex is bracketed: the ball is convex, so a simplex whose
//! vertices are all inside lies inside. For a straddling piece, the distance
//! `g(x) = r - |x - z|` is concave, hence above its affine interpolant on the
//! piece (lower bound), and the ball lies in the half-space below the tangent
//! plane at the sphere point nearest the piece centroid (upper bound). Both
//! bounds are volumes of a simplex cut by a half-space, which are exact.
//! Pieces are bisected along their longest edge, widest bracket first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use super::super::kuhn::KuhnMesh;
use crate::error::{Error, Result};
use crate::lattice::unit_ball_volume;

pub const MAX_DEPTH: usize = 24;

/// Refinement cap per mesh simplex.
pub const MAX_PIECES: usize = 1 << 14;

/// Default tolerance: `1e-6 |zeta(X)|`.
pub fn default_tolerance(mesh: &KuhnMesh) -> f64 {
    1e-6 * mesh.measure()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// `|value - exact| <= error_bound`.
    pub error_bound: f64,
    /// False when some simplex hit `MAX_DEPTH` or `MAX_PIECES` before its
    /// bracket met the tolerance; `error_bound` is then the achieved bracket.
    pub converged: bool,
    pub pieces: usize,
}

type Point = [f64; 3];

#[derive(Clone, Copy)]
struct Piece {
    verts: [Point; 4],
    depth: usize,
    lo: f64,
    hi: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.hi - self.lo).total_cmp(&(other.hi - other.lo))
    }
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

fn lerp(a: &Point, b: &Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
}

fn simplex_volume(v: &[Point], d: usize) -> f64 {
    let e: Vec<Point> = (1..=d).map(|k| sub(&v[k], &v[0])).collect();
    let det = match d {
        1 => e[0][0],
        2 => e[0][0] * e[1][1] - e[0][1] * e[1][0],
        3 => {
            e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
        }
        _ => unreachable!("quadrature supports d <= 3"),
    };
    det.abs() / [1.0, 1.0, 2.0, 6.0][d]
}

/// Volume of `{a >= 0}` inside the simplex, where `a` is affine with values
/// `vals` at the vertices.
fn cut_volume(v: &[Point], vals: &[f64], d: usize) -> f64 {
    let inside: Vec<usize> = (0..=d).filter(|&k| vals[k] >= 0.0).collect();
    let outside: Vec<usize> = (0..=d).filter(|&k| vals[k] < 0.0).collect();
    let vol = simplex_volume(v, d);
    // fraction of the edge from an inside vertex p to an outside vertex q
    let t = |p: usize, q: usize| vals[p] / (vals[p] - vals[q]);
    match inside.len() {
        0 => 0.0,
        k if k == d + 1 => vol,
        1 => {
            let p = inside[0];
            vol * outside.iter().map(|&q| t(p, q)).product::<f64>()
        }
        k if k == d => {
            let q = outside[0];
            vol * (1.0 - inside.iter().map(|&p| 1.0 - t(p, q)).product::<f64>())
        }
        _ => {
            // d = 3, two in and two out: a prism with triangular ends at p1, p2
            let (p1, p2) = (inside[0], inside[1]);
            let (q1, q2) = (outside[0], outside[1]);
            let m = |p: usize, q: usize| lerp(&v[p], &v[q], t(p, q));
            let a = [v[p1], m(p1, q1), m(p1, q2)];
            let b = [v[p2], m(p2, q1), m(p2, q2)];
            simplex_volume(&[a[0], a[1], a[2], b[0]], 3)
                + simplex_volume(&[a[1], a[2], b[0], b[1]], 3)
                + simplex_volume(&[a[2], b[0], b[1], b[2]], 3)
        }
    }
}

/// Bracket `[lo, hi]` for `|piece ∩ B_r(z)|`.
fn bracket(v: &[Point], d: usize, z: &Point, r: f64) -> (f64, f64) {
    let vol = simplex_volume(v, d);
    let dist: Vec<f64> = v[..=d].iter().map(|p| norm(&sub(p, z))).collect();
    if dist.iter().all(|&s| s <= r) {
        return (vol, vol);
    }
    let mut c = [0.0; 3];
    for p in &v[..=d] {
        for k in 0..3 {
            c[k] += p[k] / (d + 1) as f64;
        }
    }
    let rho = v[..=d].iter().map(|p| norm(&sub(p, &c))).fold(0.0, f64::max);
    let cz = sub(&c, z);
    let dc = norm(&cz);
    if dc - rho >= r {
        return (0.0, 0.0);
    }
    let secant: Vec<f64> = dist.iter().map(|s| r - s).collect();
    let lo = cut_volume(v, &secant, d);
    let hi = if dc == 0.0 {
        vol
    } else {
        let n = [cz[0] / dc, cz[1] / dc, cz[2] / dc];
        let tangent: Vec<f64> = v[..=d].iter().map(|p| r - dot(&sub(p, z), &n)).collect();
        cut_volume(v, &tangent, d)
    };
    (lo.min(hi), hi.max(lo))
}

fn bisect(v: &[Point; 4], d: usize) -> ([Point; 4], [Point; 4]) {
    let mut best = (0, 1, -1.0);
    for i in 0..=d {
        for j in i + 1..=d {
            let l = norm(&sub(&v[i], &v[j]));
            if l > best.2 {
                best = (i, j, l);
            }
        }
    }
    let mid = lerp(&v[best.0], &v[best.1], 0.5);
    let (mut a, mut b) = (*v, *v);
    a[best.1] = mid;
    b[best.0] = mid;
    (a, b)
}

/// `|T ∩ B_r(z)|` bracketed to a width of at most `budget`, refining the
/// widest piece first.
fn intersect_simplex(verts: [Point; 4], d: usize, z: &Point, r: f64, budget: f64) -> (f64, f64, bool, usize) {
    let (lo, hi) = bracket(&verts, d, z, r);
    if hi <= lo {
        return (lo, hi, true, 1);
    }
    let mut open = BinaryHeap::new();
    open.push(Piece { verts, depth: 0, lo, hi });
    // pieces with an exact value or at the depth limit
    let (mut settled_lo, mut settled_hi) = (0.0, 0.0);
    let mut width = hi - lo;
    let mut pieces = 1;
    let mut converged = true;
    while width > budget {
        if pieces >= MAX_PIECES {
            converged = false;
            break;
        }
        let Some(p) = open.pop() else { break };
        width -= p.hi - p.lo;
        if p.depth >= MAX_DEPTH {
            converged = false;
            settled_lo += p.lo;
            settled_hi += p.hi;
            width += p.hi - p.lo;
            continue;
        }
        let (a, b) = bisect(&p.verts, d);
        for child in [a, b] {
            let (l, h) = bracket(&child, d, z, r);
            pieces += 1;
            if h > l {
                width += h - l;
                open.push(Piece { verts: child, depth: p.depth + 1, lo: l, hi: h });
            } else {
                settled_lo += l;
                settled_hi += h;
            }
        }
    }
    let lo = settled_lo + open.iter().map(|p| p.lo).sum::<f64>();
    let hi = settled_hi + open.iter().map(|p| p.hi).sum::<f64>();
    (lo, hi, converged, pieces)
}

/// `|zeta(X) ∩ B_r(z)|` with its bracket.
pub fn ball_intersection_volume(mesh: &KuhnMesh, r: f64, z: &[f64], tol: f64) -> Result<QuadratureResult> {
    let d = mesh.dim();
    if d > 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if r.is_nan() || r < 0.0 || z.len() != d {
        return Err(Error::InvalidArgument("ball radius must be nonnegative with a centre in R^d".into()));
    }
    let mut zc = [0.0; 3];
    zc[..d].copy_from_slice(z);
    let budget = tol / mesh.len().max(1) as f64;
    let parts: Vec<(f64, f64, bool, usize)> = mesh
        .simplices()
        .par_iter()
        .map(|s| {
            let mut verts = [[0.0; 3]; 4];
            for (k, w) in s.vertices().iter().enumerate() {
                for (j, c) in w.coords().iter().enumerate() {
                    verts[k][j] = *c as f64;
                }
            }
            intersect_simplex(verts, d, &zc, r, budget)
        })
        .collect();
    let (mut lo, mut hi, mut converged, mut pieces) = (0.0, 0.0, true, 0);
    for (l, h, c, p) in parts {
        lo += l;
        hi += h;
        converged &= c;
        pieces += p;
    }
    Ok(QuadratureResult {
        value: 0.5 * (lo + hi),
        error_bound: 0.5 * (hi - lo),
        converged,
        pieces,
    })
}

/// `|zeta(X) Δ B_r(z)| = |zeta(X)| + |B_r| - 2 |zeta(X) ∩ B_r(z)|`.
pub fn continuum_symmetric_difference(mesh: &KuhnMesh, r: f64, z: &[f64], tol: f64) -> Result<QuadratureResult> {
    // the intersection is bracketed to width tol, so its midpoint is within
    // tol/2 and the difference within tol
    let inter = ball_intersection_volume(mesh, r, z, tol)?;
    let ball = unit_ball_volume(mesh.dim()) * r.powi(mesh.dim() as i32);
    Ok(QuadratureResult {
        value: mesh.measure() + ball - 2.0 * inter.value,
        error_bound: 2.0 * inter.error_bound,
        ..inter
    })
}
