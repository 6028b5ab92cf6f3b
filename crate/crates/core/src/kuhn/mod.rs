//! Kuhn (Freudenthal) triangulation of `R^d` and the continuum extension
//! `zeta(X)` of a configuration.
//!
//! `T_pi(z)` is the simplex with vertices `w_0 = z`, `w_k = w_{k-1} + e_{pi(k)}`;
//! it is `{z + y : 1 >= y_{pi(1)} >= ... >= y_{pi(d)} >= 0}` and has volume
//! `1/d!`. Permutations are stored 0-based.

mod export;
mod fem;
mod interp;

pub use export::{mesh_summary, write_vtk, MeshSummary};
pub use fem::{assemble_fem, fem_first_eigenvalue, fem_first_eigenvalue_warm, FemMatrices, FemResult};
pub use interp::{interpolate, mass_norm, stiffness_energy, AffineInterpolant};

use std::collections::HashSet;

use itertools::Itertools;
use smallvec::SmallVec;

use crate::lattice::{perimeter, Config, Site};

/// `d!`.
pub fn factorial(d: usize) -> usize {
    (1..=d).product()
}

/// All permutations of `0..d` in lexicographic order.
pub fn permutations(d: usize) -> Vec<SmallVec<[u8; 4]>> {
    (0..d as u8).permutations(d).map(SmallVec::from_vec).collect()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct KuhnSimplex {
    pub base: Site,
    pub perm: SmallVec<[u8; 4]>,
}

impl KuhnSimplex {
    pub fn new(base: Site, perm: &[u8]) -> Self {
        debug_assert_eq!(base.dim(), perm.len());
        KuhnSimplex {
            base,
            perm: SmallVec::from_slice(perm),
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn volume(&self) -> f64 {
        1.0 / factorial(self.dim()) as f64
    }

    /// `w_0, ..., w_d`.
    pub fn vertices(&self) -> Vec<Site> {
        let mut out = Vec::with_capacity(self.dim() + 1);
        let mut w = self.base.clone();
        out.push(w.clone());
        for &k in &self.perm {
            w = w.offset(k as usize, 1);
            out.push(w.clone());
        }
        out
    }

    /// Barycentric coordinates of `x` (which lies in the simplex iff all are
    /// in `[0, 1]`).
    pub fn barycentric(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(self.base.coords()).map(|(a, b)| a - *b as f64).collect();
        let d = self.dim();
        let mut out = Vec::with_capacity(d + 1);
        out.push(1.0 - y[self.perm[0] as usize]);
        for k in 1..d {
            out.push(y[self.perm[k - 1] as usize] - y[self.perm[k] as usize]);
        }
        out.push(y[self.perm[d - 1] as usize]);
        out
    }

    pub fn contains(&self, x: &[f64], eps: f64) -> bool {
        self.barycentric(x).iter().all(|&l| l >= -eps && l <= 1.0 + eps)
    }

    /// Position of `p` among the vertices.
    pub fn vertex_index(&self, p: &Site) -> Option<usize> {
        self.vertices().iter().position(|w| w == p)
    }
}

/// The `(d+1)!` simplices having `i` as a vertex.
pub fn simplices_at_vertex(i: &Site) -> Vec<KuhnSimplex> {
    let d = i.dim();
    let mut out = Vec::with_capacity(factorial(d + 1));
    for perm in permutations(d) {
        // i = w_m
        let mut z = i.clone();
        out.push(KuhnSimplex::new(z.clone(), &perm));
        for &k in &perm {
            z = z.offset(k as usize, -1);
            out.push(KuhnSimplex::new(z.clone(), &perm));
        }
    }
    out
}

/// The `d!` simplices having the segment `[i, i + e_axis]` as an edge.
pub fn simplices_at_edge(i: &Site, axis: usize) -> Vec<KuhnSimplex> {
    permutations(i.dim())
        .into_iter()
        .map(|perm| {
            let m = perm.iter().position(|&k| k as usize == axis).expect("axis in range");
            let mut z = i.clone();
            for &k in &perm[..m] {
                z = z.offset(k as usize, -1);
            }
            KuhnSimplex::new(z, &perm)
        })
        .collect()
}

/// The simplex containing `x`: `z = floor(x)`, `pi` sorts the fractional
/// parts in decreasing order, ties by axis index.
pub fn locate(x: &[f64]) -> KuhnSimplex {
    let z: Vec<i32> = x.iter().map(|c| c.floor() as i32).collect();
    let frac: Vec<f64> = x.iter().zip(&z).map(|(c, f)| c - *f as f64).collect();
    let mut perm: Vec<u8> = (0..x.len() as u8).collect();
    perm.sort_by(|&a, &b| frac[b as usize].total_cmp(&frac[a as usize]).then(a.cmp(&b)));
    KuhnSimplex::new(Site::from(z), &perm)
}

/// `zeta(X)`: the union of all simplices touching a site of `X`.
#[derive(Clone, Debug)]
pub struct KuhnMesh {
    sites: Config,
    simplices: Vec<KuhnSimplex>,
}

pub fn zeta(x: &Config) -> KuhnMesh {
    let mut set: HashSet<KuhnSimplex> = HashSet::with_capacity(x.len() * factorial(x.dim()) * 2);
    for p in x.iter() {
        set.extend(simplices_at_vertex(p));
    }
    let mut simplices: Vec<KuhnSimplex> = set.into_iter().collect();
    simplices.sort_unstable();
    KuhnMesh {
        sites: x.clone(),
        simplices,
    }
}

impl KuhnMesh {
    pub fn dim(&self) -> usize {
        self.sites.dim()
    }

    /// The configuration whose sites are the free vertices.
    pub fn sites(&self) -> &Config {
        &self.sites
    }

    pub fn simplices(&self) -> &[KuhnSimplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// `|zeta(X)| = #simplices / d!`.
    pub fn measure(&self) -> f64 {
        self.simplices.len() as f64 / factorial(self.dim()) as f64
    }

    /// All mesh vertices, sorted.
    pub fn vertices(&self) -> Vec<Site> {
        let mut set: HashSet<Site> = HashSet::new();
        for s in &self.simplices {
            set.extend(s.vertices());
        }
        let mut v: Vec<Site> = set.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Whether each vertex of `vertices()` is clamped to zero (not in `X`).
    pub fn dirichlet_mask(&self) -> Vec<bool> {
        self.vertices().iter().map(|v| !self.sites.contains(v)).collect()
    }

    /// `(|zeta(X)| - N) / P(X)`, the constant in `|zeta(X)| <= N + C N^{(d-1)/d} P_N(X)`.
    pub fn measure_excess_constant(&self) -> f64 {
        (self.measure() - self.sites.len() as f64) / perimeter(&self.sites) as f64
    }
}
