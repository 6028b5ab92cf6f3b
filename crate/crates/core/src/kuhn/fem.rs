//! P1 finite elements on `zeta(X)` with the degrees of freedom at the sites
//! of `X`; every other mesh vertex is clamped to zero.

use super::{factorial, KuhnMesh};
use crate::error::Result;
use crate::function::LatticeFunction;
use crate::spectral::{smallest_generalized, SolverOptions, SparseSymmetric};

/// Stiffness and mass matrices; row `r` is `mesh.sites().sites()[r]`.
#[derive(Clone, Debug)]
pub struct FemMatrices {
    pub stiffness: SparseSymmetric,
    pub mass: SparseSymmetric,
}

/// Gradient of the hat function of vertex `m` on `T_pi(z)` as signed axes:
/// `+e_{pi(m-1)}` (m >= 1) and `-e_{pi(m)}` (m < d).
fn hat_gradient(perm: &[u8], m: usize) -> [(Option<u8>, f64); 2] {
    let d = perm.len();
    [
        (if m >= 1 { Some(perm[m - 1]) } else { None }, 1.0),
        (if m < d { Some(perm[m]) } else { None }, -1.0),
    ]
}

fn hat_dot(perm: &[u8], a: usize, b: usize) -> f64 {
    let ga = hat_gradient(perm, a);
    let gb = hat_gradient(perm, b);
    let mut s = 0.0;
    for (ax, va) in ga {
        for (bx, vb) in gb {
            if let (Some(x), Some(y)) = (ax, bx) {
                if x == y {
                    s += va * vb;
                }
            }
        }
    }
    s
}

pub fn assemble_fem(mesh: &KuhnMesh) -> FemMatrices {
    let d = mesh.dim();
    let vol = 1.0 / factorial(d) as f64;
    let mass_unit = vol / ((d + 1) as f64 * (d + 2) as f64);
    let x = mesh.sites();
    let mut k_entries = Vec::new();
    let mut m_entries = Vec::new();
    for s in mesh.simplices() {
        let dofs: Vec<(usize, usize)> = s
            .vertices()
            .iter()
            .enumerate()
            .filter_map(|(m, w)| x.index_of(w).map(|r| (m, r)))
            .collect();
        for (i, &(ma, ra)) in dofs.iter().enumerate() {
            for &(mb, rb) in &dofs[..=i] {
                let k = vol * hat_dot(&s.perm, ma, mb);
                if k != 0.0 {
                    k_entries.push((ra, rb, k));
                }
                m_entries.push((ra, rb, if ma == mb { 2.0 * mass_unit } else { mass_unit }));
            }
        }
    }
    FemMatrices {
        stiffness: SparseSymmetric::from_triangle_entries(x.len(), k_entries),
        mass: SparseSymmetric::from_triangle_entries(x.len(), m_entries),
    }
}

#[derive(Clone, Debug)]
pub struct FemResult {
    /// Smallest eigenvalue of `K v = mu M v`; an upper bound for the first
    /// Dirichlet eigenvalue of `zeta(X)`.
    pub mu: f64,
    /// Nodal values with `int u_hat^2 = 1`.
    pub coefficients: LatticeFunction,
    pub iterations: usize,
    pub residual: f64,
}

pub fn fem_first_eigenvalue(mesh: &KuhnMesh, tol: f64) -> Result<FemResult> {
    fem_first_eigenvalue_warm(mesh, tol, None)
}

/// As [`fem_first_eigenvalue`], starting from `warm` (e.g. the discrete
/// eigenfunction).
pub fn fem_first_eigenvalue_warm(mesh: &KuhnMesh, tol: f64, warm: Option<&LatticeFunction>) -> Result<FemResult> {
    let FemMatrices { stiffness, mass } = assemble_fem(mesh);
    let start: Option<Vec<f64>> = warm.map(|w| mesh.sites().iter().map(|p| w.get(p)).collect());
    let e = smallest_generalized(&stiffness, Some(&mass), SolverOptions::with_tol(tol), start.as_deref())?;
    Ok(FemResult {
        mu: e.value,
        coefficients: LatticeFunction::on_config(mesh.sites(), &e.vector),
        iterations: e.iterations,
        residual: e.residual,
    })
}
