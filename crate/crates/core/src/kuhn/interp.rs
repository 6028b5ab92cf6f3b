//! Piecewise-affine interpolation on the Kuhn triangulation and its exact
//! P1 integrals.

use super::{locate, zeta, KuhnSimplex};
use crate::function::LatticeFunction;

/// The function affine on every Kuhn simplex with vertex values `u`. It is
/// supported on `zeta(supp u)`.
#[derive(Clone, Debug)]
pub struct AffineInterpolant {
    values: LatticeFunction,
    simplices: Vec<KuhnSimplex>,
}

pub fn interpolate(u: &LatticeFunction) -> AffineInterpolant {
    let values = u.pruned();
    let simplices = match values.support() {
        Some(x) => zeta(&x).simplices().to_vec(),
        None => Vec::new(),
    };
    AffineInterpolant { values, simplices }
}

impl AffineInterpolant {
    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    pub fn simplices(&self) -> &[KuhnSimplex] {
        &self.simplices
    }

    pub fn vertex_values(&self, s: &KuhnSimplex) -> Vec<f64> {
        s.vertices().iter().map(|w| self.values.get(w)).collect()
    }

    /// Constant gradient on `s`: the `pi(k)` component is `u(w_k) - u(w_{k-1})`.
    pub fn gradient(&self, s: &KuhnSimplex) -> Vec<f64> {
        let vals = self.vertex_values(s);
        let mut g = vec![0.0; self.dim()];
        for (k, &axis) in s.perm.iter().enumerate() {
            g[axis as usize] = vals[k + 1] - vals[k];
        }
        g
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let s = locate(x);
        let bary = s.barycentric(x);
        self.vertex_values(&s).iter().zip(&bary).map(|(v, l)| v * l).sum()
    }
}

/// `int |grad u_hat|^2`, exact.
pub fn stiffness_energy(u: &AffineInterpolant) -> f64 {
    u.simplices
        .iter()
        .map(|s| s.volume() * u.gradient(s).iter().map(|g| g * g).sum::<f64>())
        .sum()
}

/// `int u_hat^2`, exact by the P1 mass rule
/// `int_T phi_a phi_b = |T| (1 + delta_ab) / ((d+1)(d+2))`.
pub fn mass_norm(u: &AffineInterpolant) -> f64 {
    let d = u.dim() as f64;
    let c = 1.0 / ((d + 1.0) * (d + 2.0));
    u.simplices
        .iter()
        .map(|s| {
            let vals = u.vertex_values(s);
            let sum: f64 = vals.iter().sum();
            let sq: f64 = vals.iter().map(|v| v * v).sum();
            s.volume() * c * (sum * sum + sq)
        })
        .sum()
}
