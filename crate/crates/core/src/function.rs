//! Finitely supported real functions on `Z^d`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{Config, Site};

/// A real function on `Z^d` given by its values on finitely many sites and
/// zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFunction {
    dim: usize,
    values: BTreeMap<Site, f64>,
}

impl LatticeFunction {
    pub fn zero(dim: usize) -> Self {
        LatticeFunction {
            dim,
            values: BTreeMap::new(),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (Site, f64)>>(dim: usize, pairs: I) -> Result<Self> {
        let mut f = LatticeFunction::zero(dim);
        for (s, v) in pairs {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if f.values.insert(s.clone(), v).is_some() {
                return Err(Error::DuplicateSite(s.to_vec()));
            }
        }
        Ok(f)
    }

    /// Values on the sites of `x`, in site order.
    pub fn on_config(x: &Config, values: &[f64]) -> Self {
        assert_eq!(x.len(), values.len());
        LatticeFunction {
            dim: x.dim(),
            values: x.iter().cloned().zip(values.iter().copied()).collect(),
        }
    }

    pub fn indicator(x: &Config) -> Self {
        LatticeFunction::on_config(x, &vec![1.0; x.len()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, p: &Site) -> f64 {
        self.values.get(p).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, p: Site, v: f64) {
        debug_assert_eq!(p.dim(), self.dim);
        self.values.insert(p, v);
    }

    /// Stored entries in site order (may include explicit zeros).
    pub fn iter(&self) -> impl Iterator<Item = (&Site, f64)> {
        self.values.iter().map(|(s, v)| (s, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sites with a nonzero value, or `None` if there are none.
    pub fn support(&self) -> Option<Config> {
        let sites: Vec<Site> = self
            .values
            .iter()
            .filter(|(_, v)| **v != 0.0)
            .map(|(s, _)| s.clone())
            .collect();
        if sites.is_empty() {
            None
        } else {
            Some(Config::new(sites).expect("distinct map keys"))
        }
    }

    /// Drops explicit zeros.
    pub fn pruned(&self) -> Self {
        LatticeFunction {
            dim: self.dim,
            values: self
                .values
                .iter()
                .filter(|(_, v)| **v != 0.0)
                .map(|(s, v)| (s.clone(), *v))
                .collect(),
        }
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        match self.values.iter().find(|(_, v)| **v < 0.0 || v.is_nan()) {
            Some((s, v)) => Err(Error::NegativeValue {
                site: s.to_vec(),
                value: *v,
            }),
            None => Ok(()),
        }
    }

    pub fn sum_squares(&self) -> f64 {
        self.values.values().map(|v| v * v).sum()
    }

    /// `D(u)`: sum over unordered lattice edges of `|u(i) - u(j)|^2`, with `u`
    /// zero off the stored sites.
    pub fn dirichlet_energy(&self) -> f64 {
        let mut e = 0.0;
        for (p, &u) in &self.values {
            for k in 0..self.dim {
                let up = p.offset(k, 1);
                let diff = u - self.get(&up);
                e += diff * diff;
                if !self.values.contains_key(&p.offset(k, -1)) {
                    e += u * u;
                }
            }
        }
        e
    }

    /// Values sorted ascending, for multiset comparisons.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.values().copied().filter(|v| *v != 0.0).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        LatticeFunction {
            dim: self.dim,
            values: self.values.iter().map(|(s, v)| (s.clone(), f(*v))).collect(),
        }
    }
}
