//! First Dirichlet eigenvalues of the combinatorial Laplacian on finite
//! subsets of `Z^d`, and the machinery around them:
//!
//! - [`lattice`]: configurations, perimeter, connectivity, direction
//!   convexity, polyomino/polycube enumeration.
//! - [`spectral`]: Dirichlet Laplacian assembly and the scaled eigenvalue
//!   `lambda_N(X) = N^{2/d} mu_min`.
//! - [`rearrange`]: discrete symmetric decreasing rearrangements and Riesz
//!   sums.
//! - [`kuhn`]: Kuhn triangulation, the continuum extension `zeta(X)`,
//!   piecewise-affine interpolation and exact P1 forms.
//! - [`fluct`]: asymmetry functionals, the Faber-Krahn deficit and the
//!   fluctuation sweep.
//! - [`optimize`]: exact and local-search minimizers.

pub mod error;
pub mod function;
pub mod io;
pub mod kuhn;
pub mod lattice;
pub mod optimize;
pub mod rearrange;
pub mod spectral;
pub mod fluct;

pub use error::{Error, Result};
pub use function::LatticeFunction;
pub use lattice::{Config, Direction, Site};
