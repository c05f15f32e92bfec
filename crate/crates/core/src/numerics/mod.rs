//! Dense linear algebra and seeded randomness. Everything is `f64`.

mod eigen;
mod matrix;
mod rng;

pub use eigen::{cholesky, solve_spd, sym_eig, SymEigen, SYMMETRY_TOL};
pub use matrix::{dot, pairwise_sq_dists, sq_dist, Matrix};
pub use rng::Rng;
