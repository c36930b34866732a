//! Superoptimal analytic approximation of rational matrix-valued functions
//! on the unit circle.
//!
//! Given a rational `m × n` symbol `G` without poles on the circle, the
//! solver computes the superoptimal singular values `t_0 ≥ t_1 ≥ …` and the
//! unique analytic approximant `AG` for which the sequence of essential
//! suprema of the singular values of `G − AG` is lexicographically minimal.
//!
//! The construction runs a level recursion on pointwise exterior powers:
//! level 0 is the Hankel operator of `G`; level `j` is an operator between
//! wedge subspaces `ξ_0 ∧ … ∧ ξ_{j−1} ∧ H²` and `η̄_0 ∧ … ∧ η̄_{j−1} ∧ (H²)^⊥`,
//! whose top Schmidt pair yields the next terms of
//!
//! ```text
//! G − AG = Σ_{i<r} t_i y_i x_i* / |h_i|²
//! ```
//!
//! Only scalar spectral factorizations are needed; no matrix spectral
//! factorization is performed.
//!
//! Modules, bottom-up:
//!
//! - [`fourier`]: circle grids, FFT coefficients, Riesz projections.
//! - [`rational`]: rational symbol input, validation and sampling.
//! - [`linalg`]: dense complex SVD, pivoted Cholesky, least squares.
//! - [`hankel`]: block Hankel matrix and its top Schmidt pair.
//! - [`outer`]: cepstral outer factorization and inner/outer splitting.
//! - [`wedge`]: exterior algebra in lexicographic coordinates.
//! - [`solver`]: the level recursion, the approximant and diagnostics.
//! - [`candidate`]: reading, writing and checking analytic candidates.

pub mod candidate;
pub mod error;
pub mod fourier;
pub mod hankel;
pub mod linalg;
pub mod outer;
pub mod rational;
pub mod solver;
pub mod wedge;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use solver::{run_superopt, SolverConfig, SuperoptResult};
