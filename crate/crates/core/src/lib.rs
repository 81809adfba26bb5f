//! Numerical verification kernels for two correlation-type inequalities of
//! symmetric stable and Gaussian random vectors.
//!
//! The crate has two halves:
//!
//! * An exact-and-Monte-Carlo test bench for the product-correlation
//!   inequality `E[f(X_1..X_m) g(X_{m+1}..X_k)] >= E[f] E[g]` for even
//!   continuous positive definite `f`, `g` of jointly q-stable variables
//!   (modules [`lq`], [`stable`], [`posdef`], [`correlation`]). Cosine
//!   polynomials make the expectation a finite sum of characteristic-function
//!   values, so the inequality can be checked to float precision; a generic
//!   Monte Carlo estimator covers the product families (triangle and
//!   stretched-exponential factors).
//!
//! * A numerical analysis of the local-minimum structure of
//!   `B -> mu_B(F x G)` for Gaussian measures with block covariance
//!   `[[A, B], [B^T, C]]` and symmetric convex bodies `F`, `G` (module
//!   [`gaussian`]): the analytic Hessian `L (x) K` at `B = 0`, finite
//!   difference cross-checks with common random numbers, the log-concave
//!   marginal, the `lambda -> 1` limit tying the local statement to the
//!   intersection-measure question, and a stochastic probe of the (open)
//!   global minimum.
//!
//! Shared plumbing lives in [`rng`] (counter-based splittable streams),
//! [`mc`] (merging mean/std-error accumulators), [`linalg`] (small symmetric
//! matrices, Jacobi eigenvalues, Cholesky), [`normal`] (high-accuracy
//! `erf`/`Phi`) and [`quad`] (adaptive quadrature).
//!
//! Every stochastic routine takes an explicit [`rng::RngStream`]; identical
//! `(seed, stream)` inputs reproduce results bit-exactly regardless of the
//! rayon worker count, because samples are partitioned into fixed-size blocks
//! with one substream per block and merged in block order.

pub mod correlation;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod lq;
pub mod mc;
pub mod normal;
pub mod posdef;
pub mod quad;
pub mod rng;
pub mod stable;

pub use error::{Error, Result};
