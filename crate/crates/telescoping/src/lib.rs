//! Telescoping discrete probability laws and the permutation statistics
//! they arise from.
//!
//! A telescoping law is a distribution on consecutive integers whose tail
//! probabilities q(x) = P(X ≥ x) have a simple closed form, so that the mass
//! function telescopes: f(x) = q(x) − q(x+1). Three concrete families live
//! here, each tied to an exact permutation statistic:
//!
//! * the inverse law q(x) = 1/x, the limit of the largest unicyclic
//!   reduction of a uniform random permutation;
//! * the telescoping Poisson family q(x) = θ^x/x!, the limit of the first
//!   ascent position, with the uniform case at θ = 1;
//! * the telescoping geometric family q(x) = ((θ−1)x + 1)/θ^x, the limit of
//!   the first ascent over 123-avoiding permutations at θ = 2.
//!
//! The crate is organized around verification: `perm` and `catalan` provide
//! exact enumeration oracles, `finite` the exact finite-n laws, `law` the
//! limiting families, `sample`/`inference` simulation and estimation, and
//! `verify` the reports that tie them all together. The `telescope` binary
//! exposes the same reports on the command line.

// Negated float comparisons (`!(x > 0.0)`) are deliberate NaN guards, and
// 1-based statistics index their histograms by value; both lints fight that.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod catalan;
pub mod error;
pub mod finite;
pub mod inference;
pub mod law;
pub mod perm;
pub mod sample;
pub mod verify;

pub use error::{Error, Result};
pub use law::TelescopingLaw;
pub use perm::Permutation;
