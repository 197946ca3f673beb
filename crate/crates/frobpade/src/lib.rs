//! Frobenius–Padé approximants to Markov functions.
//!
//! A Markov function `σ̂(z) = ∫ dσ(t)/(t − z)` is expanded in the orthonormal
//! polynomials of a second measure `μ` whose support is disjoint from that
//! of `σ`. The crate computes the rational approximants `P_{m,n}/Q_{m,n}`
//! defined by the vanishing of the first `m + n + 1` Fourier coefficients of
//! `Q σ̂ − P`, and the potential-theoretic objects that predict their
//! behaviour along ray sequences `n/(n+m) → c`:
//!
//! * [`orthoexp`]: recurrences, Gauss rules, second-kind functions;
//! * [`approximant`]: the linear systems, `R_{m,n}`, `C_{m,n}`, zeros of `Q`;
//! * [`curve`]: the cubic spectral curve and its branches;
//! * [`equilibrium`]: the vector equilibrium pair, potentials, domains;
//! * [`harness`]: experiments comparing approximants with the asymptotics;
//! * [`cli`]: configuration files and the command-line front end.
//!
//! Multiprecision arithmetic (`rug`) is used wherever the approximants are
//! involved; the potential-theoretic side runs in `f64`.

pub mod approximant;
pub mod cli;
pub mod curve;
pub mod equilibrium;
pub mod error;
pub mod harness;
pub mod mp;
pub mod orthoexp;
pub mod quad;

pub use error::{Error, Result};
