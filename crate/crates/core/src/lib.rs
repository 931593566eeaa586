//! Determinants of truncated Wiener-Hopf+Hankel and Toeplitz+Hankel operators
//! whose symbol is piecewise constant with two jumps.
//!
//! The crate computes the same quantity along three routes:
//!
//! * finite Toeplitz+Hankel matrices built from closed-form Fourier
//!   coefficients ([`toeplitz_hankel`]),
//! * Nyström discretizations of the Fredholm determinants of the even-sine
//!   kernel and of the regularized / limit kernels on `(-1, 1)` ([`fredholm`]),
//! * Monte Carlo counting statistics of the β=2 Laguerre ensemble at the hard
//!   edge ([`rmt`]).
//!
//! The remaining modules provide the numerical plumbing: special functions and
//! quadrature ([`special`]), dense complex linear algebra ([`linalg`]), the
//! symbols and their Wiener-Hopf factors ([`symbols`]) and the Laguerre-basis
//! matrix elements that relate line and circle symbols ([`laguerre_map`]).

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops mirror the textbook formulation of the dense kernels
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod fredholm;
pub mod laguerre_map;
pub mod linalg;
pub mod rmt;
pub mod special;
pub mod symbols;
pub mod toeplitz_hankel;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
