//! Numerical fractional calculus on a uniform grid.
//!
//! The crate implements a family of fractional differintegral operators —
//! Grünwald–Letnikov ([`gl`]), Riemann–Liouville and Caputo ([`rl_caputo`]),
//! a Laplace-domain derivative with numerical transform inversion
//! ([`laplace`]), and an absolute-value based first-order operator with its
//! fractional generalization ([`ell1`]) — together with the special-function
//! machinery they share ([`special`]) and a fractional gradient-descent
//! harness ([`frac_gd`]).
//!
//! Results are [`DistributionalSignal`]s: a pointwise regular part sampled on
//! a [`Grid`] plus a finite list of symbolic Dirac terms. Operators that are
//! mathematically equivalent are implemented over independent evaluation
//! paths so they can be cross-checked; the [`validation`] module bundles
//! those cross-checks into named suites.

pub mod ell1;
pub mod error;
pub mod expr;
pub mod frac_gd;
pub mod gl;
pub mod io;
pub mod laplace;
pub mod rl_caputo;
pub mod special;
pub mod types;
pub mod validation;

pub use error::{Error, Result};
pub use expr::ExprAst;
pub use types::{DiracTerm, DistributionalSignal, FracOrder, Grid, SignalSource};
