//! Numerical laboratory for partially hyperbolic endomorphisms of the
//! 2-torus.
//!
//! * [`torus_map`]: maps `f = A + trigonometric perturbation`, lifts, exact
//!   Jacobians, linearization and the homology normal form.
//! * [`cone_analysis`]: cone invariance, expansion constants, the center line
//!   field and the absolute/pointwise domination verdict.
//! * [`semiconjugacy`]: the Franks contraction on x-periodic functions of the
//!   strip and its fixed point `H = P + u` with `H∘F = ℓH`.
//! * [`coherence_lab`]: center-curve integration, invariant-circle hunting,
//!   degree/Jacobian identities and the length-vs-area growth experiment.

// `!(x > 0.0)` style checks are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod coherence_lab;
pub mod cone_analysis;
pub mod config;
pub mod error;
pub mod report;
pub mod rng;
pub mod semiconjugacy;
pub mod torus_map;

pub use error::{Error, Result};
