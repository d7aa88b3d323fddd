//! Exact desk-scale simulator contrasting classical thermalization with
//! quantum annealing on a degenerate 8-spin Ising instance.
//!
//! The library reproduces, by dense numerics on the full `2^8` state space,
//! the dynamical signature that separates the two kinds of annealing: a
//! classical single-spin-flip thermal process ends with the isolated ground
//! state at least as populated as the average cluster state (`p_s ≥ p_C`),
//! while weak-coupling open-system quantum annealing suppresses it
//! (`p_s < p_C`). See the `guide` module (also rendered as an mdbook under
//! `book/`) for a walk-through.

pub mod entanglement;
pub mod error;
pub mod guide;
pub mod harness;
pub mod ising;
pub mod perturbation;
pub mod quantum;
pub mod sa;

pub use error::{Error, Result};
