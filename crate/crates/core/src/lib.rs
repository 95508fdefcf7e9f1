//! Numeric workbench for generalized Yang Poisson models on a canonical
//! phase space.
//!
//! Deformed generators are realized as [`ScalarField`]s over the canonical
//! coordinates `(x_μ, p_μ)`. Poisson brackets are evaluated with nested
//! forward-mode [`Jet`]s, so bracket residuals sit at rounding level and
//! brackets of brackets stay exact. On top of that sit relation sets with
//! randomized residual sweeps, the seven-equation ansatz system, Hamiltonian
//! flows (rotation flows, the `G` automorphism, truncated BCH composition)
//! and the deformed harmonic oscillator.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and thread pools live in the companion `ypl` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod ansatz;
pub mod bracket;
pub mod dynamics;
mod error;
pub mod field;
pub mod flows;
pub mod jet;
pub mod ode;
pub mod phase;
pub mod realizations;
pub mod sample;

pub use error::{DomainError, Error, Result};
pub use field::ScalarField;
pub use jet::Jet;
pub use phase::{minkowski_dot, Metric, ModelCase, ModelParams, PhasePoint, Sign};
