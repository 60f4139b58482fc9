//! Noisy statevector simulation of quantum error correction circuits under
//! coefficient-precision gate noise, with control-energy accounting.
//!
//! Every gate is `exp(−i Σ λ_i G_i)`; each `λ_i` is drawn from
//! `N(λ_i, ε²)` per application, and the control energy needed to reach
//! precision ε is bounded below by `(ħω₀/4) Σ λ_i²/ε²`.

pub mod analytics;
pub mod circuit;
pub mod codes;
pub mod error;
pub mod ft;
pub mod gates;
pub mod harness;
pub mod linalg;
pub mod statevector;

pub use error::{Error, Result};
