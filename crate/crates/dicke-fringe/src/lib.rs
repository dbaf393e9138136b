//! Simulator for the resonance fluorescence of two coherently driven,
//! non-interacting two-level atoms.
//!
//! The library computes measurement-conditioned states and first/second-order
//! photon correlations three independent ways — closed form, master-equation
//! regression, and quantum-jump Monte Carlo — and exposes the nonclassical
//! inequality check that distinguishes the quantum predictions from any
//! classical intensity model.
//!
//! # Units and conventions
//!
//! Everything is dimensionless: times in units of `1/γ` (single-atom
//! half-decay rate; the excited-state population decays at `2γ`), drive
//! strength as `Ω/γ` (the Rabi frequency is `2Ω`), and lengths in units of
//! the optical wavelength. Angles are radians throughout.
//!
//! Two fixed basis orderings are used and tagged on every state:
//!
//! * **Product**: `|ee⟩, |eg⟩, |ge⟩, |gg⟩` (atom 1 first).
//! * **Symmetrized**: `|e⟩, |s⟩, |a⟩, |g⟩`, where
//!   `|s⟩, |a⟩ = (e^{−iφ}|eg⟩ ± e^{iφ}|ge⟩)/√2` and `φ = ½ k_L·x₁₂` is the
//!   laser phase difference between the atoms. `|a⟩` is dark with respect to
//!   the drive; the Liouvillian in this basis is independent of `φ`.
//!
//! Detection directions enter only through the fringe phase
//! `δ(r) = (k_L − k_L r̂)·x₁₂`; see [`qcore::delta_phase`].

pub mod cli;
pub mod correlations;
pub mod detection;
pub mod dynamics;
pub mod error;
pub mod qcore;
pub mod suite;
pub mod trajectories;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};
