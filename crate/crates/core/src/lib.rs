//! Design toolkit for minimal pulse-sequence CZ gates on a pair of
//! dipole-blockaded qubits driven by shared laser fields.
//!
//! The blockade splits the two-qubit dynamics into three independent
//! blocks, each propagated in closed form from a pulse's area, spatial
//! coefficients, and phase ([`gate`]). Gate quality is a single scalar of
//! the three block diagonals ([`mod@fidelity`]). Optimal working points come
//! from approximate integer relations between the generalized pulse areas
//! ([`dioph`]); physical beam amplitudes realizing a working point come
//! from a small linear solve over the beam overlap matrix ([`beams`]).
//! Shot-to-shot robustness is estimated by a deterministic, counter-based
//! Monte Carlo ([`noise`]), and parameter maps, reports, and the built-in
//! verification suite live in [`grid`], [`report`], and [`verify`].

pub mod beams;
pub mod dioph;
pub mod error;
pub mod fidelity;
pub mod gate;
pub mod grid;
pub mod mat;
pub mod noise;
pub mod optimize;
pub mod oracle;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use fidelity::{fidelity, fidelity_magnitude, fidelity_single, FidelityValue};
pub use gate::{compose, propagator_single, Pulse, PropagatorSet, PulseSequence, StructuralVector, Subsystem};
