//! Dissociate a trapped diatomic molecule into a path-entangled atom pair.
//!
//! A molecule held in a quasi-1D waveguide is broken apart by sweeping a
//! magnetic field across the zero crossing of its contact interaction. The
//! two atoms fly apart back-to-back, and momentum correlation between them
//! becomes path entanglement between the left and right guides. This crate
//! simulates the whole chain:
//!
//! * [`feshbach`] — magnetic field → 3D scattering length → effective 1D
//!   contact coupling, plus the sweep schedule `B(t)`.
//! * [`grid`] — the relative-coordinate wavefunction on a uniform grid,
//!   its norm, spread, and momentum distribution.
//! * [`propagate`] — time-dependent Schrödinger evolution with a
//!   Crank-Nicolson kernel (default) and a split-step Fourier cross-check.
//! * [`correlations`] — analytic center-of-mass packet, side-resolved
//!   two-atom detection probabilities, and the entanglement fidelity
//!   `F = 1/(1+kappa)`.
//! * [`optics`] — exact amplitude tables for beam splitters, phase
//!   shifters, RF pulses, and coincidence fringes.
//! * [`harness`] — config parsing, scenario runners, deterministic CSV
//!   output, and the validation report.
//!
//! The primary interface is the `examples/` directory — one runnable
//! program per capability:
//!
//! | example               | what it shows                                      |
//! |-----------------------|----------------------------------------------------|
//! | `sweep_model`         | a(B), a_1D, g_1D along the default field ramp      |
//! | `bound_state`         | initial bound state, energy, momentum distribution |
//! | `dissociation`        | full 13 ms dissociation run with snapshots         |
//! | `fidelity_surface`    | fidelity over sweep rate × packet width            |
//! | `fringe_scan`         | coincidence fringes, entangled vs. dephased        |
//! | `spin_entanglement`   | RF pulses, singlet invariance, spin⊗path states    |
//! | `validation`          | the full analytic-oracle check report              |
//!
//! Run one with `cargo run --release --example dissociation`.
//!
//! A thin CLI (`pairwave simulate | fidelity-surface | fringe-scan |
//! validate`) wraps the same runners for scripted use.
//!
//! Units: SI internally (m, s, kg, J), magnetic fields in gauss throughout
//! (only field ratios enter the physics). Interfaces accept lab units —
//! micrometers, milliseconds, G/ms, kHz — see [`units`].

pub mod constants;
pub mod correlations;
pub mod error;
pub mod feshbach;
pub mod grid;
pub mod harness;
pub mod optics;
pub mod propagate;
pub mod units;

pub use error::{Error, Result};
