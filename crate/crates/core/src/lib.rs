//! Nonreciprocal transition dynamics of a driven cyclic three-level system
//! and single-photon scattering between two semi-infinite coupled-resonator
//! waveguides.
//!
//! The crate has two halves. The dynamics half builds the full three-level
//! Hamiltonian (or its adiabatically reduced two-level form), evolves it with
//! a matrix exponential, and sweeps transition probabilities over time and
//! synthetic flux. The scattering half computes the closed-form single-photon
//! scattering matrix of two tight-binding waveguide chains joined by an atom
//! with directional coupling, the flux-normalized flows, the coupling that
//! makes transmission perfect, and the width of the one-way band.
//!
//! Everything is a pure function of immutable inputs; sweep grids evaluate
//! in parallel by default (`parallel` feature) with a sequential fallback,
//! producing identical, ordered output either way.

pub mod cyclic;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod integrate;
pub mod operator;
pub mod scattering;
pub mod text;

pub use cyclic::{
    adiabatic_c_amplitude, adiabatic_eliminate, build_effective_hamiltonian,
    build_full_hamiltonian, CyclicAtomParams, EffectiveTwoLevel, SyntheticFlux,
};
pub use dynamics::{sweep_flux, sweep_time, transition_probabilities, DynamicsPoint, Model, SweepResult};
pub use error::{Error, Result};
pub use integrate::{integrate_linear, DEFAULT_TOL};
pub use operator::{expm, AmplitudeState, Operator, C64};
pub use scattering::{
    boundary_residuals, dispersion, flows_to_csv, half_max_k, half_max_k_numeric, required_jba,
    scattering_flows, scattering_matrix, solve_k, sweep_k, FlowMatrix, FwhmResult, Port,
    ScatteringQuery, ScatteringResult, WaveguideSystem,
};
