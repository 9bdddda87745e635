use thiserror::Error;

/// Errors raised by the simulation routines.
///
/// Variants map to failure classes rather than call sites: callers can
/// distinguish bad inputs (caller bug / bad config) from numeric conditions
/// encountered mid-computation (poles, band edges, step underflow).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates a precondition (non-finite, out of range,
    /// inconsistent detunings, malformed grid, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A formula was evaluated outside its domain (vanishing denominator).
    #[error("division domain error: {0}")]
    DivisionDomain(String),

    /// The adaptive integrator could not proceed without shrinking the step
    /// below the minimum. Carries the last time it reached successfully.
    #[error("integration failure: step size underflow at t = {last_t}")]
    IntegrationFailure { last_t: f64 },

    /// The scattering denominator vanished (resonant divergence).
    #[error("scattering pole: |D| = {magnitude} below threshold")]
    Pole { magnitude: f64 },

    /// Group velocity vanishes at the band edge; flows are undefined there.
    #[error("band edge: |sin k| = {sin_k} below threshold")]
    BandEdge { sin_k: f64 },

    /// The requested energy lies outside the propagation band.
    #[error("out of band: |cos k| = {cos_k} exceeds 1")]
    OutOfBand { cos_k: f64 },

    /// The half-maximum equation has no root in (0, 1].
    #[error("no half-maximum crossing for eta = {eta}")]
    NoHalfMax { eta: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
