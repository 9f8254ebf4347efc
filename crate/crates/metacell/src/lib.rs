//! Meta distributions of SIR/SNR and data rate for a two-tier hybrid
//! sub-6GHz/mm-wave cellular network.
//!
//! A *meta distribution* answers "what fraction of links achieve reliability
//! at least x?": it is the CCDF, across realizations of the base-station
//! point processes, of the conditional success probability (CSP) — the
//! link success probability with fading averaged out but the geometry held
//! fixed.
//!
//! The network model is a two-tier deployment: macro base stations (MBSs)
//! on the sub-6GHz band and small base stations (SBSs) serving devices over
//! directional mm-wave links, wirelessly backhauled to MBSs. A device is
//! either served directly by an MBS (interference-limited SIR link) or by a
//! dual-hop MBS -> SBS -> device path whose access hop is a noise-limited
//! mm-wave SNR link with Nakagami-m fading and LOS-ball blockage.
//!
//! Two independent computation paths are provided and cross-validated:
//!
//! * **Analytic** ([`moments`], [`metadist`]): closed-form/quadrature
//!   expressions for the complex-order moments `M_b = E[CSP^b]` of the CSP,
//!   inverted into distribution curves either exactly (Gil-Pelaez inversion
//!   of the imaginary moments) or through a two-moment Beta approximation.
//! * **Monte Carlo** ([`mcsim`]): samples Poisson point process
//!   realizations, performs biased association, and evaluates each
//!   realization's CSP in closed form (fading integrated analytically),
//!   yielding empirical meta distributions and moments with standard errors.
//!
//! The [`cli`] module (and the `metacell` binary) exposes experiment
//! runners over both paths; the `examples/` directory demonstrates each
//! major capability.

pub mod assoc;
pub mod cli;
pub mod mcsim;
pub mod metadist;
pub mod model;
pub mod moments;
pub mod quad;
pub mod specfun;

use thiserror::Error;

/// Unified error type for the library surface.
#[derive(Debug, Error)]
pub enum MetaError {
    /// A series or transformation failed to reach the requested tolerance.
    #[error("{what}: no convergence within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
    /// Adaptive quadrature could not reach its target accuracy.
    #[error("quadrature failure in {what}: achieved error estimate {error_estimate:e}")]
    QuadratureFailure {
        what: &'static str,
        error_estimate: f64,
    },
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural precondition (e.g. a required path-loss exponent) is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A moment pair admits no proper Beta fit (zero-variance boundary).
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    /// Numeric overflow in an exact product (e.g. a long Pochhammer product).
    #[error("overflow in {0}")]
    Overflow(&'static str),
    /// Configuration failed validation; every violation is listed.
    #[error("invalid configuration: {0:?}")]
    InvalidConfig(Vec<model::Violation>),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    ConfigParse(String),
}

pub type Result<T> = std::result::Result<T, MetaError>;
