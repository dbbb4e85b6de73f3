//! Concatenated Reed-Solomon/polar coding over noisy shuffling channels.
//!
//! The library models a storage system whose codeword is split into `M`
//! fixed-length segments that arrive out of order (and, in sampling mode,
//! are drawn with replacement so some never arrive at all) after per-bit
//! substitution noise. Segment positions are recovered either implicitly,
//! by encoding each segment in a distinct coset of a polar code and
//! detecting the coset from the frozen-bit log-likelihood-ratio sum, or
//! explicitly from embedded index bits. An outer Reed-Solomon code then
//! corrects residual segment errors.
//!
//! - [`gf`] / [`rs`]: GF(2^m) arithmetic and the outer Reed-Solomon codec.
//! - [`polar`]: inner polar code (transform, successive-cancellation
//!   decoder exposing per-position decision LLRs).
//! - [`coset`]: coset books and the matched (coset-detecting) decoder.
//! - [`channel`]: noisy shuffling and shuffling-sampling channel models.
//! - [`pipeline`]: end-to-end frame codec and the Monte Carlo campaign
//!   runner with per-trial reproducible random streams.
//! - [`analysis`]: closed-form mis-detection and frame-error-rate
//!   approximations, plus small-scale brute-force validators.

pub mod analysis;
pub mod channel;
pub mod coset;
pub mod gf;
pub mod pipeline;
pub mod polar;
pub mod rs;

/// Crate-wide error type.
///
/// `Config` covers invalid parameters and inconsistent setup; `Budget`
/// covers requests whose enumeration or retry cost exceeds a hard cap.
/// The two map to distinct process exit codes in the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
}
