//! Error type shared by all engine modules.

use alloc::boxed::Box;
use core::fmt;

/// Errors produced by the forecasting engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The input series has fewer points than the operation needs.
    SeriesTooShort { needed: usize, got: usize },
    /// The requested lag is not smaller than the series length.
    StepTooLarge { step: usize, len: usize },
    /// A relative return would divide by a zero price.
    ZeroDenominator { index: usize },
    /// Normalization of a constant sequence (max equals min).
    DegenerateRange,
    /// The returns sample cannot populate the requested number of states.
    InfeasibleAlphabet { states: usize, distinct: usize },
    /// Fewer returns than states requested.
    TooFewReturns { states: usize, got: usize },
    /// Returns mode, lag or alphabet size does not match the quantizer.
    QuantizerMismatch,
    /// A state index outside `[1, s]`.
    StateOutOfRange { state: usize, alphabet: usize },
    /// The state sequence is too short for the requested chain order.
    SequenceTooShort { needed: usize, got: usize },
    /// Two sequences that must agree in length do not.
    LengthMismatch { expected: usize, got: usize },
    /// Sequences being spliced do not share their first value.
    AnchorMismatch,
    /// Weights sum to zero (or the weight set is empty).
    ZeroWeightSum,
    /// A configuration field is outside its valid range.
    InvalidConfig { what: &'static str },
    /// No walk-forward member was feasible.
    NoFeasibleMembers,
    /// A failure at one sampling level of the multiscale pipeline.
    Level { step: usize, source: Box<Error> },
}

impl Error {
    /// Wraps an error with the sampling step of the level it occurred at.
    pub fn at_level(self, step: usize) -> Error {
        Error::Level {
            step,
            source: Box::new(self),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SeriesTooShort { needed, got } => {
                write!(f, "series too short: need {needed} points, got {got}")
            }
            Error::StepTooLarge { step, len } => {
                write!(f, "lag {step} too large for series of length {len}")
            }
            Error::ZeroDenominator { index } => {
                write!(f, "zero denominator for relative return at index {index}")
            }
            Error::DegenerateRange => write!(f, "cannot normalize a constant sequence"),
            Error::InfeasibleAlphabet { states, distinct } => write!(
                f,
                "cannot build {states} states from {distinct} distinct return values"
            ),
            Error::TooFewReturns { states, got } => {
                write!(f, "need at least {states} returns for {states} states, got {got}")
            }
            Error::QuantizerMismatch => {
                write!(f, "returns mode, lag or alphabet does not match the quantizer")
            }
            Error::StateOutOfRange { state, alphabet } => {
                write!(f, "state {state} outside alphabet [1, {alphabet}]")
            }
            Error::SequenceTooShort { needed, got } => {
                write!(f, "state sequence too short: need {needed}, got {got}")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::AnchorMismatch => write!(f, "spliced sequences must share their anchor value"),
            Error::ZeroWeightSum => write!(f, "weights must sum to a positive value"),
            Error::InvalidConfig { what } => write!(f, "invalid configuration: {what}"),
            Error::NoFeasibleMembers => write!(f, "no feasible walk-forward member"),
            Error::Level { step, source } => write!(f, "level dt={step}: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Level { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
