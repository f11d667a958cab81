//! Forecasting engine for discretely sampled time series based on high-order
//! (complex) Markov chains over quantized returns.
//!
//! The engine works in five stages, each housed in its own module:
//!
//! 1. [`series`] — sampled price series, returns at a given lag, normalization
//!    and linear-trend fitting.
//! 2. [`quantizer`] — partitioning the returns range into a finite state
//!    alphabet and mapping returns to state indices and back.
//! 3. [`markov`] — order-`r` transition statistics over generalized states and
//!    deterministic most-probable-state rollout under two scenarios.
//! 4. [`multiscale`] — the hierarchy of sampling steps, per-level series
//!    restoration and the coarse-to-fine splicing that produces the final
//!    forecast.
//! 5. [`eval`] — quantization-error measurement, walk-forward ensembles and
//!    weighted aggregation of normalized forecasts.
//!
//! The crate is `no_std` (with `alloc`); all I/O, file formats and the command
//! line front end live in the companion `chaincast-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod config;
pub mod error;
pub mod eval;
pub mod markov;
pub mod multiscale;
pub mod quantizer;
pub mod series;

pub use config::{CenterRule, ForecastConfig, LevelOverride, ScenarioSelection};
pub use error::Error;
pub use markov::{CandidateSet, Scenario, TransitionTable};
pub use multiscale::{ForecastResult, Hierarchy, HierarchyKind, LevelForecast};
pub use quantizer::{Quantizer, QuantizerMethod, StateSequence};
pub use series::{PriceSeries, ReturnsMode, ReturnsSeries, TrendLine};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
