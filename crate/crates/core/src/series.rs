//! Sampled series representation, returns computation, normalization and
//! linear-trend fitting.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

/// How increments of the series are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnsMode {
    /// `p[t] - p[t-dt]`
    Absolute,
    /// `(p[t] - p[t-dt]) / p[t]` — the denominator is the later price.
    Relative,
}

/// A uniformly sampled sequence of price levels.
///
/// Indices are consecutive integers starting at `origin_index`; the base
/// sampling interval is 1 index unit. `step_label` is informational only
/// (e.g. "1d").
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    values: Vec<f64>,
    origin_index: i64,
    step_label: String,
}

impl PriceSeries {
    /// Builds a series from raw values. Requires at least two finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SeriesTooShort {
                needed: 2,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig {
                what: "series values must be finite",
            });
        }
        Ok(Self {
            values,
            origin_index: 0,
            step_label: String::new(),
        })
    }

    pub fn with_origin(mut self, origin_index: i64) -> Self {
        self.origin_index = origin_index;
        self
    }

    pub fn with_step_label(mut self, label: &str) -> Self {
        self.step_label = String::from(label);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees len >= 2
    }

    pub fn origin_index(&self) -> i64 {
        self.origin_index
    }

    pub fn step_label(&self) -> &str {
        &self.step_label
    }

    /// The last known value — the anchor every forecast starts from.
    pub fn last(&self) -> f64 {
        *self.values.last().expect("len >= 2")
    }

    /// A new series over the trailing `len` points, keeping index labels.
    pub fn suffix(&self, len: usize) -> Result<Self> {
        if len > self.values.len() {
            return Err(Error::SeriesTooShort {
                needed: len,
                got: self.values.len(),
            });
        }
        let start = self.values.len() - len;
        let mut s = PriceSeries::new(self.values[start..].to_vec())?;
        s.origin_index = self.origin_index + start as i64;
        s.step_label = self.step_label.clone();
        Ok(s)
    }
}

/// Increments of a price series at a fixed lag.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsSeries {
    values: Vec<f64>,
    step: usize,
    mode: ReturnsMode,
}

impl ReturnsSeries {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn mode(&self) -> ReturnsMode {
        self.mode
    }

    /// Every `step`-th return starting at `phase`: the non-overlapping block
    /// returns of the series sampled at this lag. The lag and mode tags are
    /// kept.
    pub fn subsample(&self, phase: usize) -> ReturnsSeries {
        assert!(phase < self.step.max(1), "phase must be below the lag");
        ReturnsSeries {
            values: self.values[phase..]
                .iter()
                .copied()
                .step_by(self.step)
                .collect(),
            step: self.step,
            mode: self.mode,
        }
    }
}

/// Computes the increments of `series` at lag `step`.
///
/// Absolute mode yields `p[k+step] - p[k]`; relative mode divides that
/// difference by the later price `p[k+step]`.
pub fn compute_returns(series: &PriceSeries, step: usize, mode: ReturnsMode) -> Result<ReturnsSeries> {
    let p = series.values();
    if step == 0 {
        return Err(Error::InvalidConfig {
            what: "returns lag must be positive",
        });
    }
    if step >= p.len() {
        return Err(Error::StepTooLarge { step, len: p.len() });
    }
    let mut values = Vec::with_capacity(p.len() - step);
    for k in 0..p.len() - step {
        let later = p[k + step];
        match mode {
            ReturnsMode::Absolute => values.push(later - p[k]),
            ReturnsMode::Relative => {
                if later == 0.0 {
                    return Err(Error::ZeroDenominator { index: k + step });
                }
                values.push((later - p[k]) / later);
            }
        }
    }
    Ok(ReturnsSeries { values, step, mode })
}

/// Maps a sequence affinely onto `[0, 1]`: the minimum goes to 0, the maximum
/// to 1. Fails on constant input.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !(max > min) {
        return Err(Error::DegenerateRange);
    }
    let span = max - min;
    Ok(values.iter().map(|&v| (v - min) / span).collect())
}

/// An ordinary least-squares line over (index, value) pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendLine {
    pub intercept: f64,
    pub slope: f64,
}

impl TrendLine {
    /// Trend value at an arbitrary (possibly future) index.
    pub fn value_at(&self, index: f64) -> f64 {
        self.intercept + self.slope * index
    }
}

/// Fits the least-squares line over all points of the series, with the index
/// running 0, 1, 2, ... from the first sample.
pub fn fit_linear_trend(series: &PriceSeries) -> TrendLine {
    let y = series.values();
    let n = y.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (yi - mean_y);
        sxx += dx * dx;
    }
    // sxx > 0 because construction guarantees len >= 2
    let slope = sxy / sxx;
    TrendLine {
        intercept: mean_y - slope * mean_x,
        slope,
    }
}
