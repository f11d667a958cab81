//! The time-increment hierarchy, per-level restoration of price paths from
//! predicted states, and the coarse-to-fine splicing that assembles the final
//! forecast.
//!
//! Restoration places exact "system points" at multiples of the level's
//! sampling step and fills the points between them by linear interpolation.
//! Splicing then pins the running fine-grained forecast to a coarser level's
//! system points while keeping the fine detail between them; the linear trend
//! is spliced last as a two-point coarse level over `{0, horizon}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::config::{CenterRule, ForecastConfig};
use crate::error::Error;
use crate::markov::{estimate_transitions, predict_states_traced, Scenario, TransitionTable};
use crate::quantizer::{build_quantizer, classify, Quantizer, StateSequence};
use crate::series::{compute_returns, fit_linear_trend, PriceSeries, ReturnsMode, TrendLine};
use crate::Result;

/// Shape of the ascending set of sampling steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HierarchyKind {
    /// `1, 2, 4, 8, ...`
    PowersOfTwo,
    /// All 3-smooth numbers `2^a * 3^b`: `1, 2, 3, 4, 6, 8, 9, 12, ...`
    SmoothProducts,
}

/// The ascending sampling steps the forecast runs at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    steps: Vec<usize>,
    kind: HierarchyKind,
}

impl Hierarchy {
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn kind(&self) -> HierarchyKind {
        self.kind
    }

    pub fn max_step(&self) -> usize {
        *self.steps.last().expect("hierarchy is never empty")
    }
}

/// Enumerates the hierarchy steps up to `horizon`. The first step is always
/// 1; the effective forecast horizon is later rounded down to a multiple of
/// the largest step.
pub fn build_hierarchy(horizon: usize, kind: HierarchyKind) -> Hierarchy {
    assert!(horizon >= 1, "horizon must be at least 1");
    let mut steps = match kind {
        HierarchyKind::PowersOfTwo => {
            let mut steps = Vec::new();
            let mut t = 1usize;
            while t <= horizon {
                steps.push(t);
                match t.checked_mul(2) {
                    Some(next) => t = next,
                    None => break,
                }
            }
            steps
        }
        HierarchyKind::SmoothProducts => {
            let mut steps = Vec::new();
            let mut p2 = 1usize;
            while p2 <= horizon {
                let mut t = p2;
                while t <= horizon {
                    steps.push(t);
                    match t.checked_mul(3) {
                        Some(next) => t = next,
                        None => break,
                    }
                }
                match p2.checked_mul(2) {
                    Some(next) => p2 = next,
                    None => break,
                }
            }
            steps
        }
    };
    steps.sort_unstable();
    Hierarchy { steps, kind }
}

/// A restored prognostic series for one sampling step.
///
/// `values[0]` is the anchor price; values at multiples of `step` are exact
/// system points, the rest are linear interpolations.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelForecast {
    step: usize,
    values: Vec<f64>,
}

impl LevelForecast {
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Indices that are multiples of the sampling step, `0..=horizon`.
    pub fn system_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).step_by(self.step)
    }
}

/// Restores a price path from predicted states.
///
/// Each state contributes one block of `step` points: the block's end point
/// moves by the state's representative return (added directly for absolute
/// returns, inverted through the relative-return definition otherwise) and
/// interior points interpolate linearly.
pub fn restore_series(
    anchor: f64,
    states: &StateSequence,
    q: &Quantizer,
    horizon: usize,
) -> Result<LevelForecast> {
    let step = q.step();
    if states.alphabet() != q.states() || states.step() != step {
        return Err(Error::QuantizerMismatch);
    }
    if step == 0 || horizon == 0 || horizon % step != 0 {
        return Err(Error::InvalidConfig {
            what: "horizon must be a positive multiple of the sampling step",
        });
    }
    let blocks = horizon / step;
    if states.len() != blocks {
        return Err(Error::LengthMismatch {
            expected: blocks,
            got: states.len(),
        });
    }
    let mut values = vec![0.0; horizon + 1];
    values[0] = anchor;
    let mut base = anchor;
    for (k, &state) in states.states().iter().enumerate() {
        let mean = q.mean_of(state)?;
        let target = match q.mode() {
            ReturnsMode::Absolute => base + mean,
            ReturnsMode::Relative => {
                // invert r = (y - base) / y
                if !(mean < 1.0) {
                    return Err(Error::InvalidConfig {
                        what: "relative state mean must be below 1",
                    });
                }
                base / (1.0 - mean)
            }
        };
        let start = k * step;
        for j in 1..step {
            values[start + j] = base + j as f64 * (target - base) / step as f64;
        }
        values[start + step] = target;
        base = target;
    }
    Ok(LevelForecast { step, values })
}

/// Pins the fine sequence `g` to the coarse values at every multiple of
/// `step`, interpolating the correction linearly between those system points.
///
/// The result equals `coarse` exactly at multiples of `step` and keeps `g`'s
/// detail in between. Both sequences must have the same length, share their
/// first value, and span a whole number of coarse blocks.
pub fn splice(fine: &[f64], coarse: &[f64], step: usize) -> Result<Vec<f64>> {
    if fine.len() != coarse.len() {
        return Err(Error::LengthMismatch {
            expected: fine.len(),
            got: coarse.len(),
        });
    }
    if fine.is_empty() || step == 0 || (fine.len() - 1) % step != 0 {
        return Err(Error::InvalidConfig {
            what: "splice requires a whole number of coarse blocks",
        });
    }
    if fine[0] != coarse[0] {
        return Err(Error::AnchorMismatch);
    }
    let mut out = fine.to_vec();
    let blocks = (fine.len() - 1) / step;
    for k in 0..blocks {
        let lo = k * step;
        let hi = lo + step;
        let c0 = coarse[lo] - fine[lo];
        let c1 = coarse[hi] - fine[hi];
        for j in 1..step {
            out[lo + j] = fine[lo + j] + c0 + j as f64 * (c1 - c0) / step as f64;
        }
        out[hi] = coarse[hi];
    }
    out[0] = coarse[0];
    Ok(out)
}

/// Everything recorded about one level of a forecast run.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDiagnostics {
    pub step: usize,
    pub states: usize,
    pub order: usize,
    pub center: usize,
    pub quantizer: Quantizer,
    pub predicted_lower: Vec<usize>,
    pub predicted_upper: Vec<usize>,
    /// 0-based rollout positions where a bifurcation tie was resolved.
    pub bifurcations_lower: Vec<usize>,
    pub bifurcations_upper: Vec<usize>,
}

/// Run-level diagnostics of a forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub requested_horizon: usize,
    pub effective_horizon: usize,
    /// Hierarchy steps that do not divide the effective horizon and were
    /// therefore not run.
    pub skipped_steps: Vec<usize>,
    pub levels: Vec<LevelDiagnostics>,
}

impl Diagnostics {
    /// Total bifurcation ties resolved across all levels and scenarios.
    pub fn bifurcation_count(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.bifurcations_lower.len() + l.bifurcations_upper.len())
            .sum()
    }
}

/// The spliced forecast under both scenarios, plus the trend it was pinned
/// to and the per-level diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    /// Spliced sequence of length `effective_horizon + 1`, lower scenario.
    pub lower: Vec<f64>,
    /// Same for the upper scenario.
    pub upper: Vec<f64>,
    pub trend: TrendLine,
    pub diagnostics: Diagnostics,
}

impl ForecastResult {
    pub fn scenario(&self, scenario: Scenario) -> &[f64] {
        match scenario {
            Scenario::Lower => &self.lower,
            Scenario::Upper => &self.upper,
        }
    }
}

struct LevelModel {
    step: usize,
    states: usize,
    order: usize,
    center: usize,
    quantizer: Quantizer,
    table: TransitionTable,
    seed: Vec<usize>,
}

fn center_state(
    rule: CenterRule,
    sorted_returns: &[f64],
    q: &Quantizer,
) -> usize {
    match rule {
        CenterRule::MedianState => {
            let n = sorted_returns.len();
            let median = if n % 2 == 1 {
                sorted_returns[n / 2]
            } else {
                0.5 * (sorted_returns[n / 2 - 1] + sorted_returns[n / 2])
            };
            q.state_of(median)
        }
        CenterRule::MiddleState => (q.states() + 2) / 2,
    }
}

fn build_level_model(
    series: &PriceSeries,
    config: &ForecastConfig,
    step: usize,
) -> Result<LevelModel> {
    let (s, r) = config.level_params(step);
    // Non-overlapping block returns of the step-sampled series, aligned so
    // the last one ends at the anchor; prediction then continues the same
    // block grid into the future.
    let phase = (series.len() - 1) % step;
    let returns = compute_returns(series, step, config.mode)?.subsample(phase);
    let quantizer = build_quantizer(&returns, s, config.method, config.sigma_k)?;
    let states = classify(&returns, &quantizer)?;
    if states.len() < r + 1 {
        return Err(Error::SequenceTooShort {
            needed: r + 1,
            got: states.len(),
        });
    }
    let table = estimate_transitions(&states, r)?;
    let mut sorted = returns.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let center = center_state(config.center_rule, &sorted, &quantizer);
    let seed = states.tail(r)?.to_vec();
    Ok(LevelModel {
        step,
        states: s,
        order: r,
        center,
        quantizer,
        table,
        seed,
    })
}

/// Runs the full multiscale pipeline: per ascending sampling step, quantize
/// returns, estimate transitions, roll out the most probable states under
/// each scenario, restore the level path and splice it onto the running
/// result; finally splice with the linear-trend continuation.
///
/// The effective horizon is the requested horizon rounded down to a multiple
/// of the largest hierarchy step; levels whose step does not divide it are
/// skipped and reported in the diagnostics.
pub fn forecast(series: &PriceSeries, config: &ForecastConfig) -> Result<ForecastResult> {
    config.validate()?;
    let hierarchy = build_hierarchy(config.horizon, config.hierarchy);
    let max_step = hierarchy.max_step();
    let effective = (config.horizon / max_step) * max_step;
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    for &step in hierarchy.steps() {
        if effective % step == 0 {
            used.push(step);
        } else {
            skipped.push(step);
        }
    }
    debug_assert_eq!(used.first(), Some(&1));

    let anchor = series.last();
    let trend = fit_linear_trend(series);
    let anchor_index = (series.len() - 1) as f64;

    let mut models = Vec::with_capacity(used.len());
    for &step in &used {
        let model = build_level_model(series, config, step).map_err(|e| e.at_level(step))?;
        models.push(model);
    }

    let mut level_diags: Vec<LevelDiagnostics> = models
        .iter()
        .map(|m| LevelDiagnostics {
            step: m.step,
            states: m.states,
            order: m.order,
            center: m.center,
            quantizer: m.quantizer.clone(),
            predicted_lower: Vec::new(),
            predicted_upper: Vec::new(),
            bifurcations_lower: Vec::new(),
            bifurcations_upper: Vec::new(),
        })
        .collect();

    let trend_target = trend.value_at(anchor_index + effective as f64);
    let mut trend_path: Vec<f64> = (0..=effective)
        .map(|j| anchor + j as f64 * (trend_target - anchor) / effective as f64)
        .collect();
    trend_path[effective] = trend_target;

    let mut outputs: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (slot, scenario) in [(0, Scenario::Lower), (1, Scenario::Upper)] {
        let mut running: Vec<f64> = Vec::new();
        for (model, diag) in models.iter().zip(level_diags.iter_mut()) {
            let blocks = effective / model.step;
            let (pred, bifurcations) = predict_states_traced(
                &model.table,
                &model.seed,
                blocks,
                config.delta,
                config.n_min,
                model.center,
                scenario,
            )
            .map_err(|e| e.at_level(model.step))?;
            let pred = pred.with_step(model.step);
            let level = restore_series(anchor, &pred, &model.quantizer, effective)
                .map_err(|e| e.at_level(model.step))?;
            running = if running.is_empty() {
                level.values
            } else {
                splice(&running, &level.values, model.step).map_err(|e| e.at_level(model.step))?
            };
            match scenario {
                Scenario::Lower => {
                    diag.predicted_lower = pred.states().to_vec();
                    diag.bifurcations_lower = bifurcations;
                }
                Scenario::Upper => {
                    diag.predicted_upper = pred.states().to_vec();
                    diag.bifurcations_upper = bifurcations;
                }
            }
        }
        outputs[slot] = splice(&running, &trend_path, effective)?;
    }

    let [lower, upper] = outputs;
    Ok(ForecastResult {
        lower,
        upper,
        trend,
        diagnostics: Diagnostics {
            requested_horizon: config.horizon,
            effective_horizon: effective,
            skipped_steps: skipped,
            levels: level_diags,
        },
    })
}
