//! Quantization-error measurement, walk-forward ensembles over varying
//! learning-set lengths, and weighted aggregation of normalized forecasts.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::config::ForecastConfig;
use crate::error::Error;
use crate::markov::Scenario;
use crate::multiscale::{build_hierarchy, forecast, restore_series, splice};
use crate::quantizer::{build_quantizer, StateSequence};
use crate::series::{compute_returns, PriceSeries};
use crate::Result;

/// Max-absolute and root-mean-square deviation of a restored path from the
/// actual one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub max_abs: f64,
    pub rms: f64,
}

fn error_stats(restored: &[f64], actual: &[f64]) -> ErrorStats {
    debug_assert_eq!(restored.len(), actual.len());
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0f64;
    for (&r, &a) in restored.iter().zip(actual) {
        let d = r - a;
        max_abs = max_abs.max(d.abs());
        sum_sq += d * d;
    }
    ErrorStats {
        max_abs,
        rms: libm::sqrt(sum_sq / restored.len() as f64),
    }
}

/// Restoration error of one hierarchy level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelErrorStats {
    pub step: usize,
    pub stats: ErrorStats,
}

/// The quantization (quantum) error report: restoration error per level and
/// after splicing, measured over the trailing `span` points with no
/// prediction involved.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationErrorReport {
    pub span: usize,
    pub per_level: Vec<LevelErrorStats>,
    pub spliced: ErrorStats,
    pub skipped_steps: Vec<usize>,
}

/// Measures the error incurred by replacing returns with their state means:
/// classify the known window's true returns, restore each level from those
/// true states, splice, and compare against the actual series.
pub fn quantization_error(
    series: &PriceSeries,
    config: &ForecastConfig,
) -> Result<QuantizationErrorReport> {
    config.validate()?;
    let hierarchy = build_hierarchy(config.horizon, config.hierarchy);
    let max_step = hierarchy.max_step();
    let len = series.len();
    let span = ((len - 1) / max_step) * max_step;
    if span == 0 {
        return Err(Error::SeriesTooShort {
            needed: max_step + 1,
            got: len,
        });
    }
    let anchor_index = (len - 1) - span;
    let actual = &series.values()[anchor_index..];
    let anchor = actual[0];

    let mut per_level = Vec::new();
    let mut skipped = Vec::new();
    let mut running: Vec<f64> = Vec::new();
    for &step in hierarchy.steps() {
        if span % step != 0 {
            skipped.push(step);
            continue;
        }
        let (s, _) = config.level_params(step);
        // same block grid as the forecast: non-overlapping returns aligned
        // to end at the last known point
        let phase = (len - 1) % step;
        let returns = compute_returns(series, step, config.mode)
            .map_err(|e| e.at_level(step))?
            .subsample(phase);
        let quantizer = build_quantizer(&returns, s, config.method, config.sigma_k)
            .map_err(|e| e.at_level(step))?;
        let blocks = span / step;
        let offset = (anchor_index - phase) / step;
        let states: Vec<usize> = (0..blocks)
            .map(|k| quantizer.state_of(returns.values()[offset + k]))
            .collect();
        let states = StateSequence::new(states, s, step).map_err(|e| e.at_level(step))?;
        let level =
            restore_series(anchor, &states, &quantizer, span).map_err(|e| e.at_level(step))?;
        per_level.push(LevelErrorStats {
            step,
            stats: error_stats(level.values(), actual),
        });
        running = if running.is_empty() {
            level.values().to_vec()
        } else {
            splice(&running, level.values(), step).map_err(|e| e.at_level(step))?
        };
    }
    Ok(QuantizationErrorReport {
        span,
        per_level,
        spliced: error_stats(&running, actual),
        skipped_steps: skipped,
    })
}

/// One walk-forward ensemble member.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub learning_length: usize,
    pub values: Vec<f64>,
}

/// A learning length that could not produce a forecast, and why.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberWarning {
    pub learning_length: usize,
    pub message: String,
}

/// Forecasts from several learning-set lengths plus their per-index mean and
/// population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub members: Vec<EnsembleMember>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub warnings: Vec<MemberWarning>,
}

/// Runs one forecast per learning length over suffix windows that all end at
/// the last known point, so every member is anchored identically. Infeasible
/// lengths are skipped with a warning record.
pub fn walk_forward(
    series: &PriceSeries,
    learning_lengths: &[usize],
    config: &ForecastConfig,
    scenario: Scenario,
) -> Result<EnsembleResult> {
    config.validate()?;
    let mut members = Vec::new();
    let mut warnings = Vec::new();
    for &length in learning_lengths {
        let attempt = series
            .suffix(length)
            .and_then(|window| forecast(&window, config));
        match attempt {
            Ok(result) => members.push(EnsembleMember {
                learning_length: length,
                values: result.scenario(scenario).to_vec(),
            }),
            Err(e) => warnings.push(MemberWarning {
                learning_length: length,
                message: e.to_string(),
            }),
        }
    }
    if members.is_empty() {
        return Err(Error::NoFeasibleMembers);
    }
    let n = members[0].values.len();
    let m = members.len() as f64;
    let mut mean = Vec::with_capacity(n);
    let mut std = Vec::with_capacity(n);
    for i in 0..n {
        let mu = members.iter().map(|mb| mb.values[i]).sum::<f64>() / m;
        let var = members
            .iter()
            .map(|mb| {
                let d = mb.values[i] - mu;
                d * d
            })
            .sum::<f64>()
            / m;
        mean.push(mu);
        std.push(libm::sqrt(var));
    }
    Ok(EnsembleResult {
        members,
        mean,
        std,
        warnings,
    })
}

/// Labeled nonnegative weights with a positive sum.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl WeightSet {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig {
                what: "weights must be finite and nonnegative",
            });
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::ZeroWeightSum);
        }
        Ok(Self { labels, weights })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Per-index weighted mean of equally long sequences. Callers aggregating
/// forecasts of different magnitudes should normalize each one first.
pub fn weighted_mean(series_list: &[&[f64]], weights: &WeightSet) -> Result<Vec<f64>> {
    if series_list.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            got: series_list.len(),
        });
    }
    let n = series_list[0].len();
    if let Some(bad) = series_list.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    let total: f64 = weights.weights().iter().sum();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s: f64 = series_list
            .iter()
            .zip(weights.weights())
            .map(|(seq, &w)| w * seq[i])
            .sum();
        out.push(s / total);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ForecastConfig;
    use crate::series::ReturnsMode;
    use alloc::vec;

    /// Price path whose lag-1 returns cycle with period 8 through four
    /// distinct values, arranged so the lag-2 block sums are also four
    /// distinct values; with s = 4 the quantizer representatives are exact
    /// at both usable levels.
    fn cyclic_series(len: usize) -> PriceSeries {
        let pattern = [1.0, 2.0, 2.0, -1.0, 1.0, -2.0, -1.0, -2.0];
        let mut values = vec![100.0];
        for i in 0..len - 1 {
            values.push(values[i] + pattern[i % 8]);
        }
        PriceSeries::new(values).unwrap()
    }

    fn absolute_config(states: usize, horizon: usize) -> ForecastConfig {
        ForecastConfig {
            states,
            horizon,
            mode: ReturnsMode::Absolute,
            ..ForecastConfig::default()
        }
    }

    #[test]
    fn exact_representatives_give_zero_error() {
        let series = cyclic_series(41);
        let report = quantization_error(&series, &absolute_config(4, 2)).unwrap();
        assert_eq!(report.per_level.len(), 2);
        // every return equals its state mean exactly: the base level and the
        // spliced curve reproduce the series; the lag-2 level is exact at its
        // system points and only its interpolated midpoints deviate, by half
        // the in-block increment difference at most
        assert_eq!(report.per_level[0].stats.max_abs, 0.0);
        assert!(report.per_level[1].stats.max_abs <= 1.5 + 1e-12);
        assert_eq!(report.spliced.max_abs, 0.0);
        assert_eq!(report.spliced.rms, 0.0);
    }

    #[test]
    fn constant_slope_series_is_degenerate() {
        // every return is identical, so no state alphabet can be built
        let values: Vec<f64> = (0..32).map(|i| 10.0 + 0.5 * i as f64).collect();
        let series = PriceSeries::new(values).unwrap();
        let err = quantization_error(&series, &absolute_config(2, 2)).unwrap_err();
        assert!(matches!(err, Error::Level { step: 1, .. }), "{err:?}");
    }

    #[test]
    fn walk_forward_identical_members_have_zero_std() {
        let series = cyclic_series(128);
        let config = absolute_config(4, 2);
        let r = walk_forward(&series, &[64, 64], &config, Scenario::Lower).unwrap();
        assert_eq!(r.members.len(), 2);
        assert!(r.std.iter().all(|&s| s == 0.0));
        assert_eq!(r.mean, r.members[0].values);
    }

    #[test]
    fn walk_forward_two_member_aggregates() {
        let series = cyclic_series(128);
        let config = absolute_config(4, 2);
        let r = walk_forward(&series, &[64, 96], &config, Scenario::Lower).unwrap();
        assert_eq!(r.members.len(), 2);
        let a = &r.members[0].values;
        let b = &r.members[1].values;
        for i in 0..a.len() {
            assert!((r.mean[i] - 0.5 * (a[i] + b[i])).abs() < 1e-12);
            assert!((r.std[i] - 0.5 * (a[i] - b[i]).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn walk_forward_skips_infeasible_lengths() {
        let series = cyclic_series(128);
        let config = absolute_config(4, 2);
        let r = walk_forward(&series, &[3, 64, 500], &config, Scenario::Lower).unwrap();
        assert_eq!(r.members.len(), 1);
        assert_eq!(r.warnings.len(), 2);
        assert_eq!(r.members[0].learning_length, 64);
    }

    #[test]
    fn walk_forward_all_infeasible_is_an_error() {
        let series = cyclic_series(128);
        let config = absolute_config(4, 2);
        let err = walk_forward(&series, &[1, 2], &config, Scenario::Lower).unwrap_err();
        assert_eq!(err, Error::NoFeasibleMembers);
    }

    #[test]
    fn weighted_mean_equal_weights_is_arithmetic_mean() {
        let w = WeightSet::new(vec!["a".into(), "b".into()], vec![1.0, 1.0]).unwrap();
        let out = weighted_mean(&[&[0.0, 1.0], &[1.0, 0.0]], &w).unwrap();
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn weighted_mean_single_nonzero_weight_selects_member() {
        let w = WeightSet::new(vec!["a".into(), "b".into()], vec![0.0, 2.5]).unwrap();
        let out = weighted_mean(&[&[0.25, 0.5], &[0.75, 1.0]], &w).unwrap();
        assert_eq!(out, vec![0.75, 1.0]);
    }

    #[test]
    fn weighted_mean_one_three_on_constants() {
        let w = WeightSet::new(vec!["a".into(), "b".into()], vec![1.0, 3.0]).unwrap();
        let zeros = vec![0.0; 5];
        let ones = vec![1.0; 5];
        let out = weighted_mean(&[&zeros, &ones], &w).unwrap();
        assert!(out.iter().all(|&v| (v - 0.75).abs() < 1e-12));
    }

    #[test]
    fn weighted_mean_stays_within_member_range() {
        let w = WeightSet::new(vec!["a".into(), "b".into(), "c".into()], vec![1.0, 2.0, 0.5])
            .unwrap();
        let xs = [&[0.1, 0.9, 0.4][..], &[0.3, 0.2, 0.6][..], &[0.8, 0.5, 0.5][..]];
        let out = weighted_mean(&xs, &w).unwrap();
        for i in 0..3 {
            let lo = xs.iter().map(|s| s[i]).fold(f64::INFINITY, f64::min);
            let hi = xs.iter().map(|s| s[i]).fold(f64::NEG_INFINITY, f64::max);
            assert!(out[i] >= lo && out[i] <= hi);
        }
    }

    #[test]
    fn weight_set_validation() {
        assert!(WeightSet::new(vec!["a".into()], vec![0.0]).is_err());
        assert!(WeightSet::new(vec!["a".into()], vec![-1.0]).is_err());
        assert!(WeightSet::new(vec!["a".into(), "b".into()], vec![1.0]).is_err());
        let w = WeightSet::new(vec!["a".into(), "b".into()], vec![1.0, 3.0]).unwrap();
        let err = weighted_mean(&[&[1.0, 2.0], &[1.0]], &w).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 2, got: 1 });
    }
}
