//! Forecast configuration shared by the engine and the command line front
//! end.

use alloc::collections::BTreeMap;

use crate::error::Error;
use crate::multiscale::HierarchyKind;
use crate::quantizer::QuantizerMethod;
use crate::series::ReturnsMode;
use crate::Result;

/// Which prediction scenarios the caller wants reported.
///
/// The engine always computes both rollouts (they share almost all work);
/// this only selects what downstream output carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioSelection {
    Lower,
    Upper,
    Both,
}

/// How the "centre of distribution" state used by the cluster tie-break is
/// chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterRule {
    /// The state containing the median of the training returns.
    MedianState,
    /// The middle of the alphabet, `ceil((s + 1) / 2)`.
    MiddleState,
}

/// Per-level override of the global `(states, order)` pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LevelOverride {
    pub states: Option<usize>,
    pub order: Option<usize>,
}

/// All knobs of the multiscale forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastConfig {
    /// Number of states `s` in the quantizer alphabet.
    pub states: usize,
    /// Order `r` of the Markov chain.
    pub order: usize,
    /// Per-sampling-step overrides of `states` / `order`.
    pub level_overrides: BTreeMap<usize, LevelOverride>,
    /// Probability distance from the maximum within which states join the
    /// candidate set.
    pub delta: f64,
    /// Minimum observations of a history before it is trusted; sparser
    /// histories back off to shorter ones.
    pub n_min: usize,
    /// Requested forecast length in base steps.
    pub horizon: usize,
    pub hierarchy: HierarchyKind,
    pub mode: ReturnsMode,
    pub method: QuantizerMethod,
    /// Sigma multiplier for [`QuantizerMethod::Combined`].
    pub sigma_k: f64,
    pub scenario: ScenarioSelection,
    pub center_rule: CenterRule,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            states: 4,
            order: 2,
            level_overrides: BTreeMap::new(),
            delta: 0.0,
            n_min: 1,
            horizon: 16,
            hierarchy: HierarchyKind::PowersOfTwo,
            mode: ReturnsMode::Relative,
            method: QuantizerMethod::EqualCount,
            sigma_k: 3.0,
            scenario: ScenarioSelection::Both,
            center_rule: CenterRule::MedianState,
        }
    }
}

impl ForecastConfig {
    /// The effective `(states, order)` pair for a sampling step.
    pub fn level_params(&self, step: usize) -> (usize, usize) {
        match self.level_overrides.get(&step) {
            Some(o) => (
                o.states.unwrap_or(self.states),
                o.order.unwrap_or(self.order),
            ),
            None => (self.states, self.order),
        }
    }

    /// Checks every numeric range; the owning operations re-check what they
    /// consume, this gives one early error for user-facing layers.
    pub fn validate(&self) -> Result<()> {
        if self.states < 2 {
            return Err(Error::InvalidConfig {
                what: "states must be at least 2",
            });
        }
        if self.order < 1 {
            return Err(Error::InvalidConfig {
                what: "order must be at least 1",
            });
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidConfig {
                what: "delta must lie in [0, 1]",
            });
        }
        if self.n_min < 1 {
            return Err(Error::InvalidConfig {
                what: "nmin must be at least 1",
            });
        }
        if self.horizon < 1 {
            return Err(Error::InvalidConfig {
                what: "horizon must be at least 1",
            });
        }
        if !(self.sigma_k > 0.0) {
            return Err(Error::InvalidConfig {
                what: "sigma_k must be positive",
            });
        }
        for (step, o) in &self.level_overrides {
            if *step < 1 {
                return Err(Error::InvalidConfig {
                    what: "level override steps must be positive",
                });
            }
            if o.states.is_some_and(|s| s < 2) {
                return Err(Error::InvalidConfig {
                    what: "level override states must be at least 2",
                });
            }
            if o.order.is_some_and(|r| r < 1) {
                return Err(Error::InvalidConfig {
                    what: "level override order must be at least 1",
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ForecastConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.states, 4);
        assert_eq!(c.order, 2);
        assert_eq!(c.n_min, 1);
        assert_eq!(c.delta, 0.0);
    }

    #[test]
    fn level_overrides_apply() {
        let mut c = ForecastConfig::default();
        c.level_overrides.insert(
            4,
            LevelOverride {
                states: Some(8),
                order: None,
            },
        );
        assert_eq!(c.level_params(1), (4, 2));
        assert_eq!(c.level_params(4), (8, 2));
    }

    #[test]
    fn bad_ranges_are_rejected() {
        let mut c = ForecastConfig::default();
        c.delta = 1.5;
        assert!(c.validate().is_err());
        c.delta = 0.0;
        c.states = 1;
        assert!(c.validate().is_err());
    }
}
