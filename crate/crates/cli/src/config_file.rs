//! Flat key-value configuration files mirroring the forecast parameters.
//!
//! Keys use the same names as the command line flags; `level.<step>.states`
//! and `level.<step>.order` set per-level overrides. Lines starting with `#`
//! and blank lines are ignored. A config written with [`write_config`]
//! parses back to an identical configuration.

use chaincast_core::{
    CenterRule, ForecastConfig, HierarchyKind, QuantizerMethod, ReturnsMode, ScenarioSelection,
};

use crate::error::CliError;

pub fn parse_hierarchy(text: &str) -> Result<HierarchyKind, CliError> {
    match text {
        "pow2" => Ok(HierarchyKind::PowersOfTwo),
        "smooth" => Ok(HierarchyKind::SmoothProducts),
        other => Err(CliError::config(format!(
            "unknown hierarchy '{other}' (expected pow2 or smooth)"
        ))),
    }
}

pub fn parse_returns(text: &str) -> Result<ReturnsMode, CliError> {
    match text {
        "abs" => Ok(ReturnsMode::Absolute),
        "rel" => Ok(ReturnsMode::Relative),
        other => Err(CliError::config(format!(
            "unknown returns mode '{other}' (expected abs or rel)"
        ))),
    }
}

pub fn parse_quantizer(text: &str) -> Result<QuantizerMethod, CliError> {
    match text {
        "count" => Ok(QuantizerMethod::EqualCount),
        "width" => Ok(QuantizerMethod::EqualWidth),
        "combined" => Ok(QuantizerMethod::Combined),
        other => Err(CliError::config(format!(
            "unknown quantizer '{other}' (expected count, width or combined)"
        ))),
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioSelection, CliError> {
    match text {
        "lower" => Ok(ScenarioSelection::Lower),
        "upper" => Ok(ScenarioSelection::Upper),
        "both" => Ok(ScenarioSelection::Both),
        other => Err(CliError::config(format!(
            "unknown scenario '{other}' (expected lower, upper or both)"
        ))),
    }
}

pub fn parse_center(text: &str) -> Result<CenterRule, CliError> {
    match text {
        "median" => Ok(CenterRule::MedianState),
        "middle" => Ok(CenterRule::MiddleState),
        other => Err(CliError::config(format!(
            "unknown center rule '{other}' (expected median or middle)"
        ))),
    }
}

pub fn hierarchy_name(kind: HierarchyKind) -> &'static str {
    match kind {
        HierarchyKind::PowersOfTwo => "pow2",
        HierarchyKind::SmoothProducts => "smooth",
    }
}

pub fn returns_name(mode: ReturnsMode) -> &'static str {
    match mode {
        ReturnsMode::Absolute => "abs",
        ReturnsMode::Relative => "rel",
    }
}

pub fn quantizer_name(method: QuantizerMethod) -> &'static str {
    match method {
        QuantizerMethod::EqualCount => "count",
        QuantizerMethod::EqualWidth => "width",
        QuantizerMethod::Combined => "combined",
    }
}

pub fn scenario_name(scenario: ScenarioSelection) -> &'static str {
    match scenario {
        ScenarioSelection::Lower => "lower",
        ScenarioSelection::Upper => "upper",
        ScenarioSelection::Both => "both",
    }
}

pub fn center_name(rule: CenterRule) -> &'static str {
    match rule {
        CenterRule::MedianState => "median",
        CenterRule::MiddleState => "middle",
    }
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::config(format!("invalid value '{value}' for {key}")))
}

/// Applies `key = value` lines onto an existing configuration.
pub fn apply_config_text(config: &mut ForecastConfig, text: &str) -> Result<(), CliError> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "states" => config.states = parse_number(key, value)?,
            "order" => config.order = parse_number(key, value)?,
            "delta" => config.delta = parse_number(key, value)?,
            "nmin" => config.n_min = parse_number(key, value)?,
            "horizon" => config.horizon = parse_number(key, value)?,
            "hierarchy" => config.hierarchy = parse_hierarchy(value)?,
            "returns" => config.mode = parse_returns(value)?,
            "quantizer" => config.method = parse_quantizer(value)?,
            "sigma_k" => config.sigma_k = parse_number(key, value)?,
            "scenario" => config.scenario = parse_scenario(value)?,
            "center" => config.center_rule = parse_center(value)?,
            _ => {
                let Some(rest) = key.strip_prefix("level.") else {
                    return Err(CliError::config(format!("unknown config key '{key}'")));
                };
                let Some((step_text, field)) = rest.split_once('.') else {
                    return Err(CliError::config(format!(
                        "expected level.<step>.states or level.<step>.order, got '{key}'"
                    )));
                };
                let step: usize = parse_number(key, step_text)?;
                let entry = config.level_overrides.entry(step).or_default();
                match field {
                    "states" => entry.states = Some(parse_number(key, value)?),
                    "order" => entry.order = Some(parse_number(key, value)?),
                    _ => {
                        return Err(CliError::config(format!(
                            "unknown level override field '{field}' in '{key}'"
                        )))
                    }
                }
            }
        }
    }
    Ok(())
}

/// Reads a config file onto an existing configuration.
pub fn apply_config_file(
    config: &mut ForecastConfig,
    path: &std::path::Path,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|_| CliError::InputNotFound {
        path: path.to_path_buf(),
    })?;
    apply_config_text(config, &text)
}

/// Renders a configuration as a config file body.
pub fn write_config(config: &ForecastConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("states = {}\n", config.states));
    out.push_str(&format!("order = {}\n", config.order));
    out.push_str(&format!("delta = {}\n", config.delta));
    out.push_str(&format!("nmin = {}\n", config.n_min));
    out.push_str(&format!("horizon = {}\n", config.horizon));
    out.push_str(&format!("hierarchy = {}\n", hierarchy_name(config.hierarchy)));
    out.push_str(&format!("returns = {}\n", returns_name(config.mode)));
    out.push_str(&format!("quantizer = {}\n", quantizer_name(config.method)));
    out.push_str(&format!("sigma_k = {}\n", config.sigma_k));
    out.push_str(&format!("scenario = {}\n", scenario_name(config.scenario)));
    out.push_str(&format!("center = {}\n", center_name(config.center_rule)));
    for (step, o) in &config.level_overrides {
        if let Some(s) = o.states {
            out.push_str(&format!("level.{step}.states = {s}\n"));
        }
        if let Some(r) = o.order {
            out.push_str(&format!("level.{step}.order = {r}\n"));
        }
    }
    out
}

/// Builds a [`LevelOverride`]-aware config: defaults, then the optional file,
/// then explicit flag values.
#[derive(Debug, Default, Clone)]
pub struct ConfigOverlay {
    pub states: Option<usize>,
    pub order: Option<usize>,
    pub delta: Option<f64>,
    pub n_min: Option<usize>,
    pub horizon: Option<usize>,
    pub hierarchy: Option<String>,
    pub returns: Option<String>,
    pub quantizer: Option<String>,
    pub sigma_k: Option<f64>,
    pub scenario: Option<String>,
    pub center: Option<String>,
}

impl ConfigOverlay {
    pub fn apply(&self, config: &mut ForecastConfig) -> Result<(), CliError> {
        if let Some(v) = self.states {
            config.states = v;
        }
        if let Some(v) = self.order {
            config.order = v;
        }
        if let Some(v) = self.delta {
            config.delta = v;
        }
        if let Some(v) = self.n_min {
            config.n_min = v;
        }
        if let Some(v) = self.horizon {
            config.horizon = v;
        }
        if let Some(v) = &self.hierarchy {
            config.hierarchy = parse_hierarchy(v)?;
        }
        if let Some(v) = &self.returns {
            config.mode = parse_returns(v)?;
        }
        if let Some(v) = &self.quantizer {
            config.method = parse_quantizer(v)?;
        }
        if let Some(v) = self.sigma_k {
            config.sigma_k = v;
        }
        if let Some(v) = &self.scenario {
            config.scenario = parse_scenario(v)?;
        }
        if let Some(v) = &self.center {
            config.center_rule = parse_center(v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chaincast_core::LevelOverride;

    #[test]
    fn round_trip_is_lossless() {
        let mut config = ForecastConfig {
            states: 8,
            order: 3,
            delta: 0.125,
            n_min: 5,
            horizon: 32,
            hierarchy: HierarchyKind::SmoothProducts,
            mode: ReturnsMode::Absolute,
            method: QuantizerMethod::Combined,
            sigma_k: 2.5,
            scenario: ScenarioSelection::Upper,
            center_rule: CenterRule::MiddleState,
            ..ForecastConfig::default()
        };
        config.level_overrides.insert(
            4,
            LevelOverride {
                states: Some(2),
                order: Some(1),
            },
        );
        let text = write_config(&config);
        let mut parsed = ForecastConfig::default();
        apply_config_text(&mut parsed, &text).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let mut config = ForecastConfig::default();
        apply_config_text(&mut config, "# a comment\n\nstates = 6\n").unwrap();
        assert_eq!(config.states, 6);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut config = ForecastConfig::default();
        let err = apply_config_text(&mut config, "speed = 9\n").unwrap_err();
        assert_eq!(err.code(), "config_error");
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn bad_values_are_rejected() {
        let mut config = ForecastConfig::default();
        assert!(apply_config_text(&mut config, "states = many\n").is_err());
        assert!(apply_config_text(&mut config, "hierarchy = fib\n").is_err());
        assert!(apply_config_text(&mut config, "level.x.states = 2\n").is_err());
    }

    #[test]
    fn overlay_wins_over_file_values() {
        let mut config = ForecastConfig::default();
        apply_config_text(&mut config, "states = 6\norder = 4\n").unwrap();
        let overlay = ConfigOverlay {
            states: Some(3),
            ..ConfigOverlay::default()
        };
        overlay.apply(&mut config).unwrap();
        assert_eq!(config.states, 3);
        assert_eq!(config.order, 4);
    }
}
