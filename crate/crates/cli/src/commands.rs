//! Command implementations. Each returns the status lines to print on
//! success; errors carry their own exit codes and JSON rendering.

use std::path::{Path, PathBuf};

use chaincast_core::eval::{quantization_error, walk_forward, weighted_mean, WeightSet};
use chaincast_core::markov::{estimate_transitions, Scenario};
use chaincast_core::multiscale::{build_hierarchy, forecast};
use chaincast_core::quantizer::{build_quantizer, classify};
use chaincast_core::series::{compute_returns, normalize};
use chaincast_core::{ForecastConfig, PriceSeries, ScenarioSelection, TransitionTable};

use crate::cli::{AggregateArgs, Cli, Command, EnsembleArgs, ForecastArgs, ModelArgs, QerrorArgs};
use crate::config_file::{apply_config_file, ConfigOverlay};
use crate::error::CliError;
use crate::ingest::{ingest_csv, IngestOptions};
use crate::output;

pub fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    match cli.command {
        Command::Forecast(args) => run_forecast(args),
        Command::Qerror(args) => run_qerror(args),
        Command::Ensemble(args) => run_ensemble(args),
        Command::Aggregate(args) => run_aggregate(args),
    }
}

fn delimiter_byte(text: &str) -> Result<u8, CliError> {
    let bytes = text.as_bytes();
    if bytes.len() != 1 {
        return Err(CliError::config(format!(
            "delimiter must be a single character, got '{text}'"
        )));
    }
    Ok(bytes[0])
}

/// Defaults, overridden by the config file, overridden by explicit flags.
pub fn resolve_config(model: &ModelArgs) -> Result<ForecastConfig, CliError> {
    let mut config = ForecastConfig::default();
    if let Some(path) = &model.config {
        apply_config_file(&mut config, path)?;
    }
    let overlay = ConfigOverlay {
        states: model.states,
        order: model.order,
        delta: model.delta,
        n_min: model.nmin,
        horizon: model.horizon,
        hierarchy: model.hierarchy.clone(),
        returns: model.returns.clone(),
        quantizer: model.quantizer.clone(),
        sigma_k: model.sigma_k,
        scenario: model.scenario.clone(),
        center: model.center.clone(),
    };
    overlay.apply(&mut config)?;
    config.validate()?;
    Ok(config)
}

fn ingest(input: &Path, column: &Option<String>, delimiter: &str) -> Result<PriceSeries, CliError> {
    let opts = IngestOptions::new(column.clone(), delimiter_byte(delimiter)?);
    ingest_csv(input, &opts)
}

fn diagnostics_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    name.push_str(".diagnostics.json");
    out.with_file_name(name)
}

fn run_forecast(args: ForecastArgs) -> Result<Vec<String>, CliError> {
    let config = resolve_config(&args.model)?;
    let series = ingest(&args.input.input, &args.input.column, &args.input.delimiter)?;
    let result = forecast(&series, &config)?;

    let anchor_index = (series.len() - 1) as f64;
    output::write_text(
        &args.out,
        &output::forecast_csv(&result, anchor_index, config.scenario),
    )?;
    let diag_path = diagnostics_path(&args.out);
    output::write_json(&diag_path, &output::diagnostics_json(&result.diagnostics))?;

    let mut messages = vec![format!(
        "effective horizon: {} (requested {})",
        result.diagnostics.effective_horizon, result.diagnostics.requested_horizon
    )];
    if !result.diagnostics.skipped_steps.is_empty() {
        messages.push(format!(
            "warning: skipped levels not dividing the horizon: {:?}",
            result.diagnostics.skipped_steps
        ));
    }
    let bifurcations = result.diagnostics.bifurcation_count();
    if bifurcations > 0 {
        messages.push(format!("bifurcation points resolved: {bifurcations}"));
    }
    if let Some(dump) = &args.dump_transitions {
        let tables = level_tables(&series, &config, result.diagnostics.effective_horizon)?;
        output::write_json(dump, &output::transition_tables_json(&tables))?;
        messages.push(format!("wrote {}", dump.display()));
    }
    messages.push(format!("wrote {}", args.out.display()));
    messages.push(format!("wrote {}", diag_path.display()));
    Ok(messages)
}

/// Rebuilds each level's transition table for the diagnostic dump, on the
/// same block grid the forecast used.
fn level_tables(
    series: &PriceSeries,
    config: &ForecastConfig,
    effective: usize,
) -> Result<Vec<(usize, TransitionTable)>, CliError> {
    let hierarchy = build_hierarchy(config.horizon, config.hierarchy);
    let mut tables = Vec::new();
    for &step in hierarchy.steps() {
        if effective % step != 0 {
            continue;
        }
        let (s, r) = config.level_params(step);
        let phase = (series.len() - 1) % step;
        let returns = compute_returns(series, step, config.mode)
            .map_err(|e| e.at_level(step))?
            .subsample(phase);
        let quantizer = build_quantizer(&returns, s, config.method, config.sigma_k)
            .map_err(|e| e.at_level(step))?;
        let states = classify(&returns, &quantizer).map_err(|e| e.at_level(step))?;
        let table = estimate_transitions(&states, r).map_err(|e| e.at_level(step))?;
        tables.push((step, table));
    }
    Ok(tables)
}

fn run_qerror(args: QerrorArgs) -> Result<Vec<String>, CliError> {
    let config = resolve_config(&args.model)?;
    let series = ingest(&args.input.input, &args.input.column, &args.input.delimiter)?;
    let report = quantization_error(&series, &config)?;
    output::write_json(&args.out, &output::qerror_json(&report))?;
    let mut messages = vec![format!("evaluation span: {} points", report.span)];
    for level in &report.per_level {
        messages.push(format!(
            "level dt={}: max abs {} rms {}",
            level.step,
            output::fmt_sig12(level.stats.max_abs),
            output::fmt_sig12(level.stats.rms)
        ));
    }
    messages.push(format!(
        "spliced: max abs {} rms {}",
        output::fmt_sig12(report.spliced.max_abs),
        output::fmt_sig12(report.spliced.rms)
    ));
    messages.push(format!("wrote {}", args.out.display()));
    Ok(messages)
}

fn parse_learning_lengths(text: &str) -> Result<Vec<usize>, CliError> {
    let lengths: Result<Vec<usize>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect();
    let lengths = lengths
        .map_err(|_| CliError::config(format!("invalid learning lengths '{text}'")))?;
    if lengths.is_empty() {
        return Err(CliError::config("no learning lengths given"));
    }
    Ok(lengths)
}

fn run_ensemble(args: EnsembleArgs) -> Result<Vec<String>, CliError> {
    let config = resolve_config(&args.model)?;
    let lengths = parse_learning_lengths(&args.learning_lengths)?;
    let series = ingest(&args.input.input, &args.input.column, &args.input.delimiter)?;

    let mut messages = Vec::new();
    // an ensemble member is a single series; "both" collapses to lower
    let scenario = match config.scenario {
        ScenarioSelection::Upper => Scenario::Upper,
        ScenarioSelection::Lower => Scenario::Lower,
        ScenarioSelection::Both => {
            messages.push("scenario 'both' is not applicable to ensembles; using lower".into());
            Scenario::Lower
        }
    };
    let result = walk_forward(&series, &lengths, &config, scenario)?;
    for warning in &result.warnings {
        messages.push(format!(
            "warning: learning length {} skipped: {}",
            warning.learning_length, warning.message
        ));
    }
    output::write_text(&args.out, &output::ensemble_csv(&result))?;
    messages.push(format!("members: {}", result.members.len()));
    messages.push(format!("wrote {}", args.out.display()));
    Ok(messages)
}

fn read_weights(path: &Path, expected: usize) -> Result<WeightSet, CliError> {
    let raw = std::fs::read_to_string(path).map_err(|_| CliError::InputNotFound {
        path: path.to_path_buf(),
    })?;
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((label, weight)) = line.split_once(',') else {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                row: Some(i + 1),
                detail: "expected 'label,weight'".into(),
            });
        };
        let weight = weight.trim();
        match weight.parse::<f64>() {
            Ok(w) => {
                labels.push(label.trim().to_string());
                weights.push(w);
            }
            Err(_) if i == 0 => continue, // header row
            Err(_) => {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    row: Some(i + 1),
                    detail: format!("'{weight}' is not a number"),
                })
            }
        }
    }
    if labels.len() != expected {
        return Err(CliError::config(format!(
            "weights file has {} entries but {} inputs were given",
            labels.len(),
            expected
        )));
    }
    WeightSet::new(labels, weights).map_err(CliError::Engine)
}

fn run_aggregate(args: AggregateArgs) -> Result<Vec<String>, CliError> {
    if args.input.len() < 2 {
        return Err(CliError::config("aggregate needs at least two --input files"));
    }
    let mut normalized = Vec::new();
    for path in &args.input {
        let series = ingest(path, &args.column, &args.delimiter)?;
        normalized.push(normalize(series.values())?);
    }
    let weights = match &args.weights {
        Some(path) => read_weights(path, normalized.len())?,
        None => WeightSet::new(
            args.input
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
            vec![1.0; normalized.len()],
        )
        .map_err(CliError::Engine)?,
    };
    let slices: Vec<&[f64]> = normalized.iter().map(Vec::as_slice).collect();
    let mean = weighted_mean(&slices, &weights)?;
    output::write_text(&args.out, &output::aggregate_csv(&mean))?;
    Ok(vec![
        format!("aggregated {} series", normalized.len()),
        format!("wrote {}", args.out.display()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_precedence_flags_over_file_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "states = 6\nhorizon = 32\ndelta = 0.1\n").unwrap();
        let model = ModelArgs {
            config: Some(path),
            states: Some(3),
            ..ModelArgs::default()
        };
        let config = resolve_config(&model).unwrap();
        assert_eq!(config.states, 3); // flag beats file
        assert_eq!(config.horizon, 32); // file beats default
        assert_eq!(config.delta, 0.1);
        assert_eq!(config.order, 2); // untouched default
    }

    #[test]
    fn invalid_flag_values_are_config_errors() {
        let model = ModelArgs {
            hierarchy: Some("fib".into()),
            ..ModelArgs::default()
        };
        let err = resolve_config(&model).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn learning_lengths_parse() {
        assert_eq!(parse_learning_lengths("256, 384,512").unwrap(), vec![256, 384, 512]);
        assert!(parse_learning_lengths("a,b").is_err());
    }

    #[test]
    fn weights_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        std::fs::write(&path, "label,weight\nus,3.0\nuk,1.0\n").unwrap();
        let w = read_weights(&path, 2).unwrap();
        assert_eq!(w.weights(), &[3.0, 1.0]);
        assert_eq!(w.labels(), &["us".to_string(), "uk".to_string()]);
        assert!(read_weights(&path, 3).is_err());
    }
}
