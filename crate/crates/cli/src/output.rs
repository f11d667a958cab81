//! Plot-ready output files: forecast and ensemble CSVs, diagnostics and
//! error-report JSON, and the quantizer / transition-table export formats.
//!
//! Floats in CSVs are printed with 12 significant digits so identical runs
//! produce byte-identical files.

use std::path::Path;

use chaincast_core::eval::{EnsembleResult, QuantizationErrorReport};
use chaincast_core::multiscale::{Diagnostics, ForecastResult};
use chaincast_core::{Quantizer, ScenarioSelection, TransitionTable};
use serde_json::json;

use crate::config_file::{quantizer_name, returns_name};
use crate::error::CliError;

/// 12 significant digits, scientific notation: deterministic and exact
/// enough for byte-level reproducibility checks.
pub fn fmt_sig12(value: f64) -> String {
    format!("{value:.11e}")
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

/// The forecast CSV: `index,lower,upper,trend`, one row per point from the
/// anchor (index 0) to the effective horizon. Single-scenario selections
/// drop the other scenario's column.
pub fn forecast_csv(result: &ForecastResult, anchor_index: f64, selection: ScenarioSelection) -> String {
    let mut out = String::new();
    let (lower, upper) = match selection {
        ScenarioSelection::Lower => (true, false),
        ScenarioSelection::Upper => (false, true),
        ScenarioSelection::Both => (true, true),
    };
    out.push_str("index");
    if lower {
        out.push_str(",lower");
    }
    if upper {
        out.push_str(",upper");
    }
    out.push_str(",trend\n");
    for i in 0..result.lower.len() {
        out.push_str(&i.to_string());
        if lower {
            out.push(',');
            out.push_str(&fmt_sig12(result.lower[i]));
        }
        if upper {
            out.push(',');
            out.push_str(&fmt_sig12(result.upper[i]));
        }
        out.push(',');
        out.push_str(&fmt_sig12(result.trend.value_at(anchor_index + i as f64)));
        out.push('\n');
    }
    out
}

/// Reproducibility document for one quantizer.
pub fn quantizer_json(q: &Quantizer) -> serde_json::Value {
    json!({
        "states": q.states(),
        "boundaries": q.boundaries(),
        "means": q.means(),
        "counts": q.counts(),
        "method": quantizer_name(q.method()),
        "sigma_k": q.sigma_k(),
        "mode": returns_name(q.mode()),
        "step": q.step(),
    })
}

/// Rebuilds a quantizer from its JSON document.
pub fn quantizer_from_json(value: &serde_json::Value) -> Result<Quantizer, CliError> {
    let bad = |what: &str| CliError::config(format!("quantizer document: {what}"));
    let states = value["states"]
        .as_u64()
        .ok_or_else(|| bad("missing states"))? as usize;
    let floats = |key: &str| -> Result<Vec<f64>, CliError> {
        value[key]
            .as_array()
            .ok_or_else(|| bad("missing array"))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| bad("non-numeric entry")))
            .collect()
    };
    let boundaries = floats("boundaries")?;
    let means = floats("means")?;
    let counts: Vec<usize> = value["counts"]
        .as_array()
        .map(|a| {
            a.iter()
                .map(|v| v.as_u64().map(|x| x as usize).ok_or_else(|| bad("bad count")))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?
        .unwrap_or_default();
    let method = crate::config_file::parse_quantizer(
        value["method"].as_str().ok_or_else(|| bad("missing method"))?,
    )?;
    let sigma_k = value["sigma_k"].as_f64().unwrap_or(3.0);
    let mode = crate::config_file::parse_returns(
        value["mode"].as_str().ok_or_else(|| bad("missing mode"))?,
    )?;
    let step = value["step"].as_u64().ok_or_else(|| bad("missing step"))? as usize;
    Quantizer::from_parts(states, boundaries, means, counts, method, sigma_k, mode, step)
        .map_err(CliError::Engine)
}

/// The per-run diagnostics document: effective horizon, skipped levels,
/// bifurcation counts and each level's states, predictions and quantizer.
pub fn diagnostics_json(diag: &Diagnostics) -> serde_json::Value {
    json!({
        "requested_horizon": diag.requested_horizon,
        "effective_horizon": diag.effective_horizon,
        "skipped_steps": diag.skipped_steps,
        "bifurcation_count": diag.bifurcation_count(),
        "levels": diag.levels.iter().map(|l| json!({
            "step": l.step,
            "states": l.states,
            "order": l.order,
            "center": l.center,
            "quantizer": quantizer_json(&l.quantizer),
            "predicted_lower": l.predicted_lower,
            "predicted_upper": l.predicted_upper,
            "bifurcations_lower": l.bifurcations_lower,
            "bifurcations_upper": l.bifurcations_upper,
        })).collect::<Vec<_>>(),
    })
}

/// Diagnostic export of transition tables: one entry per level, each row a
/// history tuple with its next-state count vector, in deterministic order.
pub fn transition_tables_json(levels: &[(usize, TransitionTable)]) -> serde_json::Value {
    json!({
        "levels": levels.iter().map(|(step, table)| json!({
            "step": step,
            "order": table.order(),
            "alphabet": table.alphabet(),
            "rows": table.rows().map(|(history, counts)| json!({
                "history": history,
                "counts": counts,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// The quantization-error report as JSON.
pub fn qerror_json(report: &QuantizationErrorReport) -> serde_json::Value {
    json!({
        "span": report.span,
        "per_level": report.per_level.iter().map(|l| json!({
            "step": l.step,
            "max_abs": l.stats.max_abs,
            "rms": l.stats.rms,
        })).collect::<Vec<_>>(),
        "spliced": {
            "max_abs": report.spliced.max_abs,
            "rms": report.spliced.rms,
        },
        "skipped_steps": report.skipped_steps,
    })
}

/// Ensemble CSV: `index,m<len>...,mean,std`.
pub fn ensemble_csv(result: &EnsembleResult) -> String {
    let mut out = String::from("index");
    for m in &result.members {
        out.push_str(&format!(",m{}", m.learning_length));
    }
    out.push_str(",mean,std\n");
    for i in 0..result.mean.len() {
        out.push_str(&i.to_string());
        for m in &result.members {
            out.push(',');
            out.push_str(&fmt_sig12(m.values[i]));
        }
        out.push(',');
        out.push_str(&fmt_sig12(result.mean[i]));
        out.push(',');
        out.push_str(&fmt_sig12(result.std[i]));
        out.push('\n');
    }
    out
}

/// Aggregate CSV: `index,weighted_mean`.
pub fn aggregate_csv(values: &[f64]) -> String {
    let mut out = String::from("index,weighted_mean\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_sig12(*v)));
    }
    out
}

pub fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    write_file(path, content)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    text.push('\n');
    write_file(path, &text)
}
