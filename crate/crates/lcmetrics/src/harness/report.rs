//! Deterministic CSV and text reports for sweep outputs.
//!
//! Column order is fixed: `pair_id, n, t`, then the requested metrics in
//! alphabetical order, then the bound slack columns in alphabetical order.
//! Values are formatted with a fixed `{:.12e}` so a rerun with the same
//! config produces byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;

use super::sweep::{ExperimentRecord, SweepOutput};
use crate::bounds::BoundCheck;
use crate::error::Result;

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn metric_columns(records: &[ExperimentRecord]) -> Vec<String> {
    let mut cols: Vec<String> = records
        .first()
        .map(|r| r.metrics.keys().cloned().collect())
        .unwrap_or_default();
    cols.sort();
    cols
}

fn bound_columns(records: &[ExperimentRecord]) -> Vec<String> {
    let mut cols: Vec<String> = records
        .first()
        .map(|r| r.bounds.keys().cloned().collect())
        .unwrap_or_default();
    cols.sort();
    cols
}

/// The per-(pair, t) records table.
pub fn records_csv(output: &SweepOutput) -> Result<String> {
    let metrics = metric_columns(&output.records);
    let bounds = bound_columns(&output.records);
    let mut w = csv::Writer::from_writer(Vec::new());

    let mut header = vec!["pair_id".to_string(), "n".to_string(), "t".to_string()];
    header.extend(metrics.iter().cloned());
    header.extend(bounds.iter().map(|b| format!("slack:{b}")));
    w.write_record(&header)?;

    for r in &output.records {
        let mut row = vec![
            r.pair_id.clone(),
            r.n.to_string(),
            r.t.map(fmt).unwrap_or_default(),
        ];
        for m in &metrics {
            row.push(
                r.metrics
                    .get(m)
                    .and_then(|v| v.as_ref())
                    .map(|v| fmt(v.value))
                    .unwrap_or_default(),
            );
        }
        for b in &bounds {
            row.push(
                r.bounds
                    .get(b)
                    .and_then(|v| v.as_ref())
                    .map(|c| fmt(c.slack))
                    .unwrap_or_default(),
            );
        }
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf8"))
}

fn slack_quantiles(slacks: &mut [f64]) -> [f64; 5] {
    slacks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| -> f64 {
        if slacks.is_empty() {
            return f64::NAN;
        }
        let idx = ((slacks.len() - 1) as f64 * p).round() as usize;
        slacks[idx]
    };
    [q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)]
}

/// Per bound id: fitted constant, argmax instance, slack quantiles.
pub fn fit_report_csv(output: &SweepOutput) -> Result<String> {
    // group every check (pair-level and member-level) by bound column id
    let mut groups: BTreeMap<String, Vec<&BoundCheck>> = BTreeMap::new();
    for r in &output.records {
        for (col, check) in &r.bounds {
            if let Some(c) = check {
                groups.entry(col.clone()).or_default().push(c);
            }
        }
    }
    for c in &output.member_checks {
        groups.entry(c.bound_id.clone()).or_default().push(c);
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "bound_id",
        "fitted_constant",
        "instances",
        "vacuous",
        "holds",
        "argmax_inputs",
        "slack_min",
        "slack_q25",
        "slack_median",
        "slack_q75",
        "slack_max",
    ])?;
    for (col, checks) in &groups {
        let vacuous = checks.iter().filter(|c| c.vacuous).count();
        let holds = checks.iter().filter(|c| c.holds).count();
        let fitted = output
            .fitted_constants
            .get(col)
            .copied()
            .flatten()
            .or_else(|| checks.iter().find_map(|c| c.fitted_constant));
        let fitted_cell = match fitted {
            Some(c) => fmt(c),
            None if vacuous == checks.len() => "vacuous".to_string(),
            None => String::new(),
        };
        // the instance whose ratio pinned the constant (max ratio)
        let argmax = checks
            .iter()
            .filter(|c| c.ratio.is_some())
            .max_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap())
            .map(|c| c.inputs.clone())
            .unwrap_or_default();
        let mut slacks: Vec<f64> = checks
            .iter()
            .filter(|c| !c.vacuous && c.slack.is_finite())
            .map(|c| c.slack)
            .collect();
        let q = slack_quantiles(&mut slacks);
        w.write_record([
            col.clone(),
            fitted_cell,
            checks.len().to_string(),
            vacuous.to_string(),
            holds.to_string(),
            argmax,
            fmt(q[0]),
            fmt(q[1]),
            fmt(q[2]),
            fmt(q[3]),
            fmt(q[4]),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf8"))
}

/// Human-readable run summary.
pub fn summary_text(output: &SweepOutput) -> String {
    let mut s = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(s, "sweep: {} records, seed {}", output.records.len(), output.config.seed);
    let _ = writeln!(
        s,
        "suite: {} specs, mc_samples {}, grid {}, tolerance {:.1e}",
        output.config.suite.len(),
        output.config.mc_samples,
        output.config.grid_size,
        output.config.tolerance
    );
    let _ = writeln!(s, "\nfitted constants:");
    for (id, c) in &output.fitted_constants {
        match c {
            Some(c) => {
                let _ = writeln!(s, "  {id:<24} {c:.6}");
            }
            None => {
                let _ = writeln!(s, "  {id:<24} vacuous");
            }
        }
    }
    let mut failures = Vec::new();
    for r in &output.records {
        for c in r.bounds.values().flatten() {
            if !c.holds && !c.vacuous {
                failures.push(format!("{} on {}", c.bound_id, c.inputs));
            }
        }
    }
    for c in &output.member_checks {
        if !c.holds && !c.vacuous {
            failures.push(format!("{} on {}", c.bound_id, c.inputs));
        }
    }
    if failures.is_empty() {
        let _ = writeln!(s, "\nall bound checks hold");
    } else {
        let _ = writeln!(s, "\nFAILURES ({}):", failures.len());
        for f in failures {
            let _ = writeln!(s, "  {f}");
        }
    }
    s
}

/// Write records.csv, records.json, fit_report.csv, and summary.txt into
/// `dir`, creating it if needed.
pub fn write_outputs(output: &SweepOutput, dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let csv = records_csv(output)?;
    std::fs::write(dir.join("records.csv"), csv)?;
    let json = serde_json::to_string_pretty(output)?;
    std::fs::write(dir.join("records.json"), json)?;
    let fit = fit_report_csv(output)?;
    std::fs::write(dir.join("fit_report.csv"), fit)?;
    let mut f = std::fs::File::create(dir.join("summary.txt"))?;
    f.write_all(summary_text(output).as_bytes())?;
    Ok(())
}
