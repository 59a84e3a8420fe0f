//! Report rendering. Floats use the shortest decimal that round-trips to the
//! same `f64`; non-finite values are written as `inf`, `-inf` or `NaN` (as
//! JSON strings in JSON output). Pair and state indices are 1-based.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::chernoff::{ConditionReport, PairwiseChernoff};
use crate::error::Result;
use crate::evaluation::{ExperimentTable, ExponentFit};
use crate::states::Ensemble;

pub const CSV_HEADER: &str =
    "n,n1,n2,err_sm,err_avg,rate,binary_bound,reference_level,overall_rhs,lemma_holds,overall_holds";

/// Shortest round-trip decimal; exponent notation for very small or large values.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format_float(x))
    }
}

fn json_pair((i, j): (usize, usize)) -> Value {
    json!([i + 1, j + 1])
}

fn condition_json(c: &ConditionReport) -> Value {
    json!({
        "pair": json_pair(c.pair),
        "xi_ij": json_float(c.xi_ij),
        "xi_bar": json_float(c.xi_bar),
        "mqcb": json_float(c.mqcb),
        "holds": c.holds,
        "margin": json_float(c.margin),
        "reference_level": json_float(c.reference_level()),
    })
}

fn to_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Pairwise distances, minimizers, the MQCB and the pair condition as JSON.
pub fn chernoff_report(ensemble: &Ensemble) -> Result<String> {
    let pw = PairwiseChernoff::compute(ensemble)?;
    Ok(to_text(&chernoff_json(ensemble, &pw)?))
}

fn chernoff_json(ensemble: &Ensemble, pw: &PairwiseChernoff) -> Result<Value> {
    let r = ensemble.len();
    let pairs: Vec<Value> = pw
        .pairs()
        .map(|(i, j)| {
            let res = pw.get(i, j).expect("valid pair");
            json!({
                "pair": json_pair((i, j)),
                "xi": json_float(res.xi),
                "s_star": json_float(res.s_star),
                "f_min": json_float(res.f_min),
            })
        })
        .collect();
    let matrix: Vec<Value> = (0..r)
        .map(|i| Value::Array((0..r).map(|j| json_float(pw.xi(i, j))).collect()))
        .collect();
    let m = pw.mqcb();
    let (xi_bar, condition) = if r >= 3 {
        let c = pw.condition()?;
        (json_float(c.xi_bar), condition_json(&c))
    } else {
        (Value::Null, Value::Null)
    };
    Ok(json!({
        "states": r,
        "dim": ensemble.dim(),
        "labels": ensemble.labels(),
        "xi_matrix": matrix,
        "pairs": pairs,
        "mqcb": {"value": json_float(m.value), "pair": json_pair(m.pair)},
        "xi_bar": xi_bar,
        "condition": condition,
    }))
}

pub fn table_csv(table: &ExperimentTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let reference = format_float(table.reference_level);
    for row in &table.rows {
        let (n1, n2) = row
            .split
            .map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        let fields = [
            row.n.to_string(),
            n1,
            n2,
            format_float(row.errors.err_sm),
            format_float(row.errors.err_avg),
            format_float(row.rate),
            format_float(row.binary_bound),
            reference.clone(),
            format_float(row.overall_rhs),
            row.lemma_holds.to_string(),
            row.overall_holds.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn fit_json(table: &ExperimentTable) -> Value {
    let e = &table.exponent;
    let (status, slope, points) = match e.fit {
        ExponentFit::Slope { slope, points } => ("slope", json_float(slope), json!(points)),
        ExponentFit::ExactDiscrimination => ("exact_discrimination", Value::Null, Value::Null),
        ExponentFit::TooFewPoints => ("too_few_points", Value::Null, Value::Null),
    };
    json!({
        "status": status,
        "fitted_slope": slope,
        "points": points,
        "k_fit": e.k_fit,
        "zero_rows": e.zero_rows,
    })
}

pub fn table_json(table: &ExperimentTable) -> String {
    let c = &table.config;
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let (n1, n2) = row.split.map_or((Value::Null, Value::Null), |(a, b)| (json!(a), json!(b)));
            let (s1, s2) = row
                .sub_err_sm
                .map_or((Value::Null, Value::Null), |(a, b)| (json_float(a), json_float(b)));
            json!({
                "n": row.n,
                "n1": n1,
                "n2": n2,
                "err_sm": json_float(row.errors.err_sm),
                "err_avg": json_float(row.errors.err_avg),
                "per_state_error": row.errors.per_state_error.iter().map(|&x| json_float(x)).collect::<Vec<_>>(),
                "rate": json_float(row.rate),
                "binary_err_sm": json_float(row.binary_err_sm),
                "binary_bound": json_float(row.binary_bound),
                "binary_holds": row.binary_holds,
                "reference_level": json_float(table.reference_level),
                "lemma_rhs": json_float(row.lemma_rhs),
                "lemma_holds": row.lemma_holds,
                "overall_rhs": json_float(row.overall_rhs),
                "overall_holds": row.overall_holds,
                "sub1_err_sm": s1,
                "sub2_err_sm": s2,
                "r_squared_gap": row.r_squared_gap.map_or(Value::Null, json_float),
                "min_eigenvalue": json_float(row.validity.min_eigenvalue),
                "identity_defect": json_float(row.validity.identity_defect),
            })
        })
        .collect();
    let value = json!({
        "config": {
            "n_min": c.n_min,
            "n_max": c.n_max,
            "n_step": c.n_step,
            "w1": json_float(c.w1),
            "sub": c.strategy.name(),
            "k_fit": c.k_fit,
            "dim_cap": c.dim_cap,
        },
        "order": table.order.iter().map(|k| k + 1).collect::<Vec<_>>(),
        "mqcb": {"value": json_float(table.mqcb.value), "pair": json_pair(table.mqcb.pair)},
        "condition": table.condition.as_ref().map_or(Value::Null, condition_json),
        "xi_12": json_float(table.xi_12),
        "reference_level": json_float(table.reference_level),
        "rows": rows,
        "fit": fit_json(table),
        "warnings": table.warnings,
    });
    to_text(&value)
}

/// One-line-per-fact summary printed alongside a written table.
pub fn table_summary(table: &ExperimentTable) -> String {
    let slope = match table.exponent.fit {
        ExponentFit::Slope { slope, .. } => format_float(slope),
        ExponentFit::ExactDiscrimination => "exact discrimination".to_string(),
        ExponentFit::TooFewPoints => "too few points".to_string(),
    };
    let (i, j) = table.mqcb.pair;
    format!(
        "mqcb {} at pair ({}, {})\nreference level {}\nfitted slope {}\n",
        format_float(table.mqcb.value),
        i + 1,
        j + 1,
        format_float(table.reference_level),
        slope
    )
}

/// Writes `bytes` to a temporary file next to `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
