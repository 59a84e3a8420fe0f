//! Scenario files: a JSON description of an ensemble.
//!
//! ```json
//! {
//!   "version": 1,
//!   "dim": 2,
//!   "states": [
//!     {"random": {"rank": 2, "seed": 7}},
//!     {"mix": {"base": 0, "other": {"random": {"rank": 2, "seed": 8}}, "epsilon": 0.25}},
//!     {"pure": [[1, 0], [0, 0]]},
//!     {"classical": [0.5, 0.5]},
//!     {"matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}
//!   ],
//!   "labels": ["a", "b", "c", "d", "e"]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. `mix.base` and an integer `mix.other`
//! are 0-based indices of earlier states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix};
use crate::states::{
    classical_state, density_from_matrix, pure_state, random_density, DensityMatrix, Ensemble,
};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub dim: usize,
    pub states: Vec<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Matrix(Vec<Vec<[f64; 2]>>),
    Pure(Vec<[f64; 2]>),
    Classical(Vec<f64>),
    Random { rank: usize, seed: u64 },
    Mix {
        base: usize,
        other: MixOther,
        epsilon: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MixOther {
    Index(usize),
    Spec(Box<StateSpec>),
}

/// A scenario that failed to load.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    /// Malformed JSON or a schema violation.
    #[error("{0}")]
    Parse(String),
    /// Well-formed but describes an invalid ensemble.
    #[error("{context}: {source}")]
    Invalid { context: String, source: Error },
}

fn invalid(context: impl Into<String>) -> impl FnOnce(Error) -> ScenarioError {
    let context = context.into();
    move |source| ScenarioError::Invalid { context, source }
}

fn complex(z: &[f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

impl ScenarioFile {
    pub fn parse(text: &str) -> std::result::Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
            ScenarioError::Parse(format!(
                "line {}, column {}: {}",
                e.line(),
                e.column(),
                e
            ))
        })?;
        if file.version != SCENARIO_VERSION {
            return Err(ScenarioError::Parse(format!(
                "field `version`: unsupported scenario version {} (expected {SCENARIO_VERSION})",
                file.version
            )));
        }
        Ok(file)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn to_ensemble(&self) -> std::result::Result<Ensemble, ScenarioError> {
        if self.dim == 0 {
            return Err(invalid("field `dim`")(Error::InvalidArgument(
                "dimension must be positive".into(),
            )));
        }
        let mut built: Vec<DensityMatrix> = Vec::with_capacity(self.states.len());
        for (k, spec) in self.states.iter().enumerate() {
            let state = build_state(spec, self.dim, &built).map_err(invalid(format!("states[{k}]")))?;
            built.push(state);
        }
        let ensemble = Ensemble::new(built).map_err(invalid("field `states`"))?;
        match &self.labels {
            Some(labels) => ensemble
                .with_labels(labels.clone())
                .map_err(invalid("field `labels`")),
            None => Ok(ensemble),
        }
    }
}

fn check_len(found: usize, dim: usize) -> Result<()> {
    if found != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found,
        });
    }
    Ok(())
}

fn build_state(spec: &StateSpec, dim: usize, earlier: &[DensityMatrix]) -> Result<DensityMatrix> {
    match spec {
        StateSpec::Matrix(rows) => {
            check_len(rows.len(), dim)?;
            let rows: Vec<Vec<Complex64>> = rows
                .iter()
                .map(|row| {
                    check_len(row.len(), dim)?;
                    Ok(row.iter().map(complex).collect())
                })
                .collect::<Result<_>>()?;
            density_from_matrix(ComplexMatrix::from_rows(&rows)?)
        }
        StateSpec::Pure(v) => {
            check_len(v.len(), dim)?;
            pure_state(&v.iter().map(complex).collect::<Vec<_>>())
        }
        StateSpec::Classical(p) => {
            check_len(p.len(), dim)?;
            classical_state(p)
        }
        StateSpec::Random { rank, seed } => random_density(dim, *rank, *seed),
        StateSpec::Mix {
            base,
            other,
            epsilon,
        } => {
            let base = earlier_state(earlier, *base)?;
            let other = match other {
                MixOther::Index(i) => earlier_state(earlier, *i)?.clone(),
                MixOther::Spec(spec) => build_state(spec, dim, earlier)?,
            };
            base.mix(&other, *epsilon)
        }
    }
}

fn earlier_state(earlier: &[DensityMatrix], index: usize) -> Result<&DensityMatrix> {
    earlier.get(index).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "mix refers to state {index}, but only {} earlier states exist",
            earlier.len()
        ))
    })
}
