//! Seeded scenario generators.

use crate::chernoff::{theorem_condition, PairwiseChernoff};
use crate::error::{Error, Result};
use crate::states::{Ensemble, DISTINCT_TOL};

use super::scenario::{MixOther, ScenarioFile, StateSpec, SCENARIO_VERSION};

/// Bisection steps allowed when calibrating the mixing weight.
pub const CALIBRATION_STEPS: usize = 60;

/// The generated pair distance aims at this fraction of `ξ̄ / 6`.
const CALIBRATION_TARGET: f64 = 0.85;

/// Required relative margin `(ξ̄/6 - ξ12) / (ξ̄/6)` of a generated scenario.
pub const MIN_RELATIVE_MARGIN: f64 = 0.1;

/// Uniform weight of the equidistant classical family.
const EQUIDISTANT_BLEND: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    ConditionSatisfying,
    EquidistantClassical,
    Random,
}

impl GenKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ConditionSatisfying => "condition-satisfying",
            Self::EquidistantClassical => "equidistant-classical",
            Self::Random => "random",
        }
    }
}

impl std::str::FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "condition-satisfying" => Ok(Self::ConditionSatisfying),
            "equidistant-classical" => Ok(Self::EquidistantClassical),
            "random" => Ok(Self::Random),
            other => Err(Error::InvalidArgument(format!(
                "unknown scenario kind '{other}' (expected condition-satisfying, equidistant-classical or random)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    /// Number of states.
    pub r: usize,
    pub dim: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            r: 3,
            dim: 2,
            seed: 7,
        }
    }
}

pub fn generate(kind: GenKind, params: GenParams) -> Result<ScenarioFile> {
    if params.r < 2 || params.dim < 1 {
        return Err(Error::InvalidArgument(format!(
            "need r >= 2 and d >= 1, got r = {}, d = {}",
            params.r, params.dim
        )));
    }
    let file = match kind {
        GenKind::ConditionSatisfying => condition_satisfying(params)?,
        GenKind::EquidistantClassical => equidistant_classical(params)?,
        GenKind::Random => random_scenario(params),
    };
    // Everything written must load back.
    file.to_ensemble().map_err(|e| match e {
        super::scenario::ScenarioError::Invalid { source, .. } => source,
        other => Error::CalibrationFailed(other.to_string()),
    })?;
    Ok(file)
}

fn random_spec(dim: usize, seed: u64) -> StateSpec {
    StateSpec::Random { rank: dim, seed }
}

fn scenario(dim: usize, states: Vec<StateSpec>) -> ScenarioFile {
    ScenarioFile {
        version: SCENARIO_VERSION,
        dim,
        states,
        labels: None,
    }
}

/// `r` full-rank random states with seeds `seed, seed + 1, ...`.
fn random_scenario(p: GenParams) -> ScenarioFile {
    scenario(
        p.dim,
        (0..p.r as u64).map(|k| random_spec(p.dim, p.seed.wrapping_add(k))).collect(),
    )
}

/// `p_k = (1 - t) e_k + t u` with `u` uniform: every pair differs only in two
/// coordinates, symmetrically, so all pairwise distances coincide.
fn equidistant_classical(p: GenParams) -> Result<ScenarioFile> {
    if p.dim < p.r || p.r < 3 {
        return Err(Error::InvalidArgument(format!(
            "equidistant classical states need r >= 3 and d >= r (got r = {}, d = {}); \
             on a two-point alphabet Chernoff distance grows with separation, so three \
             distinct states can never be equidistant",
            p.r, p.dim
        )));
    }
    let t = EQUIDISTANT_BLEND;
    let uniform = t / p.dim as f64;
    let states = (0..p.r)
        .map(|k| {
            let mut v = vec![uniform; p.dim];
            v[k] += 1.0 - t;
            StateSpec::Classical(v)
        })
        .collect();
    Ok(scenario(p.dim, states))
}

/// Draws `ρ1, σ, ρ3..ρr` from consecutive seeds, then picks the largest
/// `ε` found by bisection with `ξ(ρ1, ρ2) <= 0.85 ξ̄ / 6` for
/// `ρ2 = (1 - ε) ρ1 + ε σ`.
fn condition_satisfying(p: GenParams) -> Result<ScenarioFile> {
    if p.r < 3 {
        return Err(Error::InvalidArgument(format!(
            "the pair condition needs r >= 3, got {}",
            p.r
        )));
    }
    let base = random_spec(p.dim, p.seed);
    let other = random_spec(p.dim, p.seed.wrapping_add(1));
    let rest: Vec<StateSpec> = (2..p.r as u64)
        .map(|k| random_spec(p.dim, p.seed.wrapping_add(k)))
        .collect();
    let with_epsilon = |epsilon: f64| {
        let mut states = vec![
            base.clone(),
            StateSpec::Mix {
                base: 0,
                other: MixOther::Spec(Box::new(other.clone())),
                epsilon,
            },
        ];
        states.extend(rest.iter().cloned());
        scenario(p.dim, states)
    };

    // Some(distance gap) when the states are distinct; feasible when gap >= 0.
    let evaluate = |epsilon: f64| -> Result<Option<f64>> {
        let file = with_epsilon(epsilon);
        let ensemble = match file.to_ensemble() {
            Ok(e) => e,
            Err(super::scenario::ScenarioError::Invalid {
                source: Error::NotDistinct(..),
                ..
            }) => return Ok(None),
            Err(e) => return Err(Error::CalibrationFailed(e.to_string())),
        };
        let pw = PairwiseChernoff::compute(&ensemble)?;
        let xi_bar = pw.xi_bar(0, 1)?;
        Ok(Some(CALIBRATION_TARGET * xi_bar / 6.0 - pw.xi(0, 1)))
    };

    let feasible = |g: Option<f64>| matches!(g, Some(gap) if gap >= 0.0);
    let epsilon = if feasible(evaluate(1.0)?) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..CALIBRATION_STEPS {
            let mid = 0.5 * (lo + hi);
            if feasible(evaluate(mid)?) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if epsilon == 0.0 {
        return Err(Error::CalibrationFailed(format!(
            "no mixing weight in (0, 1] satisfies the condition after {CALIBRATION_STEPS} bisection steps"
        )));
    }
    let file = with_epsilon(epsilon);
    let ensemble = file
        .to_ensemble()
        .map_err(|e| Error::CalibrationFailed(e.to_string()))?;
    verify_condition(&ensemble)?;
    Ok(file)
}

/// Re-checks a generated ensemble: the condition holds at pair `(0, 1)` with
/// at least the required relative margin, and the pair states are distinct.
pub fn verify_condition(ensemble: &Ensemble) -> Result<()> {
    let report = theorem_condition(ensemble)?;
    let sixth = report.xi_bar / 6.0;
    let diff = ensemble
        .state(0)
        .matrix()
        .try_sub(ensemble.state(1).matrix())?
        .frobenius_norm();
    if report.pair != (0, 1)
        || !report.holds
        || report.margin < MIN_RELATIVE_MARGIN * sixth
        || diff <= DISTINCT_TOL
    {
        return Err(Error::CalibrationFailed(format!(
            "generated ensemble fails the check: pair {:?}, xi_12 {}, xi_bar/6 {}, margin {}",
            report.pair, report.xi_ij, sixth, report.margin
        )));
    }
    Ok(())
}
