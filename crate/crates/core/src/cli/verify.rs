//! Randomized invariant suites run by `mqcb verify`.

use crate::chernoff::{chernoff_curve, chernoff_distance};
use crate::detectors::{holevo_helstrom, pgm, wedge, Detector};
use crate::error::Result;
use crate::evaluation::lemma_bound_check;
use crate::linalg::{trace_norm, ComplexMatrix};
use crate::rng::SeededRng;
use crate::states::{random_density, DensityMatrix};

const WEDGE_TOL: f64 = 1e-10;
const GRID_STEP: f64 = 1e-4;
const GRID_TOL: f64 = 1e-6;
const QUBIT: usize = 2;

/// Factor applied to one element of each detector in fault-injection mode.
pub const FAULT_SCALE: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteCount {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifySummary {
    pub trials: usize,
    pub seed: u64,
    pub suites: Vec<SuiteCount>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }

    pub fn render(&self) -> String {
        let mut out = format!("trials {} seed {}\n", self.trials, self.seed);
        for s in &self.suites {
            out.push_str(&format!(
                "{}: {} passed, {} failed\n",
                s.name, s.passed, s.failed
            ));
        }
        out.push_str(if self.all_passed() { "PASS\n" } else { "FAIL\n" });
        out
    }
}

const SUITES: [&str; 5] = [
    "lemma",
    "r_squared",
    "povm_validity",
    "wedge_identity",
    "chernoff_grid",
];

/// Runs every suite `trials` times on qubit ensembles drawn from `seed`.
/// With `inject_fault`, one element of each checked detector is scaled by
/// [`FAULT_SCALE`] first, so the validity suite must fail.
pub fn run_verify(trials: usize, seed: u64, inject_fault: bool) -> VerifySummary {
    let mut suites: Vec<SuiteCount> = SUITES
        .iter()
        .map(|&name| SuiteCount {
            name,
            passed: 0,
            failed: 0,
        })
        .collect();
    let mut rng = SeededRng::new(seed);
    for _ in 0..trials {
        let outcome = run_trial(&mut rng, inject_fault);
        for (suite, ok) in suites.iter_mut().zip(outcome) {
            if ok {
                suite.passed += 1;
            } else {
                suite.failed += 1;
            }
        }
    }
    VerifySummary {
        trials,
        seed,
        suites,
    }
}

fn random_state(rng: &mut SeededRng) -> Result<DensityMatrix> {
    let rank = rng.int_in(1, QUBIT);
    random_density(QUBIT, rank, rng.next_u64())
}

/// Random PSD partials with `Σ E_i <= u I` for some `u ∈ [0.05, 0.95)`.
fn random_partials(rng: &mut SeededRng, count: usize) -> Result<Vec<ComplexMatrix>> {
    let total = rng.uniform_in(0.05, 0.95);
    let weights: Vec<f64> = (0..count).map(|_| rng.uniform_in(0.1, 1.0)).collect();
    let norm: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|w| Ok(random_state(rng)?.into_matrix().scale(total * w / norm)))
        .collect()
}

fn corrupt(det: &Detector) -> Detector {
    let mut elements = det.elements().to_vec();
    elements[0] = elements[0].scale(FAULT_SCALE);
    Detector::from_trusted(elements)
}

fn run_trial(rng: &mut SeededRng, inject_fault: bool) -> [bool; 5] {
    let r = rng.int_in(3, 4);
    let drawn = (|| -> Result<_> {
        let states = (0..r)
            .map(|_| random_state(rng))
            .collect::<Result<Vec<_>>>()?;
        let partials = random_partials(rng, r - 2)?;
        Ok((states, partials))
    })();
    let Ok((states, partials)) = drawn else {
        return [false; 5];
    };

    let (lemma_ok, r_squared_ok, composed) =
        match lemma_bound_check(&states[0], &states[1], &partials, &states[2..]) {
            Ok(check) => (check.holds, check.trace.r_squared_holds(), Some(check.detector)),
            Err(_) => (false, false, None),
        };

    let validity_ok = (|| -> Result<bool> {
        let mut detectors = vec![holevo_helstrom(&states[0], &states[1])?, pgm(&states)?];
        detectors.extend(composed);
        let mut ok = true;
        for det in &detectors {
            let det = if inject_fault { corrupt(det) } else { det.clone() };
            ok &= det.validity()?.is_valid();
        }
        Ok(ok)
    })()
    .unwrap_or(false);

    let wedge_ok = (|| -> Result<bool> {
        let w = wedge(&states[0], &states[1])?;
        let diff = states[0].matrix().try_sub(states[1].matrix())?;
        let expected = 1.0 - trace_norm(&diff)? / 2.0;
        Ok((w.trace().re - expected).abs() <= WEDGE_TOL)
    })()
    .unwrap_or(false);

    let grid_ok = chernoff_matches_grid(&states[0], &states[1]).unwrap_or(false);

    [lemma_ok, r_squared_ok, validity_ok, wedge_ok, grid_ok]
}

/// Compares the optimized distance with a grid minimum of the directly
/// evaluated curve `tr[ρ1^{1-s} ρ2^s]`.
pub fn chernoff_matches_grid(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<bool> {
    let xi = chernoff_distance(rho1, rho2)?.xi;
    let steps = (1.0 / GRID_STEP).round() as usize;
    let mut f_min = f64::INFINITY;
    for k in 0..=steps {
        f_min = f_min.min(chernoff_curve(rho1, rho2, k as f64 / steps as f64)?);
    }
    let grid_xi = -f_min.ln();
    Ok((xi - grid_xi).abs() <= GRID_TOL)
}
