//! Exact error probabilities on tensor-power ensembles, the inequality checks
//! behind the split detector, and error-exponent estimation.

use crate::chernoff::{chernoff_distance, ConditionReport, Mqcb, PairwiseChernoff};
use crate::detectors::{
    binary_error_sum, build_split_detector, compose_with_binary, holevo_helstrom, split_sizes,
    wedge_with, CompositionTrace, Detector, DetectorValidity, SplitDetector, SubDetectorStrategy,
};
use crate::error::{Error, Result};
use crate::linalg::{real_trace, ComplexMatrix};
use crate::states::{power_dim, DensityMatrix, Ensemble, DEFAULT_DIM_CAP};

/// Slack on the checked inequalities (`lhs <= rhs + BOUND_TOL`).
pub const BOUND_TOL: f64 = 1e-9;

/// Slack on `err_sm(n) <= exp(-n ξ)`.
pub const BINARY_BOUND_TOL: f64 = 1e-12;

/// Error sums at or below this are exact discrimination, not a decay sample.
pub const EXACT_ZERO_TOL: f64 = 1e-14;

/// A fitted slope above the MQCB by more than this is flagged.
pub const SLOPE_WARNING_TOL: f64 = 1e-6;

pub const DEFAULT_K_FIT: usize = 4;
pub const DEFAULT_W1: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    /// `tr[ρ_i^{⊗n} (I - E_i)]`.
    pub per_state_error: Vec<f64>,
    pub err_sm: f64,
    /// `err_sm / r`.
    pub err_avg: f64,
    pub succ_sm: f64,
}

impl ErrorReport {
    fn from_success(n: usize, success: &[f64]) -> Self {
        let per_state_error: Vec<f64> = success.iter().map(|p| 1.0 - p).collect();
        let err_sm: f64 = per_state_error.iter().sum();
        Self {
            n,
            err_avg: err_sm / success.len() as f64,
            succ_sm: success.iter().sum(),
            per_state_error,
            err_sm,
        }
    }
}

/// Per-state and total error of `detector` on `ensemble^{⊗n}`.
pub fn error_sum(
    ensemble: &Ensemble,
    n: usize,
    detector: &Detector,
    dim_cap: usize,
) -> Result<ErrorReport> {
    let dim = power_dim(ensemble.dim(), n, dim_cap)?;
    if detector.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: detector.dim(),
        });
    }
    let powered = ensemble.tensor_powers(n, dim_cap)?;
    error_report(n, &powered, detector)
}

fn error_report(n: usize, powered: &[DensityMatrix], detector: &Detector) -> Result<ErrorReport> {
    Ok(ErrorReport::from_success(
        n,
        &detector.success_probabilities(powered)?,
    ))
}

/// The three terms of the composition bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaTerms {
    /// `tr[ρ1 ∧ ρ2]`.
    pub wedge_trace: f64,
    /// `2 tr[ρ1 ∧ ρ2]`.
    pub term_wedge: f64,
    /// `2 tr[(ρ1 + ρ2) Ẽ3]`.
    pub term_partials: f64,
    /// `Σ_{i≥3} tr[ρ_i (I - E_i)]`.
    pub term_rest: f64,
}

impl LemmaTerms {
    pub fn rhs(&self) -> f64 {
        self.term_wedge + self.term_partials + self.term_rest
    }
}

#[derive(Clone, Debug)]
pub struct LemmaCheck {
    /// Error sum of the composed detector.
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub terms: LemmaTerms,
    pub detector: Detector,
    pub trace: CompositionTrace,
}

/// Evaluates the composition bound `Err_sm <= 2 tr[ρ1∧ρ2] + 2 tr[(ρ1+ρ2)Ẽ3] +
/// Σ_{i≥3} tr[ρ_i (I - E_i)]` for the detector built from the Holevo-Helstrom
/// test of `(ρ1, ρ2)` and the given partial elements; `rest[k]` pairs with `partials[k]`.
pub fn lemma_bound_check(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    partials: &[ComplexMatrix],
    rest: &[DensityMatrix],
) -> Result<LemmaCheck> {
    if partials.len() != rest.len() {
        return Err(Error::DimensionMismatch {
            expected: rest.len(),
            found: partials.len(),
        });
    }
    let hh = holevo_helstrom(rho1, rho2)?;
    let wedge_trace = real_trace(wedge_with(rho1, rho2, &hh)?.trace(), "tr[rho1 ∧ rho2]")?;
    let (detector, trace) = compose_with_binary(partials, &hh)?;
    let mut states = vec![rho1.clone(), rho2.clone()];
    states.extend(rest.iter().cloned());
    let (lhs, terms) = lemma_terms(&states, &detector, &trace, wedge_trace)?;
    let rhs = terms.rhs();
    Ok(LemmaCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + BOUND_TOL,
        terms,
        detector,
        trace,
    })
}

/// Error sum of a composed detector and the terms of its bound.
fn lemma_terms(
    states: &[DensityMatrix],
    detector: &Detector,
    trace: &CompositionTrace,
    wedge_trace: f64,
) -> Result<(f64, LemmaTerms)> {
    let success = detector.success_probabilities(states)?;
    let lhs = success.iter().map(|p| 1.0 - p).sum();
    let cross = real_trace(
        states[0].matrix().trace_product(&trace.e_tilde_3)?
            + states[1].matrix().trace_product(&trace.e_tilde_3)?,
        "tr[(rho1 + rho2) E3]",
    )?;
    let term_rest = success[2..].iter().map(|p| 1.0 - p).sum();
    Ok((
        lhs,
        LemmaTerms {
            wedge_trace,
            term_wedge: 2.0 * wedge_trace,
            term_partials: 2.0 * cross,
            term_rest,
        },
    ))
}

#[derive(Clone, Debug)]
pub struct OverallCheck {
    pub lhs: f64,
    /// `2 tr[ρ1^{⊗n} ∧ ρ2^{⊗n}] + 4 (Err_sm(sub1) + Err_sm(sub2))`.
    pub rhs: f64,
    pub holds: bool,
    pub errors: ErrorReport,
    pub split: SplitDetector,
}

fn overall_rhs(split: &SplitDetector) -> f64 {
    let rep = &split.report;
    2.0 * rep.binary_err_sm + 4.0 * (rep.sub1_err_sm + rep.sub2_err_sm)
}

/// Builds the split detector and checks its error against the sub-detector bound.
pub fn overall_bound_check(
    ensemble: &Ensemble,
    n: usize,
    w1: f64,
    strategy: SubDetectorStrategy,
    dim_cap: usize,
) -> Result<OverallCheck> {
    let split = build_split_detector(ensemble, n, w1, strategy, dim_cap)?;
    let powered = ensemble.tensor_powers(n, dim_cap)?;
    let errors = error_report(n, &powered, &split.detector)?;
    let rhs = overall_rhs(&split);
    Ok(OverallCheck {
        lhs: errors.err_sm,
        rhs,
        holds: errors.err_sm <= rhs + BOUND_TOL,
        errors,
        split,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinaryBoundRow {
    pub n: usize,
    /// `tr[ρ1^{⊗n} ∧ ρ2^{⊗n}]`.
    pub err_sm: f64,
    /// `exp(-n ξ)`.
    pub bound: f64,
    pub holds: bool,
}

/// `exp(-n ξ)`, zero for infinite `ξ`.
pub fn binary_bound(n: usize, xi: f64) -> f64 {
    if xi.is_infinite() {
        0.0
    } else {
        (-(n as f64) * xi).exp()
    }
}

/// Optimal binary error on `n = 1..=n_max` copies against `exp(-n ξ(ρ1, ρ2))`.
pub fn binary_chernoff_upper_check(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    n_max: usize,
    dim_cap: usize,
) -> Result<Vec<BinaryBoundRow>> {
    power_dim(rho1.dim(), n_max, dim_cap)?;
    let xi = chernoff_distance(rho1, rho2)?.xi;
    (1..=n_max)
        .map(|n| {
            let a = rho1.tensor_power(n, dim_cap)?;
            let b = rho2.tensor_power(n, dim_cap)?;
            let hh = holevo_helstrom(&a, &b)?;
            let err_sm = binary_error_sum(&a, &b, &hh)?;
            let bound = binary_bound(n, xi);
            Ok(BinaryBoundRow {
                n,
                err_sm,
                bound,
                holds: err_sm <= bound + BINARY_BOUND_TOL,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub err_sm: f64,
    /// `-ln(err_sm) / n`; infinite for exact discrimination.
    pub rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExponentFit {
    Slope { slope: f64, points: usize },
    /// Every error sum is zero.
    ExactDiscrimination,
    /// Fewer than two non-zero error sums.
    TooFewPoints,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSeries {
    pub rows: Vec<RateRow>,
    pub k_fit: usize,
    pub fit: ExponentFit,
    /// Copy counts whose error sum was treated as exactly zero.
    pub zero_rows: Vec<usize>,
}

impl ExponentSeries {
    pub fn fitted_slope(&self) -> Option<f64> {
        match self.fit {
            ExponentFit::Slope { slope, .. } => Some(slope),
            _ => None,
        }
    }
}

/// `-ln(err) / n`, infinite when `err` is exactly zero within `EXACT_ZERO_TOL`.
pub fn single_point_rate(n: usize, err_sm: f64) -> f64 {
    if err_sm <= EXACT_ZERO_TOL {
        f64::INFINITY
    } else {
        -err_sm.ln() / n as f64
    }
}

/// Least-squares slope of `-ln(err_sm)` against `n` over the last `k_fit`
/// non-zero rows. Rows must be in strictly ascending `n`.
pub fn exponent_estimate(rows: &[(usize, f64)], k_fit: usize) -> Result<ExponentSeries> {
    if k_fit < 2 {
        return Err(Error::InvalidArgument(format!(
            "k_fit must be at least 2, got {k_fit}"
        )));
    }
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no rows to fit".into()));
    }
    if rows.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidArgument(
            "rows must be in strictly ascending copy count".into(),
        ));
    }
    let rate_rows: Vec<RateRow> = rows
        .iter()
        .map(|&(n, err_sm)| RateRow {
            n,
            err_sm,
            rate: single_point_rate(n, err_sm),
        })
        .collect();
    let zero_rows: Vec<usize> = rate_rows
        .iter()
        .filter(|r| r.rate.is_infinite())
        .map(|r| r.n)
        .collect();
    let positive: Vec<&RateRow> = rate_rows.iter().filter(|r| r.rate.is_finite()).collect();
    let fit = if positive.is_empty() {
        ExponentFit::ExactDiscrimination
    } else if positive.len() < 2 {
        ExponentFit::TooFewPoints
    } else {
        let tail = &positive[positive.len().saturating_sub(k_fit)..];
        let pts: Vec<(f64, f64)> = tail.iter().map(|r| (r.n as f64, -r.err_sm.ln())).collect();
        ExponentFit::Slope {
            slope: least_squares_slope(&pts),
            points: pts.len(),
        }
    };
    Ok(ExponentSeries {
        rows: rate_rows,
        k_fit,
        fit,
        zero_rows,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Copy counts run are `n_min, n_min + n_step, ...` up to `n_max`.
    pub n_step: usize,
    pub w1: f64,
    pub strategy: SubDetectorStrategy,
    pub k_fit: usize,
    pub dim_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_min: 2,
            n_max: 8,
            n_step: 1,
            w1: DEFAULT_W1,
            strategy: SubDetectorStrategy::Pgm,
            k_fit: DEFAULT_K_FIT,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl ExperimentConfig {
    pub fn copy_counts(&self) -> Vec<usize> {
        (self.n_min..=self.n_max).step_by(self.n_step.max(1)).collect()
    }

    /// Checks the ranges and that every copy count fits the cap (and splits, for `r >= 3`).
    pub fn validate(&self, dim: usize, r: usize) -> Result<()> {
        if self.n_min < 1 || self.n_max < self.n_min || self.n_step < 1 {
            return Err(Error::InvalidArgument(format!(
                "copy range must satisfy 1 <= n_min <= n_max and n_step >= 1 (got {}..={} step {})",
                self.n_min, self.n_max, self.n_step
            )));
        }
        if self.k_fit < 2 {
            return Err(Error::InvalidArgument(format!(
                "k_fit must be at least 2, got {}",
                self.k_fit
            )));
        }
        power_dim(dim, self.n_max, self.dim_cap)?;
        if r >= 3 {
            for n in self.copy_counts() {
                split_sizes(n, self.w1)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    /// `(n1, n2)` for split detectors; `None` for two-state ensembles.
    pub split: Option<(usize, usize)>,
    pub errors: ErrorReport,
    pub rate: f64,
    /// `tr[ρ1^{⊗n} ∧ ρ2^{⊗n}]` for the least-favorable pair.
    pub binary_err_sm: f64,
    /// `exp(-n ξ12)`.
    pub binary_bound: f64,
    pub binary_holds: bool,
    pub lemma_rhs: f64,
    pub lemma_holds: bool,
    pub overall_rhs: f64,
    pub overall_holds: bool,
    pub r_squared_gap: Option<f64>,
    pub sub_err_sm: Option<(f64, f64)>,
    pub validity: DetectorValidity,
}

#[derive(Clone, Debug)]
pub struct ExperimentTable {
    pub config: ExperimentConfig,
    /// `order[k]` is the input index of the state evaluated in position `k`;
    /// the least-favorable pair comes first.
    pub order: Vec<usize>,
    pub pairwise: PairwiseChernoff,
    /// In input indices.
    pub mqcb: Mqcb,
    /// In input indices; `None` for two states.
    pub condition: Option<ConditionReport>,
    /// `ξ` of the least-favorable pair.
    pub xi_12: f64,
    /// `min(ξ12, ξ̄12 / 6)`, or `ξ12` for two states.
    pub reference_level: f64,
    pub rows: Vec<ExperimentRow>,
    pub exponent: ExponentSeries,
    pub warnings: Vec<String>,
}

/// Runs the detector family over a range of copy counts. Two-state ensembles
/// use the Holevo-Helstrom test; larger ones use the split detector with the
/// least-favorable pair as `(ρ1, ρ2)`.
pub fn run_experiment(ensemble: &Ensemble, config: &ExperimentConfig) -> Result<ExperimentTable> {
    let r = ensemble.len();
    config.validate(ensemble.dim(), r)?;
    let pairwise = PairwiseChernoff::compute(ensemble)?;
    let mqcb = pairwise.mqcb();
    let (i, j) = mqcb.pair;
    let ordered = ensemble.with_pair_first(i, j);
    let mut order = vec![i, j];
    order.extend((0..r).filter(|&k| k != i && k != j));
    let xi_12 = pairwise.xi(i, j);
    let condition = if r >= 3 {
        Some(pairwise.condition()?)
    } else {
        None
    };
    let reference_level = condition
        .as_ref()
        .map_or(xi_12, ConditionReport::reference_level);

    let mut rows = Vec::new();
    for n in config.copy_counts() {
        rows.push(if r == 2 {
            binary_row(&ordered, n, xi_12, config.dim_cap)?
        } else {
            split_row(&ordered, n, xi_12, config)?
        });
    }

    let series: Vec<(usize, f64)> = rows.iter().map(|row| (row.n, row.errors.err_sm)).collect();
    let exponent = exponent_estimate(&series, config.k_fit)?;
    let mut warnings = Vec::new();
    if let Some(slope) = exponent.fitted_slope() {
        if slope > mqcb.value + SLOPE_WARNING_TOL {
            warnings.push(format!(
                "fitted slope {slope} exceeds the MQCB {} (finite-n effect; the bound constrains only the limit)",
                mqcb.value
            ));
        }
    }
    for row in &rows {
        if !row.validity.is_valid() {
            warnings.push(format!(
                "detector at n = {} fails validity checks: {:?}",
                row.n, row.validity
            ));
        }
    }

    Ok(ExperimentTable {
        config: config.clone(),
        order,
        pairwise,
        mqcb,
        condition,
        xi_12,
        reference_level,
        rows,
        exponent,
        warnings,
    })
}

fn binary_row(ordered: &Ensemble, n: usize, xi_12: f64, dim_cap: usize) -> Result<ExperimentRow> {
    let powered = ordered.tensor_powers(n, dim_cap)?;
    let hh = holevo_helstrom(&powered[0], &powered[1])?;
    let errors = error_report(n, &powered, &hh)?;
    let binary_err_sm = binary_error_sum(&powered[0], &powered[1], &hh)?;
    let bound = binary_bound(n, xi_12);
    let holds = binary_err_sm <= bound + BINARY_BOUND_TOL;
    Ok(ExperimentRow {
        n,
        split: None,
        rate: single_point_rate(n, errors.err_sm),
        errors,
        binary_err_sm,
        binary_bound: bound,
        binary_holds: holds,
        lemma_rhs: bound,
        lemma_holds: holds,
        overall_rhs: bound,
        overall_holds: holds,
        r_squared_gap: None,
        sub_err_sm: None,
        validity: hh.validity()?,
    })
}

fn split_row(
    ordered: &Ensemble,
    n: usize,
    xi_12: f64,
    config: &ExperimentConfig,
) -> Result<ExperimentRow> {
    let split = build_split_detector(ordered, n, config.w1, config.strategy, config.dim_cap)?;
    let powered = ordered.tensor_powers(n, config.dim_cap)?;
    let rep = &split.report;
    let (lhs, terms) = lemma_terms(&powered, &split.detector, &split.trace, rep.binary_err_sm)?;
    let errors = error_report(n, &powered, &split.detector)?;
    debug_assert!((lhs - errors.err_sm).abs() < 1e-12);
    let lemma_rhs = terms.rhs();
    let overall = overall_rhs(&split);
    let bound = binary_bound(n, xi_12);
    Ok(ExperimentRow {
        n,
        split: Some((rep.n1, rep.n2)),
        rate: single_point_rate(n, errors.err_sm),
        binary_err_sm: rep.binary_err_sm,
        binary_bound: bound,
        binary_holds: rep.binary_err_sm <= bound + BINARY_BOUND_TOL,
        lemma_rhs,
        lemma_holds: errors.err_sm <= lemma_rhs + BOUND_TOL,
        overall_rhs: overall,
        overall_holds: errors.err_sm <= overall + BOUND_TOL,
        r_squared_gap: Some(split.trace.r_squared_gap),
        sub_err_sm: Some((rep.sub1_err_sm, rep.sub2_err_sm)),
        validity: split.detector.validity()?,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{classical_state, pure_state, random_density};
    use num_complex::Complex64;

    fn basis(d: usize, k: usize) -> DensityMatrix {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        pure_state(&v).unwrap()
    }

    #[test]
    fn uninformative_detector_errs_r_minus_one() {
        let states: Vec<_> = (0..3).map(|s| random_density(2, 2, s).unwrap()).collect();
        let ens = Ensemble::new(states).unwrap();
        let third = ComplexMatrix::identity(2).scale(1.0 / 3.0);
        let det = Detector::new(vec![third.clone(), third.clone(), third]).unwrap();
        let rep = error_sum(&ens, 1, &det, 64).unwrap();
        for e in &rep.per_state_error {
            assert!((e - 2.0 / 3.0).abs() < 1e-12);
        }
        assert!((rep.err_sm - 2.0).abs() < 1e-12);
        assert!((rep.err_sm + rep.succ_sm - 3.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_detector_on_orthogonal_ensemble() {
        let ens = Ensemble::new((0..3).map(|k| basis(3, k)).collect()).unwrap();
        let det = Detector::new((0..3).map(|k| basis(3, k).into_matrix()).collect()).unwrap();
        assert!(error_sum(&ens, 1, &det, 64).unwrap().err_sm.abs() < 1e-15);
    }

    #[test]
    fn lemma_with_zero_partials_is_term_by_term() {
        let rho1 = random_density(2, 2, 1).unwrap();
        let rho2 = random_density(2, 2, 2).unwrap();
        let rho3 = random_density(2, 2, 3).unwrap();
        let check = lemma_bound_check(&rho1, &rho2, &[ComplexMatrix::zeros(2, 2)], &[rho3]).unwrap();
        let w = check.terms.wedge_trace;
        assert!((check.lhs - (w + 1.0)).abs() < 1e-12);
        assert!((check.rhs - (2.0 * w + 1.0)).abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn lemma_on_orthogonal_triple_is_tight_at_zero() {
        let states: Vec<_> = (0..3).map(|k| basis(3, k)).collect();
        let check = lemma_bound_check(
            &states[0],
            &states[1],
            &[states[2].matrix().clone()],
            &[states[2].clone()],
        )
        .unwrap();
        assert!(check.lhs.abs() < 1e-12);
        assert!(check.rhs.abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn exponent_of_exact_exponential() {
        let rows: Vec<_> = (1..=6).map(|n| (n, (-0.3 * n as f64).exp())).collect();
        let s = exponent_estimate(&rows, 4).unwrap();
        assert!((s.fitted_slope().unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(s.fit, ExponentFit::Slope { slope: s.fitted_slope().unwrap(), points: 4 });
        for row in &s.rows {
            assert!((row.rate - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn exponent_of_constant_series_is_zero() {
        let rows: Vec<_> = (1..=5).map(|n| (n, 0.5)).collect();
        assert!(exponent_estimate(&rows, 4).unwrap().fitted_slope().unwrap().abs() < 1e-15);
    }

    #[test]
    fn exponent_flags_zero_rows() {
        let all_zero: Vec<_> = (1..=4).map(|n| (n, 0.0)).collect();
        let s = exponent_estimate(&all_zero, 4).unwrap();
        assert_eq!(s.fit, ExponentFit::ExactDiscrimination);
        assert_eq!(s.zero_rows, vec![1, 2, 3, 4]);

        let mixed = [(1, 0.5), (2, 0.25), (3, 0.0)];
        let s = exponent_estimate(&mixed, 4).unwrap();
        assert_eq!(s.zero_rows, vec![3]);
        assert!((s.fitted_slope().unwrap() - 2f64.ln()).abs() < 1e-12);

        assert_eq!(exponent_estimate(&[(1, 0.5)], 4).unwrap().fit, ExponentFit::TooFewPoints);
        assert!(exponent_estimate(&[(2, 0.5), (1, 0.4)], 4).is_err());
        assert!(exponent_estimate(&mixed, 1).is_err());
    }

    #[test]
    fn binary_check_for_equal_and_orthogonal_states() {
        let rho = random_density(2, 2, 4).unwrap();
        for row in binary_chernoff_upper_check(&rho, &rho, 3, 64).unwrap() {
            assert!((row.err_sm - 1.0).abs() < 1e-12);
            assert!((row.bound - 1.0).abs() < 1e-8);
            assert!(row.holds);
        }
        let a = classical_state(&[1.0, 0.0]).unwrap();
        let b = classical_state(&[0.0, 1.0]).unwrap();
        for row in binary_chernoff_upper_check(&a, &b, 3, 64).unwrap() {
            assert!(row.err_sm.abs() < 1e-15);
            assert!(row.holds);
        }
        assert!(matches!(
            binary_chernoff_upper_check(&a, &b, 7, 64),
            Err(Error::DimensionCapExceeded { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig::default();
        assert!(cfg.validate(2, 3).is_ok());
        let bad = ExperimentConfig { n_min: 1, ..cfg.clone() };
        assert!(matches!(bad.validate(2, 3), Err(Error::SplitTooSmall { .. })));
        assert!(bad.validate(2, 2).is_ok());
        let big = ExperimentConfig { n_max: 13, ..cfg.clone() };
        assert!(matches!(big.validate(2, 3), Err(Error::DimensionCapExceeded { .. })));
        let empty = ExperimentConfig { n_min: 5, n_max: 4, ..cfg };
        assert!(empty.validate(2, 3).is_err());
    }
}
