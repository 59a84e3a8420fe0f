//! Detector (POVM) constructions: the Holevo-Helstrom binary test, the
//! pretty-good measurement, composition of a binary test with partial
//! elements, and the tensor-split multi-copy detector.

use crate::error::{Error, Result};
use crate::linalg::{
    eig_floor, eigh, eigh_psd, eigvalsh, real_trace, spectral_map, ComplexMatrix, HermitianEig,
};
use crate::states::{power_dim, DensityMatrix, Ensemble};

/// Elements may have eigenvalues down to `-ELEMENT_PSD_TOL`.
pub const ELEMENT_PSD_TOL: f64 = 1e-10;

/// Max-norm tolerance on `Σ E_i - I`, on `E² - E` for projective tests and
/// on the consistency identities checked during construction.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Partial elements may exceed the identity by at most this much.
pub const PARTIALS_TOL: f64 = 1e-10;

/// `I - Σ partials` with max-norm at or below this counts as zero.
const ZERO_REMAINDER_TOL: f64 = 1e-10;

/// A measurement on `dim`-dimensional states with one element per hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct Detector {
    elements: Vec<ComplexMatrix>,
}

/// Numerical health of a detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorValidity {
    pub min_eigenvalue: f64,
    /// `max |Σ E_i - I|` over entries.
    pub identity_defect: f64,
    pub hermiticity_residual: f64,
}

impl DetectorValidity {
    pub fn is_valid(&self) -> bool {
        self.min_eigenvalue >= -ELEMENT_PSD_TOL
            && self.identity_defect <= IDENTITY_TOL
            && self.hermiticity_residual <= IDENTITY_TOL
    }
}

impl Detector {
    /// Validated construction from user-supplied elements.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidDetector("no elements".into()));
        }
        let dim = elements[0].rows();
        for e in &elements {
            if !e.is_square() || e.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.rows(),
                });
            }
        }
        let det = Self { elements };
        let v = det.validity()?;
        if !v.is_valid() {
            return Err(Error::InvalidDetector(format!(
                "min eigenvalue {:e}, identity defect {:e}, hermiticity residual {:e}",
                v.min_eigenvalue, v.identity_defect, v.hermiticity_residual
            )));
        }
        Ok(det)
    }

    /// Elements that are valid by construction.
    pub(crate) fn from_trusted(elements: Vec<ComplexMatrix>) -> Self {
        Self { elements }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    pub fn into_elements(self) -> Vec<ComplexMatrix> {
        self.elements
    }

    /// Minimum element eigenvalue, identity defect and Hermiticity residual.
    pub fn validity(&self) -> Result<DetectorValidity> {
        let dim = self.dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        let mut min_eigenvalue = f64::INFINITY;
        let mut hermiticity_residual: f64 = 0.0;
        for e in &self.elements {
            hermiticity_residual = hermiticity_residual.max(e.hermiticity_residual());
            let h = e.hermitian_part();
            let eigs = eigvalsh(&h)?;
            min_eigenvalue = min_eigenvalue.min(eigs[0]);
            sum.add_scaled(e, 1.0)?;
        }
        let identity_defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        Ok(DetectorValidity {
            min_eigenvalue,
            identity_defect,
            hermiticity_residual,
        })
    }

    /// `max_i ‖E_i² - E_i‖_max`; zero for a projective measurement.
    pub fn projection_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for e in &self.elements {
            worst = worst.max(e.matmul(e)?.max_abs_diff(e));
        }
        Ok(worst)
    }

    /// `tr[ρ_i E_i]` for each hypothesis.
    pub fn success_probabilities(&self, states: &[DensityMatrix]) -> Result<Vec<f64>> {
        if states.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: states.len(),
            });
        }
        states
            .iter()
            .zip(&self.elements)
            .map(|(rho, e)| {
                if rho.dim() != self.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim(),
                        found: rho.dim(),
                    });
                }
                real_trace(rho.matrix().trace_product(e)?, "tr[rho E]")
            })
            .collect()
    }

    /// `Σ_i tr[ρ_i (I - E_i)]`.
    pub fn error_sum(&self, states: &[DensityMatrix]) -> Result<f64> {
        Ok(self
            .success_probabilities(states)?
            .iter()
            .map(|p| 1.0 - p)
            .sum())
    }
}

fn check_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Projector onto eigenvectors whose eigenvalue passes `keep`.
fn spectral_projector(eig: &HermitianEig, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
    spectral_map(eig, |x| if keep(x) { 1.0 } else { 0.0 })
}

/// Optimal binary test: `E1 = supp((ρ1 - ρ2)_+)`, `E2 = I - E1`. Eigenvalues of
/// `ρ1 - ρ2` within the floor of zero are assigned to `E2`.
pub fn holevo_helstrom(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<Detector> {
    check_same_dim(rho1, rho2)?;
    let diff = rho1.matrix().try_sub(rho2.matrix())?;
    let eig = eigh(&diff)?;
    let floor = eig_floor(&eig.eigenvalues);
    let e1 = spectral_projector(&eig, |x| x > floor);
    let e2 = ComplexMatrix::identity(rho1.dim()).try_sub(&e1)?;
    Ok(Detector::from_trusted(vec![e1, e2]))
}

/// `tr[ρ1 E2] + tr[ρ2 E1]` for a binary detector, computed without forming products.
pub fn binary_error_sum(rho1: &DensityMatrix, rho2: &DensityMatrix, hh: &Detector) -> Result<f64> {
    check_binary(hh, rho1.dim())?;
    check_same_dim(rho1, rho2)?;
    let a = real_trace(rho1.matrix().trace_product(hh.element(1))?, "tr[rho1 E2]")?;
    let b = real_trace(rho2.matrix().trace_product(hh.element(0))?, "tr[rho2 E1]")?;
    Ok(a + b)
}

fn check_binary(det: &Detector, dim: usize) -> Result<()> {
    if det.len() != 2 {
        return Err(Error::InvalidDetector(format!(
            "expected a binary detector, got {} elements",
            det.len()
        )));
    }
    if det.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: det.dim(),
        });
    }
    Ok(())
}

/// `ρ1 ∧ ρ2 = ρ1 E2 + ρ2 E1` for the Holevo-Helstrom test `(E1, E2)`.
pub fn wedge(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<ComplexMatrix> {
    let hh = holevo_helstrom(rho1, rho2)?;
    wedge_with(rho1, rho2, &hh)
}

/// `ρ1 E2 + ρ2 E1` for a given binary test; checks it equals `E2 ρ1 + E1 ρ2`
/// and that its trace is real and non-negative.
pub fn wedge_with(rho1: &DensityMatrix, rho2: &DensityMatrix, hh: &Detector) -> Result<ComplexMatrix> {
    check_binary(hh, rho1.dim())?;
    check_same_dim(rho1, rho2)?;
    let (e1, e2) = (hh.element(0), hh.element(1));
    let mut left = rho1.matrix().matmul(e2)?;
    left.add_scaled(&rho2.matrix().matmul(e1)?, 1.0)?;
    let mut right = e2.matmul(rho1.matrix())?;
    right.add_scaled(&e1.matmul(rho2.matrix())?, 1.0)?;
    let gap = left.max_abs_diff(&right);
    if gap > IDENTITY_TOL {
        return Err(Error::ConsistencyCheckFailed(format!(
            "rho1 E2 + rho2 E1 differs from E2 rho1 + E1 rho2 by {gap:e}"
        )));
    }
    let tr = real_trace(left.trace(), "tr[rho1 ∧ rho2]")?;
    if tr < -ELEMENT_PSD_TOL {
        return Err(Error::ConsistencyCheckFailed(format!(
            "tr[rho1 ∧ rho2] = {tr:e} is negative"
        )));
    }
    Ok(left)
}

/// Pretty-good (square-root) measurement for equiprobable states:
/// `G_k = S^{-1/2} (ρ_k / m) S^{-1/2} + (I - supp S) / m` with `S` the average state.
pub fn pgm(states: &[DensityMatrix]) -> Result<Detector> {
    let m = states.len();
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "the pretty-good measurement needs at least 2 states, got {m}"
        )));
    }
    let dim = states[0].dim();
    let mut avg = ComplexMatrix::zeros(dim, dim);
    for s in states {
        check_same_dim(&states[0], s)?;
        avg.add_scaled(s.matrix(), 1.0 / m as f64)?;
    }
    let eig = eigh_psd(&avg)?;
    let floor = eig_floor(&eig.eigenvalues);
    let inv_sqrt = spectral_map(&eig, |x| if x > floor { 1.0 / x.sqrt() } else { 0.0 });
    let kernel_share = spectral_map(&eig, |x| if x > floor { 0.0 } else { 1.0 / m as f64 });
    let elements = states
        .iter()
        .map(|s| {
            let mut g = inv_sqrt
                .matmul(s.matrix())?
                .matmul(&inv_sqrt)?
                .scale(1.0 / m as f64);
            g.add_scaled(&kernel_share, 1.0)?;
            Ok(g.hermitian_part())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Detector::from_trusted(elements))
}

/// Intermediate operators of [`compose_with_binary`].
#[derive(Clone, Debug)]
pub struct CompositionTrace {
    /// `I - Ẽ3`.
    pub q: ComplexMatrix,
    /// `I - Q^{1/2}`.
    pub r: ComplexMatrix,
    /// `Ẽ3 = Σ_{i≥3} E_i`.
    pub e_tilde_3: ComplexMatrix,
    /// `I - E1†`, the binary element for the second hypothesis.
    pub f1: ComplexMatrix,
    /// `I - E2†`.
    pub f2: ComplexMatrix,
    /// Minimum eigenvalue of `Ẽ3 - R²`; non-negative in exact arithmetic.
    pub r_squared_gap: f64,
    /// `‖E1 + E2 - Q‖_max` for the composed elements.
    pub sum_defect: f64,
}

impl CompositionTrace {
    pub fn r_squared_holds(&self) -> bool {
        self.r_squared_gap >= -IDENTITY_TOL
    }
}

/// Composes a binary test `(E1†, E2†)` with partial elements `E_3..E_r`:
/// `Q = I - Σ E_i`, `E_1 = Q^{1/2} E1† Q^{1/2}`, `E_2 = Q^{1/2} E2† Q^{1/2}`.
/// The result orders its elements `E_1, E_2, E_3, ..., E_r`.
pub fn compose_with_binary(
    partials: &[ComplexMatrix],
    binary: &Detector,
) -> Result<(Detector, CompositionTrace)> {
    let dim = binary.dim();
    check_binary(binary, dim)?;
    let mut e_tilde_3 = ComplexMatrix::zeros(dim, dim);
    for p in partials {
        if !p.is_square() || p.rows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.rows(),
            });
        }
        e_tilde_3.add_scaled(p, 1.0)?;
    }
    let identity = ComplexMatrix::identity(dim);
    let q = identity.try_sub(&e_tilde_3)?.hermitian_part();
    if q.max_abs() <= ZERO_REMAINDER_TOL {
        return Err(Error::PartialsEqualIdentity);
    }
    let q_eig = eigh(&q)?;
    let min_eig = q_eig.eigenvalues[0];
    if min_eig < -PARTIALS_TOL {
        return Err(Error::PartialsExceedIdentity { min_eig });
    }
    let q_sqrt = spectral_map(&q_eig, |x| x.max(0.0).sqrt());

    let (b1, b2) = (binary.element(0), binary.element(1));
    let e1 = q_sqrt.matmul(b1)?.matmul(&q_sqrt)?.hermitian_part();
    let e2 = q_sqrt.matmul(b2)?.matmul(&q_sqrt)?.hermitian_part();
    let mut pair_sum = e1.clone();
    pair_sum.add_scaled(&e2, 1.0)?;
    let sum_defect = pair_sum.max_abs_diff(&q);
    if sum_defect > IDENTITY_TOL {
        return Err(Error::ConsistencyCheckFailed(format!(
            "E1 + E2 differs from Q by {sum_defect:e}"
        )));
    }

    let r = identity.try_sub(&q_sqrt)?;
    let gap_matrix = e_tilde_3.try_sub(&r.matmul(&r)?)?.hermitian_part();
    let r_squared_gap = eigvalsh(&gap_matrix)?[0];

    let mut elements = vec![e1, e2];
    elements.extend(partials.iter().map(ComplexMatrix::hermitian_part));
    let trace = CompositionTrace {
        q,
        r,
        e_tilde_3,
        f1: identity.try_sub(b1)?,
        f2: identity.try_sub(b2)?,
        r_squared_gap,
        sum_defect,
    };
    Ok((Detector::from_trusted(elements), trace))
}

/// How the sub-detectors of a split detector are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubDetectorStrategy {
    Pgm,
    Recursive,
}

impl SubDetectorStrategy {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pgm => "pgm",
            Self::Recursive => "recursive",
        }
    }
}

impl std::str::FromStr for SubDetectorStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgm" => Ok(Self::Pgm),
            "recursive" => Ok(Self::Recursive),
            other => Err(Error::InvalidArgument(format!(
                "unknown sub-detector strategy '{other}' (expected pgm or recursive)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitReport {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub w1: f64,
    pub strategy: SubDetectorStrategy,
    /// Error sum of the sub-detector for `{ρ1, ρ3, ..., ρr}^{⊗n1}`.
    pub sub1_err_sm: f64,
    /// Error sum of the sub-detector for `{ρ2, ρ3, ..., ρr}^{⊗n2}`.
    pub sub2_err_sm: f64,
    /// `tr[ρ1^{⊗n} ∧ ρ2^{⊗n}]`.
    pub binary_err_sm: f64,
}

#[derive(Clone, Debug)]
pub struct SplitDetector {
    pub detector: Detector,
    pub trace: CompositionTrace,
    pub report: SplitReport,
}

/// `n1 = floor(n * w1)`, `n2 = n - n1`; both must be at least 1.
pub fn split_sizes(n: usize, w1: f64) -> Result<(usize, usize)> {
    if !(w1 > 0.0 && w1 < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "copy weight must lie in (0, 1), got {w1}"
        )));
    }
    let n1 = (n as f64 * w1).floor() as usize;
    let n2 = n.saturating_sub(n1);
    if n1 == 0 || n2 == 0 {
        return Err(Error::SplitTooSmall { n, w1, n1, n2 });
    }
    Ok((n1, n2))
}

/// Multi-copy detector for `r >= 3` states: sub-detectors on the two copy
/// blocks discriminate `ρ1` (resp. `ρ2`) from `ρ3..ρr`, their elements for
/// `ρ3..ρr` are tensored into partial elements, and the remaining weight goes
/// to a Holevo-Helstrom test between `ρ1^{⊗n}` and `ρ2^{⊗n}`.
pub fn build_split_detector(
    ensemble: &Ensemble,
    n: usize,
    w1: f64,
    strategy: SubDetectorStrategy,
    dim_cap: usize,
) -> Result<SplitDetector> {
    split_detector_for(ensemble.states(), n, w1, strategy, dim_cap)
}

fn split_detector_for(
    states: &[DensityMatrix],
    n: usize,
    w1: f64,
    strategy: SubDetectorStrategy,
    dim_cap: usize,
) -> Result<SplitDetector> {
    let r = states.len();
    if r < 3 {
        return Err(Error::InvalidArgument(format!(
            "the split detector needs at least 3 states, got {r}"
        )));
    }
    let (n1, n2) = split_sizes(n, w1)?;
    power_dim(states[0].dim(), n, dim_cap)?;

    let block1: Vec<DensityMatrix> = std::iter::once(&states[0]).chain(&states[2..]).cloned().collect();
    let block2: Vec<DensityMatrix> = std::iter::once(&states[1]).chain(&states[2..]).cloned().collect();
    let (sub1, sub1_err_sm) = sub_detector(&block1, n1, w1, strategy, dim_cap)?;
    let (sub2, sub2_err_sm) = sub_detector(&block2, n2, w1, strategy, dim_cap)?;

    let partials: Vec<ComplexMatrix> = (1..r - 1)
        .map(|k| sub1.element(k).kron(sub2.element(k)))
        .collect();
    let rho1_n = states[0].tensor_power(n, dim_cap)?;
    let rho2_n = states[1].tensor_power(n, dim_cap)?;
    let hh = holevo_helstrom(&rho1_n, &rho2_n)?;
    let binary_err_sm = binary_error_sum(&rho1_n, &rho2_n, &hh)?;
    let (detector, trace) = compose_with_binary(&partials, &hh)?;
    Ok(SplitDetector {
        detector,
        trace,
        report: SplitReport {
            n,
            n1,
            n2,
            w1,
            strategy,
            sub1_err_sm,
            sub2_err_sm,
            binary_err_sm,
        },
    })
}

/// Sub-detector for `states^{⊗copies}` and its error sum.
fn sub_detector(
    states: &[DensityMatrix],
    copies: usize,
    w1: f64,
    strategy: SubDetectorStrategy,
    dim_cap: usize,
) -> Result<(Detector, f64)> {
    let powered = states
        .iter()
        .map(|s| s.tensor_power(copies, dim_cap))
        .collect::<Result<Vec<_>>>()?;
    let det = match strategy {
        SubDetectorStrategy::Pgm => pgm(&powered)?,
        SubDetectorStrategy::Recursive if states.len() == 2 => {
            holevo_helstrom(&powered[0], &powered[1])?
        }
        SubDetectorStrategy::Recursive if split_sizes(copies, w1).is_ok() => {
            split_detector_for(states, copies, w1, strategy, dim_cap)?.detector
        }
        SubDetectorStrategy::Recursive => pgm(&powered)?,
    };
    let err = det.error_sum(&powered)?;
    Ok((det, err))
}

/// Split detector whose sub-detectors are built the same way, bottoming out
/// in Holevo-Helstrom tests for two states and the pretty-good measurement
/// when a block has too few copies to split again.
pub fn recursive_detector(
    ensemble: &Ensemble,
    n: usize,
    w1: f64,
    dim_cap: usize,
) -> Result<Detector> {
    if ensemble.len() == 2 {
        let rho1 = ensemble.state(0).tensor_power(n, dim_cap)?;
        let rho2 = ensemble.state(1).tensor_power(n, dim_cap)?;
        return holevo_helstrom(&rho1, &rho2);
    }
    Ok(build_split_detector(ensemble, n, w1, SubDetectorStrategy::Recursive, dim_cap)?.detector)
}
