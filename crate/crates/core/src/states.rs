//! Density matrices, equiprobable ensembles and seeded state generators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, ComplexMatrix, PSD_TOL};
use crate::rng::SeededRng;

/// Default cap on the Hilbert-space dimension of tensor powers.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// States closer than this in Frobenius norm are not distinct hypotheses.
pub const DISTINCT_TOL: f64 = 1e-8;

const TRACE_TOL: f64 = 1e-10;
const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// A validated quantum state: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `(1 - eps) self + eps other`.
    pub fn mix(&self, other: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight must lie in [0, 1], got {eps}"
            )));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let mut m = self.matrix.scale(1.0 - eps);
        m.add_scaled(&other.matrix, eps)?;
        Ok(Self::from_trusted(m))
    }

    /// `ρ^{⊗n}`; fails when `d^n` exceeds `dim_cap`.
    pub fn tensor_power(&self, n: usize, dim_cap: usize) -> Result<DensityMatrix> {
        Ok(Self::from_trusted(tensor_power_matrix(
            &self.matrix,
            n,
            dim_cap,
        )?))
    }
}

/// `d^n`, or `DimensionCapExceeded` when it overflows or exceeds the cap.
pub fn power_dim(d: usize, n: usize, dim_cap: usize) -> Result<usize> {
    let exp = u32::try_from(n).map_err(|_| Error::DimensionCapExceeded {
        dim: usize::MAX,
        cap: dim_cap,
    })?;
    match d.checked_pow(exp) {
        Some(dim) if dim <= dim_cap => Ok(dim),
        Some(dim) => Err(Error::DimensionCapExceeded { dim, cap: dim_cap }),
        None => Err(Error::DimensionCapExceeded {
            dim: usize::MAX,
            cap: dim_cap,
        }),
    }
}

pub(crate) fn tensor_power_matrix(
    m: &ComplexMatrix,
    n: usize,
    dim_cap: usize,
) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("copy count must be positive".into()));
    }
    power_dim(m.rows(), n, dim_cap)?;
    let mut out = m.clone();
    for _ in 1..n {
        out = out.kron(m);
    }
    Ok(out)
}

/// Validates a matrix as a density matrix.
pub fn density_from_matrix(m: ComplexMatrix) -> Result<DensityMatrix> {
    m.ensure_hermitian()?;
    let m = m.hermitian_part();
    let eigs = eigvalsh(&m)?;
    let min = eigs.first().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::PsdViolation { min_eig: min });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceViolation { trace });
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// Rank-one projector `v v† / ‖v‖²`.
pub fn pure_state(v: &[Complex64]) -> Result<DensityMatrix> {
    let norm2: f64 = v.iter().map(Complex64::norm_sqr).sum();
    if v.is_empty() || norm2 == 0.0 || !norm2.is_finite() {
        return Err(Error::DegenerateInput(
            "pure state vector must be nonzero and finite".into(),
        ));
    }
    Ok(DensityMatrix::from_trusted(
        ComplexMatrix::outer(v, v).scale(1.0 / norm2),
    ))
}

/// Diagonal state `diag(p)`.
pub fn classical_state(p: &[f64]) -> Result<DensityMatrix> {
    if p.is_empty() {
        return Err(Error::NormalizationViolation("empty probability vector".into()));
    }
    if let Some(bad) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::NormalizationViolation(format!(
            "entry {bad} is not a probability"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::NormalizationViolation(format!("entries sum to {sum}")));
    }
    Ok(DensityMatrix::from_trusted(ComplexMatrix::from_diag(p)))
}

/// `G G† / tr(G G†)` for a `dim x rank` matrix `G` of complex Gaussians drawn
/// row-major from [`SeededRng`] at `seed`.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= rank <= dim, got dim {dim}, rank {rank}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let g_entries: Vec<Complex64> = (0..dim * rank).map(|_| rng.complex_normal()).collect();
    let g = ComplexMatrix::new(dim, rank, g_entries)?;
    let ggt = g.matmul(&g.adjoint())?;
    let tr = ggt.trace().re;
    Ok(DensityMatrix::from_trusted(ggt.scale(1.0 / tr).hermitian_part()))
}

/// An ordered list of `r >= 2` pairwise distinct states of equal dimension,
/// with implicit equal priors `1/r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    states: Vec<DensityMatrix>,
    labels: Option<Vec<String>>,
}

impl Ensemble {
    pub fn new(states: Vec<DensityMatrix>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "an ensemble needs at least 2 states, got {}",
                states.len()
            )));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                let diff = states[i].matrix().try_sub(states[j].matrix())?;
                if diff.frobenius_norm() <= DISTINCT_TOL {
                    return Err(Error::NotDistinct(i, j));
                }
            }
        }
        Ok(Self {
            states,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.states.len() {
            return Err(Error::DimensionMismatch {
                expected: self.states.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Number of hypotheses `r`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &DensityMatrix {
        &self.states[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Copy with states `i` and `j` moved to the front, the rest in order.
    pub fn with_pair_first(&self, i: usize, j: usize) -> Ensemble {
        let mut order = vec![i, j];
        order.extend((0..self.len()).filter(|&k| k != i && k != j));
        Ensemble {
            states: order.iter().map(|&k| self.states[k].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| order.iter().map(|&k| l[k].clone()).collect()),
        }
    }

    /// `ρ_i^{⊗n}` for every state.
    pub fn tensor_powers(&self, n: usize, dim_cap: usize) -> Result<Vec<DensityMatrix>> {
        self.states
            .iter()
            .map(|s| s.tensor_power(n, dim_cap))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_validation_errors() {
        let half_id = ComplexMatrix::identity(2).scale(0.5);
        assert!(density_from_matrix(half_id).is_ok());
        assert!(matches!(
            density_from_matrix(ComplexMatrix::from_diag(&[0.5, 0.6])),
            Err(Error::TraceViolation { .. })
        ));
        assert!(matches!(
            density_from_matrix(ComplexMatrix::from_diag(&[1.2, -0.2])),
            Err(Error::PsdViolation { .. })
        ));
        let mut skew = ComplexMatrix::from_diag(&[0.5, 0.5]);
        skew[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            density_from_matrix(skew),
            Err(Error::HermiticityViolation(_))
        ));
    }

    #[test]
    fn pure_state_examples() {
        let p = pure_state(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(*p.matrix(), ComplexMatrix::from_diag(&[1.0, 0.0]));
        let q = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(q
            .matrix()
            .data()
            .iter()
            .all(|z| (z - c(0.5, 0.0)).norm() < 1e-15));
        assert!(matches!(
            pure_state(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn classical_state_examples() {
        assert_eq!(
            *classical_state(&[0.2, 0.3, 0.5]).unwrap().matrix(),
            ComplexMatrix::from_diag(&[0.2, 0.3, 0.5])
        );
        assert_eq!(
            classical_state(&[0.5, 0.5]).unwrap(),
            DensityMatrix::maximally_mixed(2)
        );
        assert!(matches!(
            classical_state(&[0.5, 0.6]),
            Err(Error::NormalizationViolation(_))
        ));
        assert!(classical_state(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn random_density_is_deterministic() {
        let a = random_density(2, 2, 42).unwrap();
        let b = random_density(2, 2, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_density(2, 2, 43).unwrap());
        assert!(random_density(2, 3, 0).is_err());
        assert!(random_density(2, 0, 0).is_err());
    }

    #[test]
    fn rank_one_random_is_pure() {
        for seed in 0..10 {
            let eigs = eigvalsh(random_density(2, 1, seed).unwrap().matrix()).unwrap();
            assert!((eigs[1] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mix_endpoints() {
        let rho = classical_state(&[1.0, 0.0]).unwrap();
        let sigma = classical_state(&[0.0, 1.0]).unwrap();
        assert_eq!(rho.mix(&sigma, 0.0).unwrap(), rho);
        assert_eq!(rho.mix(&sigma, 1.0).unwrap(), sigma);
        assert_eq!(
            rho.mix(&sigma, 0.5).unwrap(),
            DensityMatrix::maximally_mixed(2)
        );
        assert!(rho.mix(&DensityMatrix::maximally_mixed(3), 0.5).is_err());
        assert!(rho.mix(&sigma, 1.5).is_err());
    }

    #[test]
    fn tensor_power_examples_and_cap() {
        let rho = random_density(2, 2, 5).unwrap();
        assert_eq!(rho.tensor_power(1, 16).unwrap(), rho);
        let mm = DensityMatrix::maximally_mixed(2).tensor_power(3, 16).unwrap();
        assert!(mm
            .matrix()
            .max_abs_diff(&ComplexMatrix::identity(8).scale(0.125))
            < 1e-15);
        assert!(matches!(
            rho.tensor_power(5, 16),
            Err(Error::DimensionCapExceeded { dim: 32, cap: 16 })
        ));
        assert!(rho.tensor_power(200, DEFAULT_DIM_CAP).is_err());
    }

    #[test]
    fn ensemble_invariants() {
        let a = classical_state(&[1.0, 0.0]).unwrap();
        let b = classical_state(&[0.0, 1.0]).unwrap();
        assert!(Ensemble::new(vec![a.clone()]).is_err());
        assert!(matches!(
            Ensemble::new(vec![a.clone(), b.clone(), a.clone()]),
            Err(Error::NotDistinct(0, 2))
        ));
        assert!(Ensemble::new(vec![a.clone(), DensityMatrix::maximally_mixed(3)]).is_err());
        let e = Ensemble::new(vec![a.clone(), b.clone(), DensityMatrix::maximally_mixed(2)])
            .unwrap()
            .with_labels(vec!["a".into(), "b".into(), "m".into()])
            .unwrap();
        let swapped = e.with_pair_first(1, 2);
        assert_eq!(swapped.state(0), &b);
        assert_eq!(swapped.state(2), &a);
        assert_eq!(swapped.labels().unwrap(), ["b", "m", "a"]);
    }
}
