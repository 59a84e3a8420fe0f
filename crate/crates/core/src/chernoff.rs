//! Quantum Chernoff distance, the multiple Chernoff bound over an ensemble and
//! the least-favorable-pair condition.
//!
//! `f(s) = tr[ρ1^{1-s} ρ2^s]` is evaluated with the support convention
//! `0^0 := 0`, so `f(0) = tr[ρ1 supp ρ2]` and `f(1) = tr[supp(ρ1) ρ2]`.
//! With that convention `f` is continuous and convex on `[0, 1]`.

use crate::error::{Error, Result};
use crate::linalg::{eig_floor, eigh_psd, matrix_power, ComplexMatrix};
use crate::states::{DensityMatrix, Ensemble};

/// Golden-section search stops once the bracket is narrower than this.
pub const GOLDEN_TOL: f64 = 1e-8;

/// `f_min` at or below this is reported as infinite distance.
pub const ZERO_OVERLAP: f64 = 1e-300;

/// Imaginary residue tolerated on `tr[ρ1^{1-s} ρ2^s]`.
pub const CURVE_IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ChernoffResult {
    /// `-ln f_min` in nats; `+inf` when the supports are orthogonal.
    pub xi: f64,
    pub s_star: f64,
    pub f_min: f64,
    pub curve_samples: Option<Vec<(f64, f64)>>,
}

impl ChernoffResult {
    fn from_min(s_star: f64, f_min: f64) -> Self {
        let f_min = f_min.clamp(0.0, 1.0);
        let xi = if f_min <= ZERO_OVERLAP {
            f64::INFINITY
        } else {
            (-f_min.ln()).max(0.0)
        };
        Self {
            xi,
            s_star,
            f_min,
            curve_samples: None,
        }
    }

    /// The same result with the roles of the two states exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            s_star: 1.0 - self.s_star,
            curve_samples: self
                .curve_samples
                .as_ref()
                .map(|c| c.iter().rev().map(|&(s, f)| (1.0 - s, f)).collect()),
            ..self.clone()
        }
    }
}

fn check_dims(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<()> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    Ok(())
}

/// `tr[ρ1^{1-s} ρ2^s]` straight from the definition, clamped to `[0, 1]`.
pub fn chernoff_curve(rho1: &DensityMatrix, rho2: &DensityMatrix, s: f64) -> Result<f64> {
    check_dims(rho1, rho2)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s must lie in [0, 1], got {s}")));
    }
    let a = matrix_power(rho1.matrix(), 1.0 - s)?;
    let b = matrix_power(rho2.matrix(), s)?;
    let tr = a.trace_product(&b)?;
    if tr.im.abs() > CURVE_IMAG_TOL {
        return Err(Error::ImaginaryResidue {
            what: format!("tr[rho1^(1-s) rho2^s] at s = {s}"),
            residue: tr.im,
        });
    }
    Ok(tr.re.clamp(0.0, 1.0))
}

/// `f(s)` in the joint spectral form
/// `Σ_{j,k} λ_j^{1-s} μ_k^s |<u_j|v_k>|²`, summed over eigenvalues above the
/// floor. One pair of eigendecompositions serves every `s`.
#[derive(Clone, Debug)]
pub struct ChernoffCurve {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    /// `overlaps[j * mu.len() + k] = |<u_j|v_k>|²`.
    overlaps: Vec<f64>,
}

impl ChernoffCurve {
    pub fn new(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<Self> {
        check_dims(rho1, rho2)?;
        let (lambda, u) = support_spectrum(rho1.matrix())?;
        let (mu, v) = support_spectrum(rho2.matrix())?;
        let overlaps = if lambda.is_empty() || mu.is_empty() {
            Vec::new()
        } else {
            u.adjoint()
                .matmul(&v)?
                .data()
                .iter()
                .map(|z| z.norm_sqr())
                .collect()
        };
        Ok(Self {
            lambda,
            mu,
            overlaps,
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mu_s: Vec<f64> = self.mu.iter().map(|m| m.powf(s)).collect();
        let mut total = 0.0;
        for (j, l) in self.lambda.iter().enumerate() {
            let row = &self.overlaps[j * self.mu.len()..(j + 1) * self.mu.len()];
            let inner: f64 = row.iter().zip(&mu_s).map(|(w, m)| w * m).sum();
            total += l.powf(1.0 - s) * inner;
        }
        total.clamp(0.0, 1.0)
    }

    /// Golden-section minimum on `[0, 1]` compared against both endpoints.
    pub fn minimize(&self) -> ChernoffResult {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.eval(c);
        let mut fd = self.eval(d);
        while b - a > GOLDEN_TOL {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.eval(d);
            }
        }
        let s_mid = 0.5 * (a + b);
        let mut best = (s_mid, self.eval(s_mid));
        for s in [0.0, 1.0] {
            let f = self.eval(s);
            if f < best.1 {
                best = (s, f);
            }
        }
        ChernoffResult::from_min(best.0, best.1)
    }
}

/// Eigenvalues above the floor and their eigenvectors as columns.
fn support_spectrum(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let eig = eigh_psd(m)?;
    let floor = eig_floor(&eig.eigenvalues);
    let keep: Vec<usize> = (0..eig.dim())
        .filter(|&i| eig.eigenvalues[i] > floor)
        .collect();
    let n = eig.dim();
    let mut vecs = ComplexMatrix::zeros(n, keep.len().max(1));
    for (dst, &src) in keep.iter().enumerate() {
        for r in 0..n {
            vecs[(r, dst)] = eig.eigenvectors[(r, src)];
        }
    }
    Ok((keep.iter().map(|&i| eig.eigenvalues[i]).collect(), vecs))
}

/// `ξ_QCB(ρ1, ρ2) = -ln min_{s∈[0,1]} tr[ρ1^{1-s} ρ2^s]`.
pub fn chernoff_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<ChernoffResult> {
    Ok(ChernoffCurve::new(rho1, rho2)?.minimize())
}

/// Like [`chernoff_distance`], also sampling `f` on `points` equally spaced `s` values.
pub fn chernoff_distance_sampled(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    points: usize,
) -> Result<ChernoffResult> {
    if points < 2 {
        return Err(Error::InvalidArgument("need at least 2 curve samples".into()));
    }
    let curve = ChernoffCurve::new(rho1, rho2)?;
    let mut result = curve.minimize();
    let step = 1.0 / (points - 1) as f64;
    result.curve_samples = Some(
        (0..points)
            .map(|k| {
                let s = if k + 1 == points { 1.0 } else { k as f64 * step };
                (s, curve.eval(s))
            })
            .collect(),
    );
    Ok(result)
}

/// All pairwise Chernoff distances of an ensemble, indexed by `i < j` (0-based).
#[derive(Clone, Debug)]
pub struct PairwiseChernoff {
    r: usize,
    results: Vec<ChernoffResult>,
}

impl PairwiseChernoff {
    pub fn compute(ensemble: &Ensemble) -> Result<Self> {
        let r = ensemble.len();
        let mut results = Vec::with_capacity(r * (r - 1) / 2);
        for i in 0..r {
            for j in (i + 1)..r {
                results.push(chernoff_distance(ensemble.state(i), ensemble.state(j))?);
            }
        }
        Ok(Self { r, results })
    }

    pub fn len(&self) -> usize {
        self.r
    }

    pub fn is_empty(&self) -> bool {
        self.r == 0
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        // Pairs before row i: sum_{k<i} (r - 1 - k).
        i * (2 * self.r - i - 1) / 2 + (j - i - 1)
    }

    /// Result for the ordered pair `(i, j)`; `s_star` refers to `ρ_i^{1-s} ρ_j^s`.
    pub fn get(&self, i: usize, j: usize) -> Option<ChernoffResult> {
        if i >= self.r || j >= self.r || i == j {
            return None;
        }
        if i < j {
            Some(self.results[self.slot(i, j)].clone())
        } else {
            Some(self.results[self.slot(j, i)].swapped())
        }
    }

    pub fn xi(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.results[self.slot(a, b)].xi
    }

    /// Pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.r).flat_map(move |i| ((i + 1)..self.r).map(move |j| (i, j)))
    }

    /// Minimum pairwise distance; ties go to the lexicographically smallest pair.
    pub fn mqcb(&self) -> Mqcb {
        let mut best = Mqcb {
            value: f64::INFINITY,
            pair: (0, 1),
        };
        let mut first = true;
        for (i, j) in self.pairs() {
            let xi = self.xi(i, j);
            if first || xi < best.value {
                best = Mqcb {
                    value: xi,
                    pair: (i, j),
                };
                first = false;
            }
        }
        best
    }

    /// Minimum of `ξ_kl` over all pairs other than `(i, j)`.
    pub fn xi_bar(&self, i: usize, j: usize) -> Result<f64> {
        if self.r < 3 {
            return Err(Error::Undefined(
                "xi_bar needs at least 3 states (no other pairs)".into(),
            ));
        }
        if i >= j || j >= self.r {
            return Err(Error::InvalidArgument(format!(
                "pair ({i}, {j}) is not a valid i < j pair for {} states",
                self.r
            )));
        }
        Ok(self
            .pairs()
            .filter(|&p| p != (i, j))
            .map(|(k, l)| self.xi(k, l))
            .fold(f64::INFINITY, f64::min))
    }

    /// Evaluates `ξ_ij <= ξ̄_ij / 6` at the minimizing pair.
    pub fn condition(&self) -> Result<ConditionReport> {
        let m = self.mqcb();
        let (i, j) = m.pair;
        let xi_bar = self.xi_bar(i, j)?;
        let report = ConditionReport::evaluate(m.pair, self.xi(i, j), xi_bar, m.value);
        debug_assert!(!report.holds || report.mqcb == report.xi_ij);
        Ok(report)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mqcb {
    pub value: f64,
    /// 0-based indices, `i < j`.
    pub pair: (usize, usize),
}

/// Outcome of the least-favorable-pair condition `ξ_ij <= ξ̄_ij / 6`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    /// 0-based indices, `i < j`.
    pub pair: (usize, usize),
    pub xi_ij: f64,
    pub xi_bar: f64,
    pub mqcb: f64,
    pub holds: bool,
    /// `ξ̄ / 6 - ξ_ij`; zero when both sides are infinite.
    pub margin: f64,
}

impl ConditionReport {
    pub fn evaluate(pair: (usize, usize), xi_ij: f64, xi_bar: f64, mqcb: f64) -> Self {
        let sixth = xi_bar / 6.0;
        let margin = sixth - xi_ij;
        Self {
            pair,
            xi_ij,
            xi_bar,
            mqcb,
            holds: xi_ij <= sixth,
            margin: if margin.is_nan() { 0.0 } else { margin },
        }
    }

    /// Reference exponent `min(ξ_ij, ξ̄_ij / 6)` guaranteed by the split detector.
    pub fn reference_level(&self) -> f64 {
        self.xi_ij.min(self.xi_bar / 6.0)
    }
}

/// Multiple quantum Chernoff bound: minimum pairwise distance and its pair.
pub fn mqcb(ensemble: &Ensemble) -> Result<Mqcb> {
    Ok(PairwiseChernoff::compute(ensemble)?.mqcb())
}

/// `ξ̄_ij(Σ)`: minimum distance over the pairs other than `(i, j)` (0-based, `i < j`).
pub fn xi_bar(ensemble: &Ensemble, i: usize, j: usize) -> Result<f64> {
    if ensemble.len() < 3 {
        return Err(Error::Undefined(
            "xi_bar needs at least 3 states (no other pairs)".into(),
        ));
    }
    PairwiseChernoff::compute(ensemble)?.xi_bar(i, j)
}

pub fn theorem_condition(ensemble: &Ensemble) -> Result<ConditionReport> {
    if ensemble.len() < 3 {
        return Err(Error::Undefined(
            "the condition needs at least 3 states".into(),
        ));
    }
    PairwiseChernoff::compute(ensemble)?.condition()
}
