use num_complex::Complex64;

use super::eigen::{eigh, eigvalsh, HermitianEig};
use super::matrix::ComplexMatrix;
use super::{EIG_FLOOR_REL, PSD_TOL};
use crate::error::{Error, Result};

/// Eigenvalues at or below this are treated as zero: `1e-12 * max|λ|`.
pub fn eig_floor(eigenvalues: &[f64]) -> f64 {
    EIG_FLOOR_REL * eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `V f(Λ) V†`. Terms with `f(λ) = 0` are skipped.
pub fn spectral_map(eig: &HermitianEig, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = eig.dim();
    let v = &eig.eigenvectors;
    let kept: Vec<(usize, f64)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &lambda)| (i, f(lambda)))
        .filter(|&(_, w)| w != 0.0)
        .collect();
    if kept.is_empty() {
        return ComplexMatrix::zeros(n, n);
    }
    // (V_k diag(w)) V_k† over the columns with non-zero weight.
    let k = kept.len();
    let mut left = vec![Complex64::new(0.0, 0.0); n * k];
    let mut right = vec![Complex64::new(0.0, 0.0); k * n];
    for r in 0..n {
        for (c, &(i, w)) in kept.iter().enumerate() {
            let z = v[(r, i)];
            left[r * k + c] = z * w;
            right[c * n + r] = z.conj();
        }
    }
    let left = ComplexMatrix::new(n, k, left).expect("shape");
    let right = ComplexMatrix::new(k, n, right).expect("shape");
    left.matmul(&right).expect("inner dimensions agree")
}

fn psd_tolerance(eigenvalues: &[f64]) -> f64 {
    PSD_TOL * eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

/// Fails with `PsdViolation` when an eigenvalue is below `-1e-10 * max(1, max|λ|)`.
pub fn check_psd_spectrum(eigenvalues: &[f64]) -> Result<()> {
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -psd_tolerance(eigenvalues) {
        return Err(Error::PsdViolation { min_eig: min });
    }
    Ok(())
}

/// Eigendecomposition of a matrix that must be positive semidefinite.
pub fn eigh_psd(a: &ComplexMatrix) -> Result<HermitianEig> {
    let eig = eigh(a)?;
    check_psd_spectrum(&eig.eigenvalues)?;
    Ok(eig)
}

/// Minimum eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(a)?.first().copied().unwrap_or(0.0))
}

/// `A^s` for PSD `A` and `s >= 0`, with `0^s := 0` (so `A^0` is the support projection).
pub fn matrix_power(a: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "matrix power exponent must be finite and >= 0, got {s}"
        )));
    }
    let eig = eigh_psd(a)?;
    Ok(power_from_eig(&eig, s))
}

fn power_from_eig(eig: &HermitianEig, s: f64) -> ComplexMatrix {
    let floor = eig_floor(&eig.eigenvalues);
    spectral_map(eig, |x| if x > floor { x.powf(s) } else { 0.0 })
}

/// Positive part `V max(Λ, 0) V†`.
pub fn positive_part(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(a)?;
    Ok(spectral_map(&eig, |x| x.max(0.0)))
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above the floor.
pub fn support_projection(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh_psd(a)?;
    Ok(power_from_eig(&eig, 0.0))
}

/// Number of eigenvalues above the floor.
pub fn numerical_rank(a: &ComplexMatrix) -> Result<usize> {
    let eigs = eigvalsh(a)?;
    let floor = eig_floor(&eigs);
    Ok(eigs.iter().filter(|&&x| x > floor).count())
}

/// PSD square root.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh_psd(a)?;
    Ok(spectral_map(&eig, |x| x.max(0.0).sqrt()))
}

/// Moore-Penrose inverse square root: `λ^{-1/2}` on the support, zero on the kernel.
pub fn inverse_sqrt_on_support(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh_psd(a)?;
    let floor = eig_floor(&eig.eigenvalues);
    Ok(spectral_map(&eig, |x| if x > floor { 1.0 / x.sqrt() } else { 0.0 }))
}

/// Imaginary parts of traces up to this size are rounding noise.
pub const TRACE_IMAG_TOL: f64 = 1e-9;

/// Real part of a trace that is real in exact arithmetic; fails with
/// `ImaginaryResidue` when the imaginary part reaches `TRACE_IMAG_TOL`.
pub fn real_trace(z: Complex64, what: &str) -> Result<f64> {
    if !(z.im.abs() < TRACE_IMAG_TOL) {
        return Err(Error::ImaginaryResidue {
            what: what.to_string(),
            residue: z.im,
        });
    }
    Ok(z.re)
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(a)?.iter().map(|x| x.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diag(d)
    }

    #[test]
    fn power_of_identity() {
        let i = ComplexMatrix::identity(3);
        assert!(matrix_power(&i, 0.5).unwrap().max_abs_diff(&i) < 1e-14);
    }

    #[test]
    fn power_of_diagonal_with_kernel() {
        let p = matrix_power(&diag(&[4.0, 0.0]), 0.5).unwrap();
        assert!(p.max_abs_diff(&diag(&[2.0, 0.0])) < 1e-14);
        let p0 = matrix_power(&diag(&[4.0, 0.0]), 0.0).unwrap();
        assert!(p0.max_abs_diff(&diag(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn power_rejects_negative_spectrum_and_exponent() {
        assert!(matches!(
            matrix_power(&diag(&[1.0, -0.1]), 0.5),
            Err(Error::PsdViolation { .. })
        ));
        assert!(matrix_power(&diag(&[1.0, 0.0]), -0.5).is_err());
        assert!(matrix_power(&diag(&[1.0, 0.0]), f64::NAN).is_err());
    }

    #[test]
    fn positive_part_of_diagonal() {
        let p = positive_part(&diag(&[3.0, -2.0])).unwrap();
        assert!(p.max_abs_diff(&diag(&[3.0, 0.0])) < 1e-14);
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(positive_part(&z).unwrap(), z);
    }

    #[test]
    fn support_of_diagonal() {
        let p = support_projection(&diag(&[0.7, 0.0, 0.3])).unwrap();
        assert!(p.max_abs_diff(&diag(&[1.0, 0.0, 1.0])) < 1e-14);
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(support_projection(&z).unwrap(), z);
        assert_eq!(numerical_rank(&diag(&[0.7, 0.0, 0.3])).unwrap(), 2);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = sqrt_psd(&diag(&[9.0, 4.0])).unwrap();
        assert!(r.max_abs_diff(&diag(&[3.0, 2.0])) < 1e-14);
        let i = ComplexMatrix::identity(4);
        assert!(sqrt_psd(&i).unwrap().max_abs_diff(&i) < 1e-14);
    }

    #[test]
    fn trace_norm_of_diagonal() {
        assert!((trace_norm(&diag(&[1.0, -1.0])).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn non_hermitian_inputs_are_rejected() {
        let mut m = diag(&[1.0, 1.0]);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(positive_part(&m), Err(Error::HermiticityViolation(_))));
        assert!(matches!(trace_norm(&m), Err(Error::HermiticityViolation(_))));
        assert!(matches!(sqrt_psd(&m), Err(Error::HermiticityViolation(_))));
    }
}
