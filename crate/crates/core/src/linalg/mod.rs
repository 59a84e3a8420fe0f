//! Dense complex linear algebra: the matrix type, Hermitian eigensolvers and
//! the spectral matrix functions the rest of the crate is written in.

mod eigen;
mod functions;
mod matrix;
mod planes;

pub use eigen::{
    eigh, eigh_jacobi, eigh_tridiagonal, eigvalsh, HermitianEig, JACOBI_MAX_DIM,
    JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL,
};
pub use functions::{
    check_psd_spectrum, eig_floor, eigh_psd, inverse_sqrt_on_support, matrix_power,
    min_eigenvalue, numerical_rank, positive_part, real_trace, spectral_map, sqrt_psd,
    support_projection, trace_norm, TRACE_IMAG_TOL,
};
pub use matrix::ComplexMatrix;

pub use num_complex::Complex64;

/// Relative Hermiticity tolerance: `max|H - H†| <= 1e-10 * (1 + max|H|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues below `-PSD_TOL * max(1, max|λ|)` make a matrix non-PSD.
pub const PSD_TOL: f64 = 1e-10;

/// Relative eigenvalue floor: `λ <= 1e-12 * max|λ|` counts as zero.
pub const EIG_FLOOR_REL: f64 = 1e-12;
