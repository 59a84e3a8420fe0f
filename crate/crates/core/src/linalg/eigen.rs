//! Hermitian eigendecomposition.
//!
//! Two solvers share one contract:
//!
//! * cyclic Jacobi rotations, used up to [`JACOBI_MAX_DIM`]. Each sweep costs
//!   `O(d^3)` and the method converges to full relative accuracy.
//! * Householder reduction to a real symmetric tridiagonal matrix followed by
//!   implicit QL with Wilkinson shifts. One `O(d^3)` reduction replaces the
//!   5-10 Jacobi sweeps, which is what makes `d = 1024` tractable on one core.
//!
//! [`eigh`] dispatches on the dimension; both solvers are public so that each
//! can serve as the oracle for the other.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::planes::{axpy, dot, SplitMatrix};
use crate::error::{Error, Result};

/// Largest dimension handled by the Jacobi solver in [`eigh`].
pub const JACOBI_MAX_DIM: usize = 32;

/// Jacobi stops once the off-diagonal Frobenius mass is below this fraction of `‖H‖_F`.
pub const JACOBI_OFF_TOL: f64 = 1e-12;

pub const JACOBI_MAX_SWEEPS: usize = 50;

const QL_MAX_ITER: usize = 60;

/// Spectral decomposition `H = V diag(λ) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Rebuilds `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        super::functions::spectral_map(self, |x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEig> {
    h.ensure_hermitian()?;
    let h = h.hermitian_part();
    if h.rows() <= JACOBI_MAX_DIM {
        jacobi(h)
    } else {
        Ok(householder_ql(h, true)?.expect_vectors())
    }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    h.ensure_hermitian()?;
    let h = h.hermitian_part();
    if h.rows() <= JACOBI_MAX_DIM {
        Ok(jacobi(h)?.eigenvalues)
    } else {
        Ok(householder_ql(h, false)?.eigenvalues)
    }
}

/// Cyclic Jacobi solver regardless of dimension.
pub fn eigh_jacobi(h: &ComplexMatrix) -> Result<HermitianEig> {
    h.ensure_hermitian()?;
    jacobi(h.hermitian_part())
}

/// Tridiagonal QL solver regardless of dimension.
pub fn eigh_tridiagonal(h: &ComplexMatrix) -> Result<HermitianEig> {
    h.ensure_hermitian()?;
    Ok(householder_ql(h.hermitian_part(), true)?.expect_vectors())
}

fn jacobi(mut a: ComplexMatrix) -> Result<HermitianEig> {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let target = JACOBI_OFF_TOL * a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = [[c, s e^{iφ}], [-s e^{-iφ}, c]] on (p, q); A <- G† A G.
                let s_phase = phase * s;
                let s_phase_conj = s_phase.conj();

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * s_phase_conj;
                    a[(k, q)] = akp * s_phase + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * s_phase;
                    a[(q, k)] = apk * s_phase_conj + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(app - t * g, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * g, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * s_phase_conj;
                    v[(k, q)] = vkp * s_phase + vkq * c;
                }
            }
        }
    }

    let eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(sorted(eigenvalues, &v))
}

struct QlOutput {
    eigenvalues: Vec<f64>,
    eigenvectors: Option<ComplexMatrix>,
}

impl QlOutput {
    fn expect_vectors(self) -> HermitianEig {
        HermitianEig {
            eigenvalues: self.eigenvalues,
            eigenvectors: self.eigenvectors.expect("vectors requested"),
        }
    }
}

/// `H = I - tau v v†` acting on indices `k + 1..n`.
struct Reflector {
    v_re: Vec<f64>,
    v_im: Vec<f64>,
    tau: f64,
}

fn householder_ql(a: ComplexMatrix, want_vectors: bool) -> Result<QlOutput> {
    let n = a.rows();
    let (diag, offdiag, reflectors) = tridiagonalize(SplitMatrix::from_complex(&a), want_vectors);
    drop(a);

    // T = D T_r D† with T_r real: D_{k+1} = D_k e_k / |e_k|.
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let mag = offdiag[k].norm();
        e[k] = mag;
        phases[k + 1] = if mag > 0.0 {
            phases[k] * (offdiag[k] / mag)
        } else {
            phases[k]
        };
    }

    let mut d = diag;
    if !want_vectors {
        tql(&mut d, &mut e, None, n)?;
        d.sort_by(f64::total_cmp);
        return Ok(QlOutput {
            eigenvalues: d,
            eigenvectors: None,
        });
    }

    // Rows of `zt` are eigenvectors of T_r.
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    tql(&mut d, &mut e, Some(&mut zt), n)?;

    // W = D Z, then V = H_0 H_1 ... H_m W.
    let mut w = SplitMatrix::zeros(n, n);
    for i in 0..n {
        for r in 0..n {
            let z = phases[r] * zt[i * n + r];
            w.re[r * n + i] = z.re;
            w.im[r * n + i] = z.im;
        }
    }
    drop(zt);
    let mut u_re = vec![0.0; n];
    let mut u_im = vec![0.0; n];
    for (k, refl) in reflectors.iter().enumerate().rev() {
        if refl.tau == 0.0 {
            continue;
        }
        let start = k + 1;
        u_re.fill(0.0);
        u_im.fill(0.0);
        for r in 0..refl.v_re.len() {
            let coef = Complex64::new(refl.v_re[r], -refl.v_im[r]);
            let rr = w.row_range(start + r);
            axpy(&mut u_re, &mut u_im, &w.re[rr.clone()], &w.im[rr], coef);
        }
        for r in 0..refl.v_re.len() {
            let coef = Complex64::new(refl.v_re[r], refl.v_im[r]) * (-refl.tau);
            let rr = w.row_range(start + r);
            axpy(&mut w.re[rr.clone()], &mut w.im[rr], &u_re, &u_im, coef);
        }
    }

    let eig = sorted(d, &w.to_complex());
    Ok(QlOutput {
        eigenvalues: eig.eigenvalues,
        eigenvectors: Some(eig.eigenvectors),
    })
}

/// `dst += coef * conj(src)`.
#[inline]
fn axpy_conj(dst_re: &mut [f64], dst_im: &mut [f64], src_re: &[f64], src_im: &[f64], coef: Complex64) {
    let (cr, ci) = (coef.re, coef.im);
    for (((dr, di), &sr), &si) in dst_re
        .iter_mut()
        .zip(dst_im.iter_mut())
        .zip(src_re)
        .zip(src_im)
    {
        *dr += cr * sr + ci * si;
        *di += ci * sr - cr * si;
    }
}

/// Reduces a Hermitian matrix to tridiagonal form `Q T Q†`, returning the real
/// diagonal, the complex sub-diagonal `T[k+1, k]` and the reflectors of `Q`.
/// Only the lower triangle of `a` is read and updated.
fn tridiagonalize(mut a: SplitMatrix, keep_reflectors: bool) -> (Vec<f64>, Vec<Complex64>, Vec<Reflector>) {
    let n = a.rows;
    let mut offdiag = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
    let mut reflectors = Vec::new();
    let mut p_re = vec![0.0; n];
    let mut p_im = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let start = k + 1;
        let m = n - start;
        let mut v_re: Vec<f64> = (start..n).map(|i| a.re[i * n + k]).collect();
        let mut v_im: Vec<f64> = (start..n).map(|i| a.im[i * n + k]).collect();
        let x0 = Complex64::new(v_re[0], v_im[0]);
        let tail_norm2: f64 = (1..m).map(|i| v_re[i] * v_re[i] + v_im[i] * v_im[i]).sum();
        if tail_norm2 == 0.0 {
            offdiag[k] = x0;
            if keep_reflectors {
                reflectors.push(Reflector {
                    v_re: Vec::new(),
                    v_im: Vec::new(),
                    tau: 0.0,
                });
            }
            continue;
        }
        let norm = (x0.norm_sqr() + tail_norm2).sqrt();
        let x0_abs = x0.norm();
        let phase = if x0_abs > 0.0 { x0 / x0_abs } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        v_re[0] -= alpha.re;
        v_im[0] -= alpha.im;
        let vnorm2: f64 = v_re.iter().zip(&v_im).map(|(r, i)| r * r + i * i).sum();
        let tau = 2.0 / vnorm2;
        offdiag[k] = alpha;

        // p = A22 v from the lower triangle: row ii contributes its strictly
        // lower part to p[ii] and, conjugated, to p[..ii].
        let (p_re, p_im) = (&mut p_re[..m], &mut p_im[..m]);
        p_re.fill(0.0);
        p_im.fill(0.0);
        for ii in 0..m {
            let base = (start + ii) * n + start;
            let (row_re, row_im) = (&a.re[base..base + ii], &a.im[base..base + ii]);
            let s = dot(row_re, row_im, &v_re[..ii], &v_im[..ii]);
            let diag = a.re[base + ii];
            p_re[ii] += s.re + diag * v_re[ii];
            p_im[ii] += s.im + diag * v_im[ii];
            let vi = Complex64::new(v_re[ii], v_im[ii]);
            axpy_conj(&mut p_re[..ii], &mut p_im[..ii], row_re, row_im, vi);
        }
        let mut vp = 0.0;
        for i in 0..m {
            p_re[i] *= tau;
            p_im[i] *= tau;
            vp += v_re[i] * p_re[i] + v_im[i] * p_im[i];
        }
        // w = p - (tau/2)(v† p) v, with v† p real.
        let beta = 0.5 * tau * vp;
        for i in 0..m {
            p_re[i] -= beta * v_re[i];
            p_im[i] -= beta * v_im[i];
        }
        let (w_re, w_im) = (&*p_re, &*p_im);
        // A22 <- A22 - v w† - w v† on the lower triangle.
        for ii in 0..m {
            let base = (start + ii) * n + start;
            let len = ii + 1;
            let (row_re, row_im) = (&mut a.re[base..base + len], &mut a.im[base..base + len]);
            let vi = Complex64::new(v_re[ii], v_im[ii]);
            let wi = Complex64::new(w_re[ii], w_im[ii]);
            axpy_conj(row_re, row_im, &w_re[..len], &w_im[..len], -vi);
            axpy_conj(row_re, row_im, &v_re[..len], &v_im[..len], -wi);
        }

        if keep_reflectors {
            reflectors.push(Reflector { v_re, v_im, tau });
        }
    }

    let diag = (0..n).map(|i| a.re[i * n + i]).collect();
    (diag, offdiag, reflectors)
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix.
/// `e[k]` is the coupling between `k` and `k + 1`; `zt` rows are rotated along.
fn tql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>, n: usize) -> Result<()> {
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    // Off-diagonals below eps * ‖T‖ are negligible in absolute terms; the
    // relative test alone stalls on clusters of eigenvalues near zero.
    let norm = (0..n)
        .map(|i| d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 })
        .fold(0.0f64, f64::max);
    let negligible = f64::EPSILON * norm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= negligible {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::NoConvergence { sweeps: QL_MAX_ITER });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn sorted(eigenvalues: Vec<f64>, v: &ComplexMatrix) -> HermitianEig {
    let n = eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, dst)] = v[(r, src)];
        }
    }
    HermitianEig {
        eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
        eigenvectors: vecs,
    }
}
