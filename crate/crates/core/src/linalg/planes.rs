//! Split real/imaginary storage for the `O(d^3)` kernels. Separate `f64`
//! planes let the inner loops compile to packed SIMD arithmetic, which
//! interleaved `Complex64` storage does not.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

/// Products below this many complex multiply-adds use the plain loop.
const SMALL_PRODUCT: usize = 1 << 15;

/// Rows of the right operand kept hot per pass of the blocked product.
const K_BLOCK: usize = 64;

#[derive(Clone, Debug)]
pub(crate) struct SplitMatrix {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SplitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            re: vec![0.0; rows * cols],
            im: vec![0.0; rows * cols],
        }
    }

    pub fn from_complex(m: &ComplexMatrix) -> Self {
        let (re, im) = m.data().iter().map(|z| (z.re, z.im)).unzip();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re,
            im,
        }
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        let data = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(self.rows, self.cols, data).expect("shape preserved")
    }

    #[inline]
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i * self.cols..(i + 1) * self.cols
    }
}

/// `dst += coef * src` on split planes.
#[inline]
pub(crate) fn axpy(
    dst_re: &mut [f64],
    dst_im: &mut [f64],
    src_re: &[f64],
    src_im: &[f64],
    coef: Complex64,
) {
    let (cr, ci) = (coef.re, coef.im);
    for (((dr, di), &sr), &si) in dst_re
        .iter_mut()
        .zip(dst_im.iter_mut())
        .zip(src_re)
        .zip(src_im)
    {
        *dr += cr * sr - ci * si;
        *di += cr * si + ci * sr;
    }
}

/// `Σ_j x_j y_j` (no conjugation) with four independent accumulators.
#[inline]
pub(crate) fn dot(x_re: &[f64], x_im: &[f64], y_re: &[f64], y_im: &[f64]) -> Complex64 {
    let mut acc_re = [0.0f64; 4];
    let mut acc_im = [0.0f64; 4];
    let chunks = x_re.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            let k = 4 * c + l;
            acc_re[l] += x_re[k] * y_re[k] - x_im[k] * y_im[k];
            acc_im[l] += x_re[k] * y_im[k] + x_im[k] * y_re[k];
        }
    }
    let mut re = acc_re.iter().sum::<f64>();
    let mut im = acc_im.iter().sum::<f64>();
    for k in 4 * chunks..x_re.len() {
        re += x_re[k] * y_re[k] - x_im[k] * y_im[k];
        im += x_re[k] * y_im[k] + x_im[k] * y_re[k];
    }
    Complex64::new(re, im)
}

/// Complex product `a b`; shapes must agree.
pub(crate) fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    debug_assert_eq!(a.cols(), b.rows());
    if a.rows() * a.cols() * b.cols() < SMALL_PRODUCT {
        return matmul_simple(a, b);
    }
    let a = SplitMatrix::from_complex(a);
    let b = SplitMatrix::from_complex(b);
    matmul_split(&a, &b).to_complex()
}

fn matmul_simple(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(n, m);
    let data = out.data_mut();
    for i in 0..n {
        let out_row = &mut data[i * m..(i + 1) * m];
        for (k, &x) in a.row(i).iter().enumerate() {
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for (o, &y) in out_row.iter_mut().zip(b.row(k)) {
                *o += x * y;
            }
        }
    }
    out
}

pub(crate) fn matmul_split(a: &SplitMatrix, b: &SplitMatrix) -> SplitMatrix {
    let (n, inner, m) = (a.rows, a.cols, b.cols);
    let mut c = SplitMatrix::zeros(n, m);
    for k0 in (0..inner).step_by(K_BLOCK) {
        let k1 = (k0 + K_BLOCK).min(inner);
        for i in 0..n {
            let rr = c.row_range(i);
            let (c_re, c_im) = (&mut c.re[rr.clone()], &mut c.im[rr]);
            for k in k0..k1 {
                let idx = i * inner + k;
                let coef = Complex64::new(a.re[idx], a.im[idx]);
                if coef.re == 0.0 && coef.im == 0.0 {
                    continue;
                }
                let br = b.row_range(k);
                axpy(c_re, c_im, &b.re[br.clone()], &b.im[br], coef);
            }
        }
    }
    c
}
