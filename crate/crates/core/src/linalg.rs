//! Dense complex matrices and the matrix exponential.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Scaled norm below which the Taylor series is summed directly.
const TAYLOR_RADIUS: f64 = 0.25;
const TAYLOR_MAX_TERMS: usize = 40;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn norm_1(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |M·M† − I|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(&(m * m.adjoint()), &identity(m.nrows()))
}

/// `exp(A)` by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/4, where
/// forty Taylor terms are far past double precision; the result is then
/// squared `s` times.
pub fn expm(a: &CMatrix) -> CMatrix {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if n == 1 {
        return CMatrix::from_element(1, 1, a[(0, 0)].exp());
    }
    let norm = norm_1(a);
    let squarings = if norm > TAYLOR_RADIUS {
        (norm / TAYLOR_RADIUS).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(2f64.powi(-squarings));

    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=TAYLOR_MAX_TERMS {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
        if norm_1(&term) <= f64::EPSILON * 1e-3 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// 2×2 rotation `[[cos t, −sin t], [sin t, cos t]]`.
pub fn rotation(t: f64) -> CMatrix {
    let (s, c) = t.sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    )
}

/// Block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((at, at), (k, k)).copy_from(b);
        at += k;
    }
    out
}
