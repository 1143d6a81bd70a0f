//! Minimal 2×2 complex matrix helpers shared by the spin propagators and
//! the diagnostics. Row-major `[[m00, m01], [m10, m11]]`.

use crate::math;
use num_complex::Complex64;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// Unit phase factor `e^{iφ}`.
#[inline]
pub(crate) fn cis(phi: f64) -> Complex64 {
    Complex64::new(math::cos(phi), math::sin(phi))
}

/// Matrix product `a · b`.
#[inline]
pub(crate) fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// Conjugate transpose.
#[inline]
pub(crate) fn adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Matrix-vector product `a · (v0, v1)`.
#[inline]
pub(crate) fn apply(a: &Mat2, v0: Complex64, v1: Complex64) -> (Complex64, Complex64) {
    (
        a[0][0] * v0 + a[0][1] * v1,
        a[1][0] * v0 + a[1][1] * v1,
    )
}

/// Largest entrywise absolute deviation between two matrices.
#[inline]
pub(crate) fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            let d = (a[r][c] - b[r][c]).norm_sqr();
            if d > worst {
                worst = d;
            }
        }
    }
    math::sqrt(worst)
}

/// Expectation `⟨v|a|v⟩` (complex; real for Hermitian `a`).
#[inline]
pub(crate) fn expectation(a: &Mat2, v0: Complex64, v1: Complex64) -> Complex64 {
    let (w0, w1) = apply(a, v0, v1);
    v0.conj() * w0 + v1.conj() * w1
}
