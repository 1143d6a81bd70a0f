//! Scalar math routed through `std` intrinsics or `libm`, so the crate
//! builds both with and without the standard library.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        x.hypot(y)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn fmod(x: f64, y: f64) -> f64 {
        x % y
    }
    #[inline]
    pub fn atan2(y: f64, x: f64) -> f64 {
        y.atan2(x)
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        libm::hypot(x, y)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn fmod(x: f64, y: f64) -> f64 {
        libm::fmod(x, y)
    }
    #[inline]
    pub fn atan2(y: f64, x: f64) -> f64 {
        libm::atan2(y, x)
    }
}

pub(crate) use imp::{atan2, cos, fmod, hypot, ln, sin, sqrt};

use core::f64::consts::TAU;

/// Reduces an angle to the half-open interval `[0, 2*pi)`.
///
/// `fmod` against `2*pi` is exact in IEEE arithmetic, so the only rounding
/// happens in the single corrective addition for negative remainders; a final
/// clamp keeps that addition from landing exactly on `2*pi`.
#[inline]
pub(crate) fn reduce_angle(x: f64) -> f64 {
    let r = fmod(x, TAU);
    let r = if r < 0.0 { r + TAU } else { r };
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_angle_stays_in_range() {
        for &x in &[
            0.0,
            1.0,
            -1.0,
            TAU,
            -TAU,
            10.0 * TAU + 0.5,
            -10.0 * TAU - 0.5,
            1e8,
            -1e8,
            -1e-300,
            f64::MIN_POSITIVE,
        ] {
            let r = reduce_angle(x);
            assert!(
                (0.0..TAU).contains(&r),
                "reduce_angle({x}) = {r} escaped [0, 2*pi)"
            );
        }
    }

    #[test]
    fn reduce_angle_is_identity_on_domain() {
        for k in 0..100 {
            let x = k as f64 * TAU / 100.0;
            assert_eq!(reduce_angle(x), x, "in-range angle {x} must pass through");
        }
    }

    #[test]
    fn reduce_angle_matches_shift_by_full_turns() {
        for k in 1..=5i32 {
            let x = 1.2345;
            let shifted = reduce_angle(x + k as f64 * TAU);
            assert!(
                (shifted - x).abs() < 1e-12,
                "shift by {k} turns moved {x} to {shifted}"
            );
        }
    }
}
