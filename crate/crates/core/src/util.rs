//! Conversion helpers between exact big numbers and floating point.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Convert a `BigInt` to `f64` without overflowing: take the top 53 bits and
/// scale by a power of two.
pub(crate) fn bigint_to_f64(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 52 {
        return x.to_f64().unwrap_or(0.0);
    }
    let shift = bits - 52;
    let top = x >> shift;
    top.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

/// Convert a possibly huge `BigRational` to `f64` by shifting numerator and
/// denominator into range separately.
pub(crate) fn ratio_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let ns = (nb - 52).max(0);
    let ds = (db - 52).max(0);
    let nf = (n >> ns).to_f64().unwrap_or(0.0);
    let df = (d >> ds).to_f64().unwrap_or(1.0);
    (nf / df) * 2f64.powi((ns - ds) as i32)
}

/// Natural logarithm of a positive `BigInt`.
pub(crate) fn bigint_ln(x: &BigInt) -> f64 {
    assert!(x.sign() == Sign::Plus, "ln of non-positive integer");
    let bits = x.bits();
    if bits <= 52 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 52;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural logarithm of a positive `BigRational`.
pub(crate) fn ratio_ln(x: &BigRational) -> f64 {
    assert!(
        !x.is_zero() && x.numer().sign() == Sign::Plus,
        "ln of non-positive rational"
    );
    bigint_ln(x.numer()) - bigint_ln(x.denom())
}

/// Best rational approximation of `x` with denominator bounded by
/// `max_denominator`, via the continued fraction expansion.
pub(crate) fn rationalize_f64(x: f64, max_denominator: u64) -> BigRational {
    assert!(x.is_finite());
    let max_den = BigInt::from(max_denominator.max(1));
    let negative = x < 0.0;
    let mut r = x.abs();

    // Convergents p/q of the continued fraction of |x|.
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (BigInt::from(r.floor() as i64), BigInt::from(1));
    r -= r.floor();
    for _ in 0..64 {
        if r < 1e-15 {
            break;
        }
        r = 1.0 / r;
        let a = BigInt::from(r.floor() as i64);
        r -= r.floor();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    let mut out = BigRational::new(p1, q1);
    if negative {
        out = -out;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn ratio_to_f64_handles_huge_values() {
        let big = BigInt::from(3).pow(2000);
        let r = BigRational::new(&big * 7, big.clone());
        assert!((ratio_to_f64(&r) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn bigint_ln_matches_f64_for_small() {
        let x = BigInt::from(1_000_000);
        assert!((bigint_ln(&x) - 1_000_000f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn bigint_ln_scales_for_powers() {
        let x = BigInt::from(2).pow(4000);
        let expected = 4000.0 * std::f64::consts::LN_2;
        assert!((bigint_ln(&x) - expected).abs() < 1e-6);
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        let r = rationalize_f64(0.5, 1000);
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(2)));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let approx = rationalize_f64(phi, 1_000_000);
        let val = ratio_to_f64(&approx);
        assert!((val - phi).abs() < 1e-9);
        assert!(approx.denom() <= &BigInt::from(1_000_000u64));
    }

    #[test]
    fn rationalize_exact_integer() {
        assert!(rationalize_f64(3.0, 10).numer() == &BigInt::from(3));
        assert!(rationalize_f64(3.0, 10).denom().is_one());
    }
}
