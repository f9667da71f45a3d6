use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{ceil_scaled, dyadic, floor_scaled, Rational};

/// Closed enclosure `[lo, hi]` with dyadic endpoints `lo_m / 2^scale`,
/// `hi_m / 2^scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedInterval {
    lo: BigInt,
    hi: BigInt,
    scale: u32,
    precision_bits: u32,
}

impl CertifiedInterval {
    pub(crate) fn from_mantissas(lo: BigInt, hi: BigInt, scale: u32, precision_bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Self {
            lo,
            hi,
            scale,
            precision_bits,
        }
    }

    pub fn lo(&self) -> Rational {
        dyadic(self.lo.clone(), self.scale)
    }

    pub fn hi(&self) -> Rational {
        dyadic(self.hi.clone(), self.scale)
    }

    pub fn width(&self) -> Rational {
        dyadic(&self.hi - &self.lo, self.scale)
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo() <= *x && *x <= self.hi()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Sum of two enclosures taken at the same scale.
    pub(crate) fn add(&self, other: &Self) -> Self {
        assert_eq!(self.scale, other.scale, "enclosures at different scales");
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            scale: self.scale,
            precision_bits: self.precision_bits.min(other.precision_bits),
        }
    }

    pub(crate) fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo(), self.hi())
    }
}

/// Encloses a rational at scale `2^-scale`; width at most `2^-scale`.
pub(crate) fn enclose_rational(r: &Rational, scale: u32) -> CertifiedInterval {
    CertifiedInterval::from_mantissas(floor_scaled(r, scale), ceil_scaled(r, scale), scale, scale)
}

/// Encloses `q * sqrt(d)` at scale `2^-scale`; width at most `2^-scale`.
pub(crate) fn enclose_surd(q: &Rational, d: &BigInt, scale: u32) -> CertifiedInterval {
    if q.is_zero() || d.is_zero() {
        return CertifiedInterval::from_mantissas(BigInt::zero(), BigInt::zero(), scale, scale);
    }
    // sqrt(q^2 d) * 2^scale = sqrt(N 4^scale / D)
    let radicand = q * q * Rational::from_integer(d.clone());
    let scaled = (radicand.numer() << (2 * scale as usize)).div_floor(radicand.denom());
    let m: BigUint = scaled.to_biguint().expect("radicand is nonnegative");
    let s = m.sqrt();
    let exact = &s * &s == m && {
        // floor was exact only if the division had no remainder
        (radicand.numer() << (2 * scale as usize)).mod_floor(radicand.denom()).is_zero()
    };
    let lo = BigInt::from_biguint(Sign::Plus, s.clone());
    let hi = if exact { lo.clone() } else { &lo + BigInt::one() };
    if q.is_negative() {
        CertifiedInterval::from_mantissas(-hi, -lo, scale, scale)
    } else {
        CertifiedInterval::from_mantissas(lo, hi, scale, scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn sqrt_two_enclosure() {
        let e = enclose_surd(&rat(1, 1), &BigInt::from(2), 16);
        let lo = e.lo();
        let hi = e.hi();
        assert!(&lo * &lo <= rat(2, 1));
        assert!(&hi * &hi >= rat(2, 1));
        assert!(e.width() <= rat(1, 65536));
    }

    #[test]
    fn negative_coefficient() {
        let e = enclose_surd(&rat(-3, 2), &BigInt::from(2), 20);
        assert!(e.is_negative());
        // -3/2 sqrt 2 = -2.1213...
        assert!(e.lo() < rat(-212, 100) && e.hi() > rat(-213, 100));
    }

    #[test]
    fn exact_square_has_zero_width() {
        let e = enclose_surd(&rat(1, 2), &BigInt::from(4), 8);
        assert_eq!(e.lo(), rat(1, 1));
        assert_eq!(e.hi(), rat(1, 1));
    }
}
