use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

use super::interval::{enclose_rational, enclose_surd, CertifiedInterval};
use super::quadratic::{surd_sign, QuadraticValue};
use super::rational::Rational;
use super::squarefree::exact_sqrt;

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Undecided,
}

impl Comparison {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Equal => Some(Ordering::Equal),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Undecided => None,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            other => other,
        }
    }
}

impl From<Ordering> for Comparison {
    fn from(ord: Ordering) -> Self {
        match ord {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Comparison::Less => "Less",
            Comparison::Equal => "Equal",
            Comparison::Greater => "Greater",
            Comparison::Undecided => "Undecided",
        };
        f.write_str(s)
    }
}

/// Finite sum of quadratic irrationals over possibly different radicands.
///
/// Terms are merged by field: a rational part plus one coefficient per
/// radicand class, where two radicands share a class iff their product is a
/// perfect square. Distinct classes are linearly independent over the
/// rationals, so the merged sum is zero iff every coefficient is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraicSum {
    rational: Rational,
    // (radicand, coefficient); coefficients are nonzero, radicands pairwise
    // in different classes
    surds: Vec<(BigInt, Rational)>,
}

impl AlgebraicSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    /// Irrational terms as `(d, q)` pairs meaning `q*sqrt(d)`.
    pub fn surds(&self) -> &[(BigInt, Rational)] {
        &self.surds
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surds.is_empty()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.surds.is_empty().then(|| self.rational.clone())
    }

    /// The sum as a single quadratic value, when it lives in one field.
    pub fn to_quadratic(&self) -> Option<QuadraticValue> {
        match self.surds.as_slice() {
            [] => Some(QuadraticValue::from_rational(self.rational.clone())),
            [(d, q)] => QuadraticValue::new(self.rational.clone(), q.clone(), d.clone()).ok(),
            _ => None,
        }
    }

    fn add_surd(&mut self, d: &BigInt, q: &Rational) {
        if q.is_zero() || d.is_zero() {
            return;
        }
        for i in 0..self.surds.len() {
            let (existing, coeff) = &self.surds[i];
            let factor = if existing == d {
                Some(Rational::from_integer(1.into()))
            } else {
                // sqrt(d) = s/existing * sqrt(existing) when d existing = s^2
                (d * existing)
                    .to_biguint()
                    .and_then(|p| exact_sqrt(&p))
                    .map(|s| Rational::new(BigInt::from_biguint(Sign::Plus, s), existing.clone()))
            };
            if let Some(factor) = factor {
                let merged = coeff + q * factor;
                if merged.is_zero() {
                    self.surds.remove(i);
                } else {
                    self.surds[i].1 = merged;
                }
                return;
            }
        }
        self.surds.push((d.clone(), q.clone()));
    }

    pub fn push(&mut self, v: &QuadraticValue) {
        self.rational += v.p();
        self.add_surd(v.d(), v.q());
    }

    pub fn push_scaled(&mut self, v: &QuadraticValue, scale: &Rational) {
        self.rational += v.p() * scale;
        self.add_surd(v.d(), &(v.q() * scale));
    }

    pub fn add_rational(&mut self, r: &Rational) {
        self.rational += r;
    }

    pub fn add_sum(&mut self, other: &AlgebraicSum) {
        self.rational += &other.rational;
        for (d, q) in &other.surds {
            self.add_surd(d, q);
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            rational: -&self.rational,
            surds: self.surds.iter().map(|(d, q)| (d.clone(), -q)).collect(),
        }
    }

    pub fn sub(&self, other: &AlgebraicSum) -> Self {
        let mut out = self.clone();
        out.add_sum(&other.neg());
        out
    }

    fn term_count(&self) -> usize {
        1 + self.surds.len()
    }

    /// Enclosure of width below `2^-bits`. Enclosures at increasing `bits`
    /// are nested.
    pub fn enclose(&self, bits: u32) -> CertifiedInterval {
        let n = self.term_count() as u32;
        let extra = 32 - n.leading_zeros() + 1;
        let scale = bits + extra;
        let mut acc = enclose_rational(&self.rational, scale);
        for (d, q) in &self.surds {
            acc = acc.add(&enclose_surd(q, d, scale));
        }
        acc.with_precision(bits)
    }

    /// Sign of the sum, and the precision spent deciding it.
    pub fn sign_within(&self, max_bits: u32) -> (Comparison, u32) {
        match self.surds.as_slice() {
            [] => return (self.rational.cmp(&Rational::zero()).into(), 0),
            [(d, q)] => return (surd_sign(&self.rational, q, d).cmp(&0).into(), 0),
            _ => {}
        }
        let mut bits = 32u32;
        loop {
            let bits_now = bits.min(max_bits);
            let e = self.enclose(bits_now);
            if e.is_positive() {
                return (Comparison::Greater, bits_now);
            }
            if e.is_negative() {
                return (Comparison::Less, bits_now);
            }
            if bits_now >= max_bits {
                return (Comparison::Undecided, bits_now);
            }
            bits = bits.saturating_mul(2);
        }
    }

    /// Nearest-ish double for display and plotting.
    pub fn to_f64(&self) -> f64 {
        if let Some(r) = self.to_rational() {
            return r.to_f64().unwrap_or(f64::NAN);
        }
        let e = self.enclose(64);
        ((e.lo() + e.hi()) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

impl From<QuadraticValue> for AlgebraicSum {
    fn from(v: QuadraticValue) -> Self {
        let mut s = Self::zero();
        s.push(&v);
        s
    }
}

impl From<Rational> for AlgebraicSum {
    fn from(r: Rational) -> Self {
        Self {
            rational: r,
            surds: Vec::new(),
        }
    }
}

impl fmt::Display for AlgebraicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational)?;
        for (d, q) in &self.surds {
            write!(f, " + {q}*sqrt({d})")?;
        }
        Ok(())
    }
}

/// Certified comparison of two sums.
///
/// `Equal` is exact: the merged difference has no terms left. Otherwise the
/// sign of the difference is decided exactly inside one field, or by nested
/// enclosures at 32, 64, 128, ... bits up to `max_bits`.
pub fn compare_sums(a: &AlgebraicSum, b: &AlgebraicSum, max_bits: u32) -> Comparison {
    compare_sums_detailed(a, b, max_bits).0
}

/// As [`compare_sums`], also returning the precision used (0 when exact).
pub fn compare_sums_detailed(a: &AlgebraicSum, b: &AlgebraicSum, max_bits: u32) -> (Comparison, u32) {
    let diff = a.sub(b);
    if diff.is_zero() {
        return (Comparison::Equal, 0);
    }
    diff.sign_within(max_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn surd(q: Rational, d: i64) -> QuadraticValue {
        QuadraticValue::new(Rational::zero(), q, BigInt::from(d)).unwrap()
    }

    #[test]
    fn merges_within_a_field() {
        let mut s = AlgebraicSum::zero();
        s.push(&surd(int(1), 2));
        s.push(&surd(int(1), 3));
        s.push(&surd(int(-1), 2));
        assert_eq!(s.surds().len(), 1);
        s.push(&surd(int(-1), 3));
        assert!(s.is_zero());
    }

    #[test]
    fn mixed_fields_are_ordered() {
        // sqrt 2 + sqrt 3 = 3.146... > pi-ish rational 3.14
        let mut s = AlgebraicSum::from(surd(int(1), 2));
        s.push(&surd(int(1), 3));
        let r = AlgebraicSum::from(rat(314, 100));
        assert_eq!(compare_sums(&s, &r, 1024), Comparison::Greater);
        let (_, bits) = compare_sums_detailed(&s, &r, 1024);
        assert_eq!(bits, 32);
    }

    #[test]
    fn undecided_when_budget_is_too_small() {
        // t is s rounded down to 200 bits
        let mut s = AlgebraicSum::from(surd(int(1), 2));
        s.push(&surd(int(1), 3));
        let t = AlgebraicSum::from(s.enclose(200).lo());
        assert_eq!(compare_sums(&s, &t, 64), Comparison::Undecided);
        assert_eq!(compare_sums(&s, &t, 1024), Comparison::Greater);
    }

    #[test]
    fn exact_equality_is_symbolic() {
        let a = AlgebraicSum::from(surd(int(2), 2));
        let b = AlgebraicSum::from(QuadraticValue::sqrt(&int(8)).unwrap());
        assert_eq!(compare_sums_detailed(&a, &b, 1024), (Comparison::Equal, 0));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..200).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn rational_comparison_agrees(a in small_rational(), b in small_rational()) {
            let got = compare_sums(&a.clone().into(), &b.clone().into(), 1024);
            prop_assert_eq!(got, Comparison::from(a.cmp(&b)));
        }

        #[test]
        fn enclosure_is_sound(p in small_rational(), q in small_rational(), d in 2i64..500, k in 1u32..200) {
            let v = QuadraticValue::new(p.clone(), q.clone(), BigInt::from(d)).unwrap();
            let e = v.enclose(k);
            prop_assert!(e.width() < Rational::new(1.into(), BigInt::from(1) << k as usize) * int(4));
            // lo <= v <= hi, checked exactly against the value
            prop_assert_ne!(v.cmp_rational(&e.lo()), Ordering::Less);
            prop_assert_ne!(v.cmp_rational(&e.hi()), Ordering::Greater);
        }

        #[test]
        fn sum_enclosures_nest(a in small_rational(), b in small_rational(), k in 8u32..120) {
            let mut s = AlgebraicSum::from(surd(a, 2));
            s.push(&surd(b, 3));
            s.push(&surd(int(1), 5));
            let coarse = s.enclose(k);
            let fine = s.enclose(k + 17);
            prop_assert!(coarse.lo() <= fine.lo() && fine.hi() <= coarse.hi());
            prop_assert!(fine.width() < Rational::new(1.into(), BigInt::from(1) << (k + 17) as usize));
        }

        #[test]
        fn same_field_comparison_is_exact(p in small_rational(), q in small_rational(), r in small_rational()) {
            let v = QuadraticValue::new(p, q, BigInt::from(7)).unwrap();
            let (c, bits) = compare_sums_detailed(&v.clone().into(), &r.clone().into(), 1024);
            prop_assert_eq!(bits, 0);
            prop_assert_eq!(c, Comparison::from(v.cmp_rational(&r)));
        }
    }
}
