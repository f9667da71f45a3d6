use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use super::interval::{enclose_rational, enclose_surd, CertifiedInterval};
use super::rational::{parse_rational, sign, Rational};
use super::squarefree::{exact_sqrt, split_square};
use super::sum::{compare_sums, AlgebraicSum, Comparison};
use crate::error::{Error, Result};

/// Exact real number `p + q*sqrt(d)` with rational `p`, `q` and an integer
/// radicand `d >= 0`.
///
/// Canonical form: `q == 0` iff `d == 0`; otherwise `d > 1` is not a perfect
/// square and has no square factor built from small primes. Two values whose
/// radicands differ by a square factor are recognised as living in the same
/// field, so exact equality never depends on complete factorisation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticValue {
    p: Rational,
    q: Rational,
    d: BigInt,
}

impl QuadraticValue {
    pub fn from_rational(p: Rational) -> Self {
        Self {
            p,
            q: Rational::zero(),
            d: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn new(p: Rational, q: Rational, d: BigInt) -> Result<Self> {
        if d.is_negative() {
            return Err(Error::Parse(format!("negative radicand {d}")));
        }
        if q.is_zero() || d.is_zero() {
            return Ok(Self::from_rational(p));
        }
        let (square, free) = split_square(d.magnitude());
        let q = q * Rational::from_integer(BigInt::from_biguint(Sign::Plus, square));
        if free.is_one() {
            return Ok(Self::from_rational(p + q));
        }
        Ok(Self {
            p,
            q,
            d: BigInt::from_biguint(Sign::Plus, free),
        })
    }

    /// Square root of a nonnegative rational.
    pub fn sqrt(r: &Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Parse(format!("square root of negative {r}")));
        }
        // sqrt(n/m) = sqrt(n m) / m
        let m = r.denom().clone();
        let radicand = r.numer() * &m;
        Self::new(
            Rational::zero(),
            Rational::new(BigInt::one(), m),
            radicand,
        )
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.p.clone())
    }

    /// Exact sign in `{-1, 0, 1}`.
    pub fn signum(&self) -> i8 {
        surd_sign(&self.p, &self.q, &self.d)
    }

    /// Expresses both values over one radicand when they share a field.
    fn align(&self, other: &Self) -> Option<(BigInt, Rational, Rational)> {
        if self.is_rational() {
            return Some((other.d.clone(), Rational::zero(), other.q.clone()));
        }
        if other.is_rational() || self.d == other.d {
            return Some((self.d.clone(), self.q.clone(), other.q.clone()));
        }
        // sqrt(d1) = s/d2 * sqrt(d2) when d1 d2 = s^2
        let product = (&self.d * &other.d).to_biguint()?;
        let s = exact_sqrt(&product)?;
        let factor = Rational::new(BigInt::from_biguint(Sign::Plus, s), other.d.clone());
        Some((other.d.clone(), &self.q * factor, other.q.clone()))
    }

    pub fn same_field(&self, other: &Self) -> bool {
        self.align(other).is_some()
    }

    fn from_parts(p: Rational, q: Rational, d: BigInt) -> Self {
        if q.is_zero() {
            Self::from_rational(p)
        } else {
            Self { p, q, d }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let (d, q1, q2) = self.align(other)?;
        Some(Self::from_parts(&self.p + &other.p, q1 + q2, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let (d, q1, q2) = self.align(other)?;
        let dr = Rational::from_integer(d.clone());
        let p = &self.p * &other.p + &q1 * &q2 * dr;
        let q = &self.p * &q2 + &q1 * &other.p;
        Some(Self::from_parts(p, q, d))
    }

    /// `None` when the fields differ or `other` is zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.signum() == 0 {
            return None;
        }
        let (d, q1, q2) = self.align(other)?;
        let dr = Rational::from_integer(d.clone());
        // (a + b r)(c - e r) / (c^2 - e^2 d)
        let norm = &other.p * &other.p - &q2 * &q2 * &dr;
        let p = (&self.p * &other.p - &q1 * &q2 * &dr) / &norm;
        let q = (&q1 * &other.p - &self.p * &q2) / &norm;
        Some(Self::from_parts(p, q, d))
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        Self::from_parts(&self.p + r, self.q.clone(), self.d.clone())
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        Self::from_parts(&self.p * r, &self.q * r, self.d.clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(-&self.p, -&self.q, self.d.clone())
    }

    /// Exact comparison, available when both values share a field.
    pub fn exact_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other)?;
        Some(diff.signum().cmp(&0))
    }

    /// Total comparison: exact within a field, certified enclosures otherwise.
    pub fn cmp_within(&self, other: &Self, max_bits: u32) -> Comparison {
        match self.exact_cmp(other) {
            Some(ord) => ord.into(),
            None => compare_sums(
                &AlgebraicSum::from(self.clone()),
                &AlgebraicSum::from(other.clone()),
                max_bits,
            ),
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.add_rational(&-r).signum().cmp(&0)
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> CertifiedInterval {
        let scale = bits + 1;
        enclose_rational(&self.p, scale)
            .add(&enclose_surd(&self.q, &self.d, scale))
            .with_precision(bits)
    }
}

/// Exact sign of `p + q sqrt(d)` for a non-square `d`.
pub(crate) fn surd_sign(p: &Rational, q: &Rational, d: &BigInt) -> i8 {
    let sp = sign(p);
    let sq = if d.is_zero() { 0 } else { sign(q) };
    if sq == 0 || sp == sq {
        return if sp == 0 { sq } else { sp };
    }
    if sp == 0 {
        return sq;
    }
    let lhs = p * p;
    let rhs = q * q * Rational::from_integer(d.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => 0,
    }
}

impl From<Rational> for QuadraticValue {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{} + {}*sqrt({})", self.p, self.q, self.d)
        }
    }
}

impl FromStr for QuadraticValue {
    type Err = Error;

    /// Parses `p`, or `p + q*sqrt(d)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some((p, rest)) = s.split_once(" + ") else {
            return Ok(Self::from_rational(parse_rational(s)?));
        };
        let bad = || Error::Parse(format!("not a quadratic value: {s:?}"));
        let (q, radical) = rest.split_once("*sqrt(").ok_or_else(bad)?;
        let d = radical.strip_suffix(')').ok_or_else(bad)?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        Self::new(parse_rational(p)?, parse_rational(q)?, d)
    }
}

/// Real roots of `A x^2 + B x + C`, in increasing order.
pub fn solve_quadratic(a: &Rational, b: &Rational, c: &Rational) -> Result<Vec<QuadraticValue>> {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() {
                Err(Error::IdenticallyZeroPolynomial)
            } else {
                Ok(Vec::new())
            };
        }
        return Ok(vec![QuadraticValue::from_rational(-c / b)]);
    }
    let disc = b * b - Rational::from_integer(BigInt::from(4)) * a * c;
    let two_a = a * Rational::from_integer(BigInt::from(2));
    let centre = -b / &two_a;
    match sign(&disc) {
        -1 => Ok(Vec::new()),
        0 => Ok(vec![QuadraticValue::from_rational(centre)]),
        _ => {
            let root = QuadraticValue::sqrt(&disc)?;
            let offset = root.mul_rational(&two_a.recip());
            let r1 = offset.neg().add_rational(&centre);
            let r2 = offset.add_rational(&centre);
            if a.is_positive() {
                Ok(vec![r1, r2])
            } else {
                Ok(vec![r2, r1])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn qv(p: Rational, q: Rational, d: i64) -> QuadraticValue {
        QuadraticValue::new(p, q, BigInt::from(d)).unwrap()
    }

    #[test]
    fn sqrt_two_roots() {
        let roots = solve_quadratic(&int(1), &int(0), &int(-2)).unwrap();
        assert_eq!(roots, vec![qv(int(0), int(-1), 2), qv(int(0), int(1), 2)]);
    }

    #[test]
    fn linear_and_empty() {
        assert_eq!(
            solve_quadratic(&int(0), &int(2), &int(-1)).unwrap(),
            vec![QuadraticValue::from_rational(rat(1, 2))]
        );
        assert!(solve_quadratic(&int(1), &int(0), &int(1)).unwrap().is_empty());
        assert!(matches!(
            solve_quadratic(&int(0), &int(0), &int(0)),
            Err(Error::IdenticallyZeroPolynomial)
        ));
        assert!(solve_quadratic(&int(0), &int(0), &int(3)).unwrap().is_empty());
    }

    #[test]
    fn negative_leading_coefficient_orders_roots() {
        let roots = solve_quadratic(&int(-1), &int(0), &int(3)).unwrap();
        assert_eq!(roots[0].cmp_within(&roots[1], 64), Comparison::Less);
    }

    #[test]
    fn canonical_radicand() {
        let v = qv(int(1), int(1), 8);
        assert_eq!(v.q(), &int(2));
        assert_eq!(v.d(), &BigInt::from(2));
        let r = qv(int(1), int(3), 9);
        assert_eq!(r.to_rational(), Some(int(10)));
        assert_eq!(QuadraticValue::sqrt(&rat(1, 2)).unwrap(), qv(int(0), rat(1, 2), 2));
    }

    #[test]
    fn sign_and_order() {
        assert_eq!(qv(int(-1), int(1), 2).signum(), 1);
        assert_eq!(qv(rat(3, 2), int(-1), 2).signum(), 1);
        assert_eq!(qv(int(1), int(-1), 2).signum(), -1);
        let s2 = QuadraticValue::sqrt(&int(2)).unwrap();
        assert_eq!(s2.cmp_rational(&rat(3, 2)), Ordering::Less);
        let s3 = QuadraticValue::sqrt(&int(3)).unwrap();
        assert_eq!(s2.cmp_within(&s3, 64), Comparison::Less);
    }

    #[test]
    fn field_arithmetic() {
        let a = qv(int(1), int(1), 2);
        let b = qv(int(1), int(-1), 2);
        assert_eq!(a.checked_mul(&b).unwrap(), QuadraticValue::from_rational(int(-1)));
        let inv = QuadraticValue::from_rational(int(1)).checked_div(&a).unwrap();
        assert_eq!(inv, qv(int(-1), int(1), 2));
        // sqrt(2) and sqrt(8) share a field
        let s8 = QuadraticValue {
            p: int(0),
            q: int(1),
            d: BigInt::from(8),
        };
        let s2 = qv(int(0), int(1), 2);
        assert_eq!(s8.checked_sub(&s2).unwrap(), s2);
        assert!(s2.checked_add(&qv(int(0), int(1), 3)).is_none());
    }

    #[test]
    fn text_round_trip() {
        let v = qv(rat(-1, 3), rat(5, 7), 6);
        assert_eq!(v.to_string(), "-1/3 + 5/7*sqrt(6)");
        assert_eq!(v.to_string().parse::<QuadraticValue>().unwrap(), v);
        assert_eq!("2/3".parse::<QuadraticValue>().unwrap(), rat(2, 3).into());
    }
}
