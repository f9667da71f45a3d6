//! Möbius functions `(a + b x) / (c + d x)` and the exact upper envelope of
//! finitely many of them on an interval.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, precision_budget, solve_quadratic, Comparison, QuadraticValue, Rational};

/// `(a + b x) / (c + d x)` in normal form: constants are `(k, 0, 1, 0)`;
/// otherwise the leading denominator coefficient (`d`, or `c` when `d = 0`)
/// is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mobius {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

impl Mobius {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        if c.is_zero() && d.is_zero() {
            return Err(Error::Precondition("Möbius denominator is identically zero".into()));
        }
        if &a * &d == &b * &c {
            let k = if c.is_zero() { b / d } else { a / c };
            return Ok(Self::constant(k));
        }
        let lead = if d.is_zero() { c.clone() } else { d.clone() };
        Ok(Self {
            a: a / &lead,
            b: b / &lead,
            c: c / &lead,
            d: d / lead,
        })
    }

    pub fn constant(k: Rational) -> Self {
        Self {
            a: k,
            b: Rational::zero(),
            c: Rational::one(),
            d: Rational::zero(),
        }
    }

    pub fn coefficients(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_constant(&self) -> bool {
        self.b.is_zero() && self.d.is_zero()
    }

    pub fn constant_value(&self) -> Option<&Rational> {
        self.is_constant().then_some(&self.a)
    }

    /// Sign of the derivative, which is fixed away from the pole.
    pub fn monotonicity(&self) -> i8 {
        let s = &self.b * &self.c - &self.a * &self.d;
        if s.is_zero() {
            0
        } else if s.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn pole(&self) -> Option<Rational> {
        (!self.d.is_zero()).then(|| -&self.c / &self.d)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        (&self.a + &self.b * x) / (&self.c + &self.d * x)
    }

    pub fn eval_quadratic(&self, x: &QuadraticValue) -> QuadraticValue {
        if let Some(r) = x.to_rational() {
            return self.eval(&r).into();
        }
        let num = x.mul_rational(&self.b).add_rational(&self.a);
        let den = x.mul_rational(&self.d).add_rational(&self.c);
        num.checked_div(&den).expect("evaluated away from the pole")
    }

    /// Common limit at both infinities; `None` for a nonconstant affine
    /// function.
    pub fn limit_at_infinity(&self) -> Option<Rational> {
        if !self.d.is_zero() {
            Some(&self.b / &self.d)
        } else if self.b.is_zero() {
            Some(&self.a / &self.c)
        } else {
            None
        }
    }

    /// Value or limit at an abscissa.
    pub fn at(&self, x: &Abscissa) -> QuadraticValue {
        match x {
            Abscissa::At(v) => self.eval_quadratic(v),
            _ => self
                .limit_at_infinity()
                .expect("bounded at infinity")
                .into(),
        }
    }

    /// Coefficients `(A, B, C)` of the quadratic whose roots are the
    /// crossings of `self` and `other`.
    pub fn crossing(&self, other: &Self) -> (Rational, Rational, Rational) {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&other.a, &other.b, &other.c, &other.d);
        (
            b1 * d2 - b2 * d1,
            a1 * d2 + b1 * c2 - a2 * d1 - b2 * c1,
            a1 * c2 - a2 * c1,
        )
    }

    /// `x -> self(alpha x + beta)`.
    pub fn compose_affine(&self, alpha: &Rational, beta: &Rational) -> Self {
        Self::new(
            &self.a + &self.b * beta,
            &self.b * alpha,
            &self.c + &self.d * beta,
            &self.d * alpha,
        )
        .expect("affine substitution keeps a nonzero denominator")
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.a * k, &self.b * k, self.c.clone(), self.d.clone())
            .expect("denominator unchanged")
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

/// Point of the extended real line with quadratic-irrational finite values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Abscissa {
    NegInf,
    At(QuadraticValue),
    PosInf,
}

impl Abscissa {
    pub fn rational(x: Rational) -> Self {
        Abscissa::At(x.into())
    }

    pub fn finite(&self) -> Option<&QuadraticValue> {
        match self {
            Abscissa::At(v) => Some(v),
            _ => None,
        }
    }

    pub fn cmp_within(&self, other: &Self, bits: u32) -> Result<Ordering> {
        use Abscissa::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ok(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Ok(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Ok(Ordering::Greater),
            (At(x), At(y)) => cmp_quadratic(x, y, bits),
        }
    }
}

impl fmt::Display for Abscissa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Abscissa::NegInf => f.write_str("-inf"),
            Abscissa::At(v) => write!(f, "{v}"),
            Abscissa::PosInf => f.write_str("inf"),
        }
    }
}

pub(crate) fn cmp_quadratic(x: &QuadraticValue, y: &QuadraticValue, bits: u32) -> Result<Ordering> {
    match x.cmp_within(y, bits) {
        Comparison::Undecided => Err(Error::PrecisionExhausted { bits }),
        c => Ok(c.ordering().expect("decided")),
    }
}

/// A rational strictly between `lo < hi`.
pub fn rational_between(lo: &Abscissa, hi: &Abscissa) -> Result<Rational> {
    let bits = precision_budget();
    match (lo, hi) {
        (Abscissa::NegInf, Abscissa::PosInf) => Ok(Rational::zero()),
        (Abscissa::NegInf, Abscissa::At(h)) => Ok(h.enclose(1).lo().floor() - int(1)),
        (Abscissa::At(l), Abscissa::PosInf) => Ok(l.enclose(1).hi().ceil() + int(1)),
        (Abscissa::At(l), Abscissa::At(h)) => {
            if let (Some(l), Some(h)) = (l.to_rational(), h.to_rational()) {
                if l >= h {
                    return Err(Error::Precondition(format!("empty interval ({l}, {h})")));
                }
                return Ok((l + h) / int(2));
            }
            let mut k = 16;
            while k <= 2 * bits {
                let (el, eh) = (l.enclose(k), h.enclose(k));
                if el.hi() < eh.lo() {
                    return Ok((el.hi() + eh.lo()) / int(2));
                }
                k *= 2;
            }
            Err(Error::PrecisionExhausted { bits })
        }
        _ => Err(Error::Precondition(format!("empty interval ({lo}, {hi})"))),
    }
}

/// Maximal run on which one candidate is the upper envelope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepPiece {
    pub start: Abscissa,
    pub end: Abscissa,
    pub winner: usize,
}

struct Sweep<'a> {
    cands: &'a [Mobius],
    bits: u32,
    // None marks identical functions
    roots: HashMap<(usize, usize), Option<Vec<QuadraticValue>>>,
}

impl Sweep<'_> {
    fn roots(&mut self, i: usize, j: usize) -> Option<&Vec<QuadraticValue>> {
        let key = (i.min(j), i.max(j));
        let cands = self.cands;
        self.roots
            .entry(key)
            .or_insert_with(|| {
                let (a, b, c) = cands[key.0].crossing(&cands[key.1]);
                solve_quadratic(&a, &b, &c).ok()
            })
            .as_ref()
    }

    /// First crossing of `i` and `j` strictly inside `(pos, bound)`.
    fn first_root(
        &mut self,
        i: usize,
        j: usize,
        pos: &Abscissa,
        bound: &Abscissa,
    ) -> Result<Option<QuadraticValue>> {
        let bits = self.bits;
        let Some(roots) = self.roots(i, j).cloned() else {
            return Ok(None);
        };
        for r in roots {
            let at = Abscissa::At(r);
            if pos.cmp_within(&at, bits)? == Ordering::Less {
                if at.cmp_within(bound, bits)? == Ordering::Less {
                    return Ok(at.finite().cloned());
                }
                return Ok(None);
            }
        }
        Ok(None)
    }

    fn max_set(&self, values: &[(usize, QuadraticValue)]) -> Result<Vec<usize>> {
        let mut best: Vec<usize> = Vec::new();
        let mut best_value: Option<&QuadraticValue> = None;
        for (i, v) in values {
            match best_value {
                None => {
                    best = vec![*i];
                    best_value = Some(v);
                }
                Some(bv) => match cmp_quadratic(v, bv, self.bits)? {
                    Ordering::Greater => {
                        best = vec![*i];
                        best_value = Some(v);
                    }
                    Ordering::Equal => best.push(*i),
                    Ordering::Less => {}
                },
            }
        }
        Ok(best)
    }

    /// Candidate that is maximal just right of `pos`; lowest index on ties
    /// between identical functions.
    fn winner_after(&mut self, pos: &Abscissa, hi: &Abscissa) -> Result<usize> {
        let values: Vec<(usize, QuadraticValue)> =
            self.cands.iter().enumerate().map(|(i, m)| (i, m.at(pos))).collect();
        let tied = self.max_set(&values)?;
        if tied.len() == 1 {
            return Ok(tied[0]);
        }
        let mut bound = hi.clone();
        for (n, &i) in tied.iter().enumerate() {
            for &j in &tied[n + 1..] {
                if let Some(r) = self.first_root(i, j, pos, &bound)? {
                    bound = Abscissa::At(r);
                }
            }
        }
        let t = rational_between(pos, &bound)?;
        let values: Vec<(usize, QuadraticValue)> = tied
            .iter()
            .map(|&i| (i, self.cands[i].eval(&t).into()))
            .collect();
        Ok(*self.max_set(&values)?.iter().min().expect("nonempty"))
    }

    /// Next point in `(pos, hi)` where another candidate reaches `w`.
    fn next_event(&mut self, w: usize, pos: &Abscissa, hi: &Abscissa) -> Result<Option<QuadraticValue>> {
        let mut bound = hi.clone();
        let mut found = None;
        for g in 0..self.cands.len() {
            if g == w {
                continue;
            }
            if let Some(r) = self.first_root(w, g, pos, &bound)? {
                bound = Abscissa::At(r.clone());
                found = Some(r);
            }
        }
        Ok(found)
    }
}

/// Upper envelope of `cands` on the open interval `(lo, hi)`. Every
/// candidate must be finite on the closure of the interval and bounded at
/// infinite ends.
/// Ties between identical functions go to the lowest index.
pub fn upper_envelope(cands: &[Mobius], lo: &Abscissa, hi: &Abscissa) -> Result<Vec<SweepPiece>> {
    if cands.is_empty() {
        return Err(Error::Precondition("envelope of no candidates".into()));
    }
    let mut sweep = Sweep {
        cands,
        bits: precision_budget(),
        roots: HashMap::new(),
    };
    let mut pieces: Vec<SweepPiece> = Vec::new();
    let mut pos = lo.clone();
    loop {
        let w = sweep.winner_after(&pos, hi)?;
        let end = match sweep.next_event(w, &pos, hi)? {
            Some(r) => Abscissa::At(r),
            None => hi.clone(),
        };
        match pieces.last_mut() {
            Some(last) if last.winner == w => last.end = end.clone(),
            _ => pieces.push(SweepPiece {
                start: pos,
                end: end.clone(),
                winner: w,
            }),
        }
        if end == *hi {
            return Ok(pieces);
        }
        pos = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mobius {
        Mobius::new(int(a), int(b), int(c), int(d)).unwrap()
    }

    #[test]
    fn normal_form() {
        assert_eq!(m(2, 4, 1, 2), Mobius::constant(int(2)));
        assert_eq!(m(1, 0, 0, 2).coefficients()[3], &int(1));
        assert_eq!(m(1, 0, 0, 2).eval(&int(2)), rat(1, 4));
        assert_eq!(m(0, 2, 0, 4).constant_value(), Some(&rat(1, 2)));
    }

    #[test]
    fn limits_and_monotonicity() {
        // 1/(2x)
        let f = m(1, 0, 0, 2);
        assert_eq!(f.limit_at_infinity(), Some(int(0)));
        assert_eq!(f.monotonicity(), -1);
        assert_eq!(f.pole(), Some(int(0)));
        assert_eq!(m(1, 1, 1, 0).limit_at_infinity(), None);
    }

    #[test]
    fn irrational_evaluation() {
        let s2 = QuadraticValue::sqrt(&int(2)).unwrap();
        // x / (1 + x) at sqrt 2 is 2 - sqrt 2
        let v = m(0, 1, 1, 1).eval_quadratic(&s2);
        assert_eq!(v.to_string(), "2 + -1*sqrt(2)");
    }

    #[test]
    fn envelope_of_line_and_hyperbola() {
        // 1/x and x/2 cross at sqrt 2
        let cands = vec![m(1, 0, 0, 1), Mobius::new(int(0), rat(1, 2), int(1), int(0)).unwrap()];
        let lo = Abscissa::rational(rat(1, 2));
        let hi = Abscissa::rational(int(4));
        let env = upper_envelope(&cands, &lo, &hi).unwrap();
        assert_eq!(env.len(), 2);
        assert_eq!(env[0].winner, 0);
        assert_eq!(env[1].winner, 1);
        assert_eq!(env[0].end, Abscissa::At(QuadraticValue::sqrt(&int(2)).unwrap()));
    }

    #[test]
    fn ties_prefer_lower_index() {
        let cands = vec![Mobius::constant(int(1)), Mobius::constant(int(1)), m(0, 1, 1, 0)];
        let env = upper_envelope(&cands, &Abscissa::rational(int(0)), &Abscissa::rational(int(2))).unwrap();
        assert_eq!(env.len(), 2);
        assert_eq!(env[0].winner, 0);
        assert_eq!(env[0].end, Abscissa::rational(int(1)));
        assert_eq!(env[1].winner, 2);
    }

    #[test]
    fn tangency_at_start_is_resolved() {
        // all three equal 1 at x = 1
        let cands = vec![Mobius::constant(int(1)), m(0, 1, 1, 0), m(2, -1, 1, 0)];
        let env = upper_envelope(&cands, &Abscissa::rational(int(1)), &Abscissa::rational(int(3))).unwrap();
        assert_eq!(env, vec![SweepPiece {
            start: Abscissa::rational(int(1)),
            end: Abscissa::rational(int(3)),
            winner: 1,
        }]);
    }

    #[test]
    fn infinite_ends() {
        // (1 + x)/(1 + 2x) tends to 1/2 at both ends
        let cands = vec![Mobius::constant(rat(1, 2)), m(1, 1, 1, 2)];
        let env = upper_envelope(&cands, &Abscissa::rational(int(0)), &Abscissa::PosInf).unwrap();
        assert_eq!(env.len(), 1);
        assert_eq!(env[0].winner, 1);
        let env = upper_envelope(&cands, &Abscissa::NegInf, &Abscissa::rational(int(-1))).unwrap();
        assert_eq!(env[0].winner, 0);
    }

    #[test]
    fn between() {
        let s2 = Abscissa::At(QuadraticValue::sqrt(&int(2)).unwrap());
        let s3 = Abscissa::At(QuadraticValue::sqrt(&int(3)).unwrap());
        let t = rational_between(&s2, &s3).unwrap();
        assert!(&t * &t > int(2) && &t * &t < int(3));
        assert!(rational_between(&Abscissa::NegInf, &s2).unwrap() < int(1));
        assert!(rational_between(&s3, &Abscissa::PosInf).unwrap() > int(2));
    }
}
