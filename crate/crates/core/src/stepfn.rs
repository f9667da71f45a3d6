//! Nonnegative step functions with finitely many breakpoints and explicit
//! point values, and real intervals with optional infinite endpoints.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, parse_rational, QuadraticValue, Rational};

/// Interval of the real line. `None` endpoints are infinite and always open.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealInterval {
    lo: Option<Rational>,
    lo_closed: bool,
    hi: Option<Rational>,
    hi_closed: bool,
}

impl RealInterval {
    pub fn new(
        lo: Option<Rational>,
        lo_closed: bool,
        hi: Option<Rational>,
        hi_closed: bool,
    ) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a > b {
                return Err(Error::InvalidInterval(format!("lower {a} exceeds upper {b}")));
            }
        }
        Ok(Self {
            lo_closed: lo_closed && lo.is_some(),
            hi_closed: hi_closed && hi.is_some(),
            lo,
            hi,
        })
    }

    pub fn closed(a: Rational, b: Rational) -> Result<Self> {
        Self::new(Some(a), true, Some(b), true)
    }

    pub fn open(a: Rational, b: Rational) -> Result<Self> {
        Self::new(Some(a), false, Some(b), false)
    }

    pub fn real_line() -> Self {
        Self {
            lo: None,
            lo_closed: false,
            hi: None,
            hi_closed: false,
        }
    }

    /// `[a, inf)`.
    pub fn from_closed(a: Rational) -> Self {
        Self {
            lo: Some(a),
            lo_closed: true,
            hi: None,
            hi_closed: false,
        }
    }

    /// `(-inf, b]`.
    pub fn to_closed(b: Rational) -> Self {
        Self {
            lo: None,
            lo_closed: false,
            hi: Some(b),
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> Option<&Rational> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&Rational> {
        self.hi.as_ref()
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => a == b && !(self.lo_closed && self.hi_closed),
            _ => false,
        }
    }

    /// Length of a bounded interval.
    pub fn length(&self) -> Option<Rational> {
        Some(self.hi.as_ref()? - self.lo.as_ref()?)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match &self.lo {
            None => true,
            Some(a) => x > a || (self.lo_closed && x == a),
        };
        let below = match &self.hi {
            None => true,
            Some(b) => x < b || (self.hi_closed && x == b),
        };
        above && below
    }

    pub fn contains_quadratic(&self, x: &QuadraticValue) -> bool {
        let above = match &self.lo {
            None => true,
            Some(a) => match x.cmp_rational(a) {
                Ordering::Greater => true,
                Ordering::Equal => self.lo_closed,
                Ordering::Less => false,
            },
        };
        let below = match &self.hi {
            None => true,
            Some(b) => match x.cmp_rational(b) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Greater => false,
            },
        };
        above && below
    }

    /// Image under `x -> alpha x + beta`.
    pub fn map_affine(&self, alpha: &Rational, beta: &Rational) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::DegenerateAffineMap);
        }
        let lo = self.lo.as_ref().map(|a| alpha * a + beta);
        let hi = self.hi.as_ref().map(|b| alpha * b + beta);
        if alpha.is_positive() {
            Self::new(lo, self.lo_closed, hi, self.hi_closed)
        } else {
            Self::new(hi, self.hi_closed, lo, self.lo_closed)
        }
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            None => write!(f, "(-inf,")?,
            Some(a) => write!(f, "{}{a},", if self.lo_closed { '[' } else { '(' })?,
        }
        match &self.hi {
            None => write!(f, "inf)"),
            Some(b) => write!(f, "{b}{}", if self.hi_closed { ']' } else { ')' }),
        }
    }
}

impl FromStr for RealInterval {
    type Err = Error;

    /// Parses `[a,b]`, `(a,b]`, `(-inf,b]`, `[a,inf)` and similar.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not an interval: {s:?}"));
        let lo_closed = match t.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match t.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &t[1..t.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let endpoint = |e: &str, inf: &str| -> Result<Option<Rational>> {
            let e = e.trim();
            if e == inf || (inf == "inf" && e == "+inf") {
                Ok(None)
            } else {
                parse_rational(e).map(Some)
            }
        };
        let lo = endpoint(a, "-inf")?;
        let hi = endpoint(b, "inf")?;
        if (lo.is_none() && lo_closed) || (hi.is_none() && hi_closed) {
            return Err(Error::InvalidInterval(format!("infinite endpoint cannot be closed: {s:?}")));
        }
        Self::new(lo, lo_closed, hi, hi_closed)
    }
}

/// Nonnegative step function `f`.
///
/// With breakpoints `x_1 < ... < x_k`, `f = v_i` on `(x_i, x_{i+1})`
/// (`v_0` left of `x_1`, `v_k` right of `x_k`) and `f(x_i) = p_i`.
/// Normalized: no breakpoint has `v_{i-1} = p_i = v_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breakpoints: Vec<Rational>,
    interval_values: Vec<Rational>,
    point_values: Vec<Rational>,
}

/// Position of a real number relative to the breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Inside the open piece with this index.
    Piece(usize),
    /// At the breakpoint with this (zero-based) index.
    Breakpoint(usize),
}

impl StepFunction {
    pub fn new(
        breakpoints: Vec<Rational>,
        interval_values: Vec<Rational>,
        point_values: Vec<Rational>,
    ) -> Result<Self> {
        let k = breakpoints.len();
        if interval_values.len() != k + 1 || point_values.len() != k {
            return Err(Error::InvalidStepFunction(format!(
                "{k} breakpoints need {} interval values and {k} point values, got {} and {}",
                k + 1,
                interval_values.len(),
                point_values.len()
            )));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStepFunction(format!(
                "breakpoints not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        if let Some(v) = interval_values.iter().chain(&point_values).find(|v| v.is_negative()) {
            return Err(Error::InvalidStepFunction(format!("negative value {v}")));
        }
        let mut f = Self {
            breakpoints,
            interval_values,
            point_values,
        };
        f.normalize();
        Ok(f)
    }

    fn normalize(&mut self) {
        let mut i = 0;
        while i < self.breakpoints.len() {
            let removable = self.interval_values[i] == self.point_values[i]
                && self.point_values[i] == self.interval_values[i + 1];
            if removable {
                self.breakpoints.remove(i);
                self.point_values.remove(i);
                self.interval_values.remove(i + 1);
            } else {
                i += 1;
            }
        }
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero()).expect("zero is nonnegative")
    }

    pub fn constant(c: Rational) -> Result<Self> {
        Self::new(Vec::new(), vec![c], Vec::new())
    }

    /// `height * sum of chi_[a,b]`: `height` inside, `height/2` at each
    /// endpoint, 0 elsewhere. Intervals must be bounded with positive length,
    /// and pairwise separated by gaps of positive length.
    pub fn indicator(intervals: &[RealInterval], height: Rational) -> Result<Self> {
        if !height.is_positive() {
            return Err(Error::InvalidStepFunction(format!("height {height} must be positive")));
        }
        let mut ends: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            let (Some(a), Some(b)) = (iv.lo(), iv.hi()) else {
                return Err(Error::InvalidInterval(format!("{iv} is unbounded")));
            };
            if a >= b {
                return Err(Error::InvalidInterval(format!("{iv} has zero length")));
            }
            ends.push((a.clone(), b.clone()));
        }
        ends.sort();
        for w in ends.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::OverlappingIntervals(format!(
                    "[{}, {}] and [{}, {}]",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        let half = &height / int(2);
        let mut breakpoints = Vec::new();
        let mut interval_values = vec![Rational::zero()];
        let mut point_values = Vec::new();
        for (a, b) in ends {
            breakpoints.extend([a, b]);
            point_values.extend([half.clone(), half.clone()]);
            interval_values.extend([height.clone(), Rational::zero()]);
        }
        Self::new(breakpoints, interval_values, point_values)
    }

    /// `sum of heights[j] * chi_[a_j, b_j]` for nested or disjoint intervals.
    pub fn weighted_indicators(parts: &[(Rational, Rational, Rational)]) -> Result<Self> {
        let mut f = Self::zero();
        for (a, b, h) in parts {
            let piece = Self::indicator(&[RealInterval::closed(a.clone(), b.clone())?], h.clone())?;
            f = f.add(&piece);
        }
        Ok(f)
    }

    /// Step function whose value at each breakpoint equals the value to its
    /// right. `values` has one more entry than `breakpoints`.
    pub fn right_continuous(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        let point_values = values.iter().skip(1).take(breakpoints.len()).cloned().collect();
        Self::new(breakpoints, values, point_values)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn interval_values(&self) -> &[Rational] {
        &self.interval_values
    }

    pub fn point_values(&self) -> &[Rational] {
        &self.point_values
    }

    pub fn left_tail(&self) -> &Rational {
        &self.interval_values[0]
    }

    pub fn right_tail(&self) -> &Rational {
        self.interval_values.last().expect("at least one piece")
    }

    pub fn is_constant(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn locate(&self, x: &Rational) -> Location {
        match self.breakpoints.binary_search(x) {
            Ok(i) => Location::Breakpoint(i),
            Err(i) => Location::Piece(i),
        }
    }

    pub fn value_at(&self, x: &Rational) -> &Rational {
        match self.locate(x) {
            Location::Breakpoint(i) => &self.point_values[i],
            Location::Piece(i) => &self.interval_values[i],
        }
    }

    pub fn left_limit(&self, x: &Rational) -> &Rational {
        match self.locate(x) {
            Location::Breakpoint(i) | Location::Piece(i) => &self.interval_values[i],
        }
    }

    pub fn right_limit(&self, x: &Rational) -> &Rational {
        match self.locate(x) {
            Location::Breakpoint(i) => &self.interval_values[i + 1],
            Location::Piece(i) => &self.interval_values[i],
        }
    }

    /// Value of the open piece containing a quadratic irrational point.
    pub fn value_at_irrational(&self, x: &QuadraticValue) -> &Rational {
        let i = self
            .breakpoints
            .partition_point(|b| x.cmp_rational(b) == Ordering::Greater);
        &self.interval_values[i]
    }

    pub fn max_value(&self) -> &Rational {
        self.interval_values
            .iter()
            .chain(&self.point_values)
            .max()
            .expect("at least one piece")
    }

    /// `F(x)`, the signed integral of `f` over `[0, x]`.
    pub fn primitive(&self, x: &Rational) -> Rational {
        let zero = Rational::zero();
        if x >= &zero {
            self.integral_between(&zero, x)
        } else {
            -self.integral_between(x, &zero)
        }
    }

    /// `F` at every breakpoint, in order.
    pub fn primitive_at_breakpoints(&self) -> Vec<Rational> {
        let Some(first) = self.breakpoints.first() else {
            return Vec::new();
        };
        let mut acc = self.primitive(first);
        let mut out = vec![acc.clone()];
        for (i, w) in self.breakpoints.windows(2).enumerate() {
            acc += &self.interval_values[i + 1] * (&w[1] - &w[0]);
            out.push(acc.clone());
        }
        out
    }

    /// Integral of `f` over `[a, b]`, `a <= b`.
    pub fn integral_between(&self, a: &Rational, b: &Rational) -> Rational {
        debug_assert!(a <= b);
        let mut total = Rational::zero();
        let mut pos = a.clone();
        let mut i = self.breakpoints.partition_point(|x| x <= a);
        loop {
            let end = match self.breakpoints.get(i) {
                Some(x) if x < b => x.clone(),
                _ => b.clone(),
            };
            total += &self.interval_values[i] * (&end - &pos);
            if &end == b {
                return total;
            }
            pos = end;
            i += 1;
        }
    }

    /// Average of `f` over `[x - r, x + r]`, `r > 0`.
    pub fn average(&self, x: &Rational, r: &Rational) -> Rational {
        self.integral_between(&(x - r), &(x + r)) / (r * int(2))
    }

    /// Pointwise total variation over `interval`.
    pub fn variation(&self, interval: &RealInterval) -> Rational {
        if interval.is_empty() {
            return Rational::zero();
        }
        let mut seq: Vec<&Rational> = Vec::new();
        let first_inside = match interval.lo() {
            None => {
                seq.push(&self.interval_values[0]);
                0
            }
            Some(a) => match self.locate(a) {
                Location::Breakpoint(i) => {
                    if interval.lo_closed() {
                        seq.push(&self.point_values[i]);
                    }
                    if interval.contains_right_of(a) {
                        seq.push(&self.interval_values[i + 1]);
                    }
                    i + 1
                }
                Location::Piece(i) => {
                    seq.push(&self.interval_values[i]);
                    i
                }
            },
        };
        for i in first_inside..self.breakpoints.len() {
            let x = &self.breakpoints[i];
            let strictly_inside = match interval.hi() {
                None => true,
                Some(b) => x < b,
            };
            if strictly_inside {
                seq.push(&self.point_values[i]);
                seq.push(&self.interval_values[i + 1]);
            } else {
                if interval.hi() == Some(x) && interval.hi_closed() {
                    seq.push(&self.point_values[i]);
                }
                break;
            }
        }
        seq.windows(2).map(|w| (w[0] - w[1]).abs()).sum()
    }

    pub fn total_variation(&self) -> Rational {
        self.variation(&RealInterval::real_line())
    }

    /// `f o phi` for `phi(x) = alpha x + beta`.
    pub fn affine_pullback(&self, alpha: &Rational, beta: &Rational) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::DegenerateAffineMap);
        }
        let mut breakpoints: Vec<Rational> =
            self.breakpoints.iter().map(|x| (x - beta) / alpha).collect();
        let mut interval_values = self.interval_values.clone();
        let mut point_values = self.point_values.clone();
        if alpha.is_negative() {
            breakpoints.reverse();
            interval_values.reverse();
            point_values.reverse();
        }
        Self::new(breakpoints, interval_values, point_values)
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        self.affine_pullback(&int(-1), &Rational::zero())
            .expect("nonzero slope")
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut xs: Vec<Rational> = self.breakpoints.iter().chain(&other.breakpoints).cloned().collect();
        xs.sort();
        xs.dedup();
        let mut interval_values = Vec::with_capacity(xs.len() + 1);
        let mut point_values = Vec::with_capacity(xs.len());
        interval_values.push(self.left_tail() + other.left_tail());
        for x in &xs {
            point_values.push(self.value_at(x) + other.value_at(x));
            interval_values.push(self.right_limit(x) + other.right_limit(x));
        }
        Self::new(xs, interval_values, point_values).expect("sum of valid step functions")
    }

    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::InvalidStepFunction(format!("negative scale {c}")));
        }
        Self::new(
            self.breakpoints.clone(),
            self.interval_values.iter().map(|v| v * c).collect(),
            self.point_values.iter().map(|v| v * c).collect(),
        )
    }

    /// Closed hull `[min, max]` of the support, when both tails vanish and
    /// `f` is not identically zero.
    pub fn support_hull(&self) -> Option<(Rational, Rational)> {
        if !self.left_tail().is_zero() || !self.right_tail().is_zero() || self.breakpoints.is_empty() {
            return None;
        }
        Some((
            self.breakpoints[0].clone(),
            self.breakpoints.last().expect("nonempty").clone(),
        ))
    }
}

impl RealInterval {
    fn contains_right_of(&self, a: &Rational) -> bool {
        match &self.hi {
            None => true,
            Some(b) => b > a,
        }
    }
}

fn join(values: &[Rational]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "breakpoints: {}", join(&self.breakpoints))?;
        writeln!(f, "interval_values: {}", join(&self.interval_values))?;
        writeln!(f, "point_values: {}", join(&self.point_values))
    }
}

impl FromStr for StepFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields: [Option<Vec<Rational>>; 3] = [None, None, None];
        const KEYS: [&str; 3] = ["breakpoints", "interval_values", "point_values"];
        for line in s.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `key: values`, got {line:?}")))?;
            let slot = KEYS
                .iter()
                .position(|k| *k == key.trim())
                .ok_or_else(|| Error::Parse(format!("unknown key {:?}", key.trim())))?;
            if fields[slot].is_some() {
                return Err(Error::Parse(format!("duplicate key {:?}", KEYS[slot])));
            }
            fields[slot] = Some(
                rest.split_whitespace()
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let [b, v, p] = fields;
        let missing = |k: &str| Error::Parse(format!("missing line {k:?}"));
        Self::new(
            b.ok_or_else(|| missing(KEYS[0]))?,
            v.ok_or_else(|| missing(KEYS[1]))?,
            p.ok_or_else(|| missing(KEYS[2]))?,
        )
    }
}
