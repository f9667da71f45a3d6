//! Centred maximal function on the integers and on the half-integer lattice.
//!
//! Sites are `i + offset` with integer index `i` and offset 0 or 1/2. For a
//! centre `n` the windows are the sites `v, v + 1, ..., 2n - v` with `v <= n`;
//! in index terms `[iv, c2 - iv]` with `c2 = 2n - 2 offset`, which is an
//! integer for every site and for the extra centre `n = 0` of the half
//! lattice.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, parse_rational, rat, Rational};
use crate::mobius::{upper_envelope, Abscissa, Mobius};
use crate::stepfn::StepFunction;

/// Which lattice the sites live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lattice {
    Integers,
    HalfIntegers,
}

impl Lattice {
    pub fn offset(self) -> Rational {
        match self {
            Lattice::Integers => Rational::zero(),
            Lattice::HalfIntegers => rat(1, 2),
        }
    }

    fn from_offset(off: &Rational) -> Result<Self> {
        if off.is_zero() {
            Ok(Lattice::Integers)
        } else if *off == rat(1, 2) {
            Ok(Lattice::HalfIntegers)
        } else {
            Err(Error::InvalidLattice(format!("offset {off} is neither 0 nor 1/2")))
        }
    }

    /// Index of a site, if it lies on this lattice.
    pub fn index_of(self, site: &Rational) -> Option<i64> {
        let i = site - self.offset();
        i.is_integer().then(|| i.to_integer().to_i64()).flatten()
    }

    pub fn site(self, index: i64) -> Rational {
        int(index) + self.offset()
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lattice::Integers => f.write_str("Z"),
            Lattice::HalfIntegers => f.write_str("Z + 1/2"),
        }
    }
}

/// Nonnegative function on a lattice that equals `left_tail` below the
/// window and `right_tail` above it.
///
/// Normalized: the window does not start with the left tail value or end
/// with the right tail value. An empty window sits where the tails switch;
/// it is placed at index 0 when the tails agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeFunction {
    lattice: Lattice,
    left_tail: Rational,
    right_tail: Rational,
    start: i64,
    values: Vec<Rational>,
    /// Integer form for fast window searches, when it fits.
    scaled: Option<Scaled>,
}

/// Values as `i128` numerators over one positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Scaled {
    den: i64,
    left: i128,
    right: i128,
    values: Vec<i128>,
}

/// Numerators stay below this so that window sums times counts fit `i128`.
const SCALED_LIMIT: i128 = 1 << 62;
/// Largest window count handled by the fast path.
const COUNT_LIMIT: i64 = 1 << 30;

impl Scaled {
    fn of(f: &LatticeFunction) -> Option<Self> {
        let all = || f.values.iter().chain([&f.left_tail, &f.right_tail]);
        let mut den = BigInt::from(1);
        for v in all() {
            den = den.lcm(v.denom());
        }
        let den_i = den.to_i64()?;
        let num = |v: &Rational| -> Option<i128> {
            let n = (v.numer() * (&den / v.denom())).to_i128()?;
            (n.abs() < SCALED_LIMIT).then_some(n)
        };
        Some(Self {
            den: den_i,
            left: num(&f.left_tail)?,
            right: num(&f.right_tail)?,
            values: f.values.iter().map(num).collect::<Option<_>>()?,
        })
    }

    fn at(&self, start: i64, i: i64) -> i128 {
        if i < start {
            self.left
        } else {
            self.values.get((i - start) as usize).copied().unwrap_or(self.right)
        }
    }
}

impl LatticeFunction {
    /// `values[j]` sits at index `start + j`.
    pub fn new(
        lattice: Lattice,
        left_tail: Rational,
        start: i64,
        values: Vec<Rational>,
        right_tail: Rational,
    ) -> Result<Self> {
        if let Some(v) = values.iter().chain([&left_tail, &right_tail]).find(|v| v.is_negative()) {
            return Err(Error::InvalidLattice(format!("negative value {v}")));
        }
        let mut f = Self {
            lattice,
            left_tail,
            right_tail,
            start,
            values,
            scaled: None,
        };
        f.normalize();
        f.scaled = Scaled::of(&f);
        Ok(f)
    }

    /// Function on the integers with the given values from index `start`
    /// and zero tails.
    pub fn finite(start: i64, values: Vec<Rational>) -> Result<Self> {
        Self::new(Lattice::Integers, Rational::zero(), start, values, Rational::zero())
    }

    pub fn zero(lattice: Lattice) -> Self {
        Self::new(lattice, Rational::zero(), 0, Vec::new(), Rational::zero()).expect("valid")
    }

    fn normalize(&mut self) {
        let lead = self.values.iter().take_while(|v| **v == self.left_tail).count();
        self.values.drain(..lead);
        self.start += lead as i64;
        while self.values.last() == Some(&self.right_tail) {
            self.values.pop();
        }
        if self.values.is_empty() && self.left_tail == self.right_tail {
            self.start = 0;
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn left_tail(&self) -> &Rational {
        &self.left_tail
    }

    pub fn right_tail(&self) -> &Rational {
        &self.right_tail
    }

    /// Index of the first window value.
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// First and last index of the window; `last = first - 1` when empty.
    pub fn window(&self) -> (i64, i64) {
        (self.start, self.start + self.values.len() as i64 - 1)
    }

    pub fn at_index(&self, i: i64) -> &Rational {
        if i < self.start {
            &self.left_tail
        } else {
            self.values.get((i - self.start) as usize).unwrap_or(&self.right_tail)
        }
    }

    pub fn value_at(&self, site: &Rational) -> Result<&Rational> {
        Ok(self.at_index(self.index(site)?))
    }

    fn index(&self, site: &Rational) -> Result<i64> {
        self.lattice.index_of(site).ok_or_else(|| Error::LatticeMismatch {
            site: site.to_string(),
            lattice: self.lattice.to_string(),
        })
    }

    /// `c2 = 2n - 2 offset` for a centre `n` in the lattice or `n = 0`.
    fn centre_code(&self, n: &Rational) -> Result<i64> {
        if self.lattice.index_of(n).is_none() && !n.is_zero() {
            return Err(Error::LatticeMismatch {
                site: n.to_string(),
                lattice: format!("{} with 0", self.lattice),
            });
        }
        let c2 = (n - self.lattice.offset()) * int(2);
        c2.to_integer()
            .to_i64()
            .ok_or_else(|| Error::Precondition(format!("centre {n} out of range")))
    }

    fn tail_mean(&self) -> Rational {
        (&self.left_tail + &self.right_tail) / int(2)
    }

    pub fn max_value(&self) -> &Rational {
        self.values
            .iter()
            .chain([&self.left_tail, &self.right_tail])
            .max()
            .expect("tails exist")
    }

    pub fn is_constant(&self) -> bool {
        self.values.is_empty() && self.left_tail == self.right_tail
    }

    /// `n -> f(-n)`.
    pub fn reflect(&self) -> Self {
        // site -(i + off) has index -i - 2 off
        let shift = if self.lattice == Lattice::HalfIntegers { 1 } else { 0 };
        let (_, last) = self.window();
        let mut values = self.values.clone();
        values.reverse();
        Self::new(
            self.lattice,
            self.right_tail.clone(),
            -last - shift,
            values,
            self.left_tail.clone(),
        )
        .unwrap_or_else(|_| unreachable!("reflection keeps values valid"))
    }

    /// `g(s) = f(s + t)` for `t` a multiple of 1/2; `g` lives on the lattice
    /// shifted by `-t`.
    pub fn translate(&self, t: &Rational) -> Result<Self> {
        let t2 = t * int(2);
        if !t2.is_integer() {
            return Err(Error::InvalidLattice(format!("shift {t} is not a multiple of 1/2")));
        }
        let new_off = (self.lattice.offset() - t).fract();
        let new_off = if new_off.is_negative() { new_off + int(1) } else { new_off };
        let lattice = Lattice::from_offset(&new_off)?;
        // site s of g has index (s - new_off); s + t has index s + t - off in f
        let delta = (t - self.lattice.offset() + &new_off)
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Precondition(format!("shift {t} out of range")))?;
        Self::new(
            lattice,
            self.left_tail.clone(),
            self.start - delta,
            self.values.clone(),
            self.right_tail.clone(),
        )
    }

    /// The translate centring the integer interval `[a, b]` at 0.
    pub fn centred(&self, a: i64, b: i64) -> Result<Self> {
        if self.lattice != Lattice::Integers {
            return Err(Error::InvalidLattice("centring needs a function on Z".into()));
        }
        self.translate(&rat(a + b, 2))
    }
}

impl fmt::Display for LatticeFunction {
    /// `offset; left_tail; v_a ... v_b @ a; right_tail`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "{}; {}; {} @ {}; {}",
            self.lattice.offset(),
            self.left_tail,
            vals.join(" "),
            self.lattice.site(self.start),
            self.right_tail
        )
    }
}

impl FromStr for LatticeFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join(" ");
        let parts: Vec<&str> = text.split(';').map(str::trim).collect();
        let [off, left, window, right] = parts.as_slice() else {
            return Err(Error::Parse(format!(
                "expected `offset; left_tail; values @ first_site; right_tail`, got {s:?}"
            )));
        };
        let lattice = Lattice::from_offset(&parse_rational(off)?)?;
        let (vals, site) = window
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("missing `@ first_site` in {window:?}")))?;
        let site = parse_rational(site)?;
        let start = lattice.index_of(&site).ok_or_else(|| Error::LatticeMismatch {
            site: site.to_string(),
            lattice: lattice.to_string(),
        })?;
        let values = vals
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        Self::new(lattice, parse_rational(left)?, start, values, parse_rational(right)?)
    }
}

/// Set of consecutive sites; `None` ends are unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiscreteInterval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl DiscreteInterval {
    pub fn all() -> Self {
        Self { lo: None, hi: None }
    }

    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a > b {
                return Err(Error::InvalidInterval(format!("lower {a} exceeds upper {b}")));
            }
        }
        Ok(Self { lo, hi })
    }
}

impl FromStr for DiscreteInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let iv: crate::stepfn::RealInterval = s.parse()?;
        if (iv.lo().is_some() && !iv.lo_closed()) || (iv.hi().is_some() && !iv.hi_closed()) {
            return Err(Error::InvalidInterval(format!("discrete intervals use closed finite ends: {s:?}")));
        }
        Self::new(iv.lo().cloned(), iv.hi().cloned())
    }
}

/// Variation of a finite sequence.
pub fn sequence_variation(values: &[Rational]) -> Rational {
    values.windows(2).map(|w| (&w[0] - &w[1]).abs()).sum()
}

/// `sum |f(n) - f(n + 1)|` over consecutive sites of `interval`.
pub fn discrete_var(f: &LatticeFunction, interval: &DiscreteInterval) -> Result<Rational> {
    let (first, last) = f.window();
    let lo = match &interval.lo {
        Some(s) => f.index(&ceil_site(f.lattice, s))?.max(first - 1),
        None => first - 1,
    };
    let hi = match &interval.hi {
        Some(s) => f.index(&floor_site(f.lattice, s))?.min(last + 1),
        None => last + 1,
    };
    Ok((lo..hi).map(|i| (f.at_index(i) - f.at_index(i + 1)).abs()).sum())
}

fn ceil_site(lattice: Lattice, s: &Rational) -> Rational {
    (s - lattice.offset()).ceil() + lattice.offset()
}

fn floor_site(lattice: Lattice, s: &Rational) -> Rational {
    (s - lattice.offset()).floor() + lattice.offset()
}

/// Prefix sums over the window with a margin on both sides.
struct Sums<'a> {
    f: &'a LatticeFunction,
}

impl Sums<'_> {
    /// Sum of `f` over indices `[lo, hi]`, `lo <= hi + 1`.
    fn range(&self, lo: i64, hi: i64) -> Rational {
        let f = self.f;
        let (first, last) = f.window();
        let mut total = Rational::zero();
        if lo < first {
            total += &f.left_tail * int(first.min(hi + 1) - lo);
        }
        let a = lo.max(first);
        let b = hi.min(last);
        for i in a..=b {
            total += f.at_index(i);
        }
        if hi > last {
            total += &f.right_tail * int(hi - (last + 1).max(lo) + 1);
        }
        total
    }
}

/// Largest window average over left indices `iv` in `[to, from]` at centre
/// code `c2`, or `None` when the range is empty.
fn best_average(f: &LatticeFunction, c2: i64, from: i64, to: i64) -> Option<Rational> {
    if from < to {
        return None;
    }
    if let Some(sc) = &f.scaled {
        if c2 - 2 * to + 1 < COUNT_LIMIT {
            return Some(best_average_scaled(f, sc, c2, from, to));
        }
    }
    let mut sum = Sums { f }.range(from, c2 - from);
    let mut best: Option<Rational> = None;
    for iv in (to..=from).rev() {
        let avg = &sum / int(c2 - 2 * iv + 1);
        if best.as_ref().is_none_or(|b| &avg > b) {
            best = Some(avg);
        }
        sum += f.at_index(iv - 1) + f.at_index(c2 - iv + 1);
    }
    best
}

fn best_average_scaled(f: &LatticeFunction, sc: &Scaled, c2: i64, from: i64, to: i64) -> Rational {
    let at = |i: i64| sc.at(f.start, i);
    let mut sum: i128 = (from..=c2 - from).map(at).sum();
    let (mut best_sum, mut best_count) = (sum, (c2 - 2 * from + 1) as i128);
    for iv in (to..from).rev() {
        sum += at(iv) + at(c2 - iv);
        let count = (c2 - 2 * iv + 1) as i128;
        if sum * best_count > best_sum * count {
            (best_sum, best_count) = (sum, count);
        }
    }
    Rational::new(BigInt::from(best_sum), BigInt::from(best_count) * BigInt::from(sc.den))
}

/// Left index below which the window covers the whole deviation region and
/// the average is monotone in the radius.
fn monotone_from(f: &LatticeFunction, c2: i64) -> i64 {
    let (first, last) = f.window();
    (first - 1).min(c2 - last - 1)
}

/// Discrete `Mf(n)` for a site `n`, or for `n = 0` on the half lattice.
pub fn discrete_mf(f: &LatticeFunction, n: &Rational) -> Result<Rational> {
    let c2 = f.centre_code(n)?;
    let top = c2.div_euclid(2);
    let stop = monotone_from(f, c2).min(top);
    let best = best_average(f, c2, top, stop).expect("at least one window");
    Ok(best.max(f.tail_mean()))
}

/// Maximum over windows with left sites `v` in `(-a, n]`; 0 when there are
/// none.
pub fn discrete_m0(f: &LatticeFunction, n: &Rational, a: &Rational) -> Result<Rational> {
    let (c2, ia) = restricted_setup(f, n, a)?;
    let top = c2.div_euclid(2);
    Ok(best_average(f, c2, top, ia + 1).unwrap_or_else(Rational::zero))
}

/// Supremum over windows with left sites `v <= -a`.
pub fn discrete_m1(f: &LatticeFunction, n: &Rational, a: &Rational) -> Result<Rational> {
    let (c2, ia) = restricted_setup(f, n, a)?;
    let stop = monotone_from(f, c2).min(ia);
    let best = best_average(f, c2, ia, stop).expect("at least one window");
    Ok(best.max(f.tail_mean()))
}

/// Returns the centre code and the index of the site `-a`.
fn restricted_setup(f: &LatticeFunction, n: &Rational, a: &Rational) -> Result<(i64, i64)> {
    if !a.is_positive() {
        return Err(Error::Precondition(format!("threshold {a} must be positive")));
    }
    if n.is_negative() {
        return Err(Error::Precondition(format!("restricted operators need n >= 0, got {n}")));
    }
    let ia = f.index(&-a)?;
    Ok((f.centre_code(n)?, ia))
}

/// Independent oracle: direct summation over every radius up to `r_max`,
/// plus the tail mean.
pub fn brute_mf(f: &LatticeFunction, n: &Rational, r_max: i64) -> Result<Rational> {
    let c2 = f.centre_code(n)?;
    let needed = f.radius_bound(n)?;
    if r_max < needed {
        return Err(Error::RadiusTooSmall { given: r_max, needed });
    }
    let top = c2.div_euclid(2);
    let mut best = f.tail_mean();
    for r in 0..=r_max {
        let iv = top - r;
        let mut sum = Rational::zero();
        for i in iv..=c2 - iv {
            sum += f.at_index(i);
        }
        let avg = sum / int(c2 - 2 * iv + 1);
        if avg > best {
            best = avg;
        }
    }
    Ok(best)
}

/// The right-continuous step function equal to `f(n)` on `[n - 1/2, n + 1/2)`.
pub fn embed_to_step(f: &LatticeFunction) -> Result<StepFunction> {
    if f.lattice != Lattice::Integers {
        return Err(Error::InvalidLattice("embedding needs a function on Z".into()));
    }
    let (first, last) = f.window();
    let mut breakpoints = Vec::new();
    let mut values = vec![f.left_tail.clone()];
    for i in first..=last + 1 {
        breakpoints.push(int(i) - rat(1, 2));
        values.push(f.at_index(i).clone());
    }
    StepFunction::right_continuous(breakpoints, values)
}

/// Variation of `Mf` over the sites `n >= last + 1` of a function on Z,
/// where `last` ends the window.
pub fn right_tail_variation(f: &LatticeFunction) -> Result<Rational> {
    if f.right_tail.is_zero() {
        // Mf is nonincreasing where f vanishes, with limit the tail mean
        let (_, last) = f.window();
        return Ok(discrete_mf(f, &int(last + 1))? - f.tail_mean());
    }
    right_tail_variation_sweep(f)
}

/// As [`right_tail_variation`], always through the Möbius envelope of the
/// window averages as functions of a real centre.
pub fn right_tail_variation_sweep(f: &LatticeFunction) -> Result<Rational> {
    if f.lattice != Lattice::Integers {
        return Err(Error::InvalidLattice("tail variation is computed on Z".into()));
    }
    let (first, last) = f.window();
    let lp = &f.right_tail;
    let sums = Sums { f };
    // window [iv, 2n - iv] for n > last: deviation part plus right tail
    let mut cands: Vec<Mobius> = Vec::new();
    for iv in first - 1..=last {
        let p = sums.range(iv, last);
        let a = p - lp * int(iv + last);
        cands.push(Mobius::new(a, lp * int(2), int(1 - 2 * iv), int(2))?);
    }
    cands.push(Mobius::constant(lp.clone()));
    cands.push(Mobius::constant(f.tail_mean()));
    let lo = last + 1;
    let sweep = upper_envelope(&cands, &Abscissa::rational(int(lo)), &Abscissa::PosInf)?;
    let final_piece = sweep.last().expect("nonempty sweep");
    let limit = cands[final_piece.winner]
        .limit_at_infinity()
        .expect("bounded candidates");
    let settle = match &final_piece.start {
        Abscissa::At(x) => {
            let e = x.enclose(8).hi().ceil();
            e.to_integer().to_i64().unwrap_or(i64::MAX).max(lo)
        }
        _ => lo,
    };
    let mut total = Rational::zero();
    let mut prev = discrete_mf(f, &int(lo))?;
    for n in lo + 1..=settle {
        let v = discrete_mf(f, &int(n))?;
        total += (&v - &prev).abs();
        prev = v;
    }
    Ok(total + (prev - limit).abs())
}

/// Variation of `Mf` over all of Z.
pub fn mf_variation_z(f: &LatticeFunction) -> Result<Rational> {
    if f.lattice != Lattice::Integers {
        return Err(Error::InvalidLattice("variation over Z needs a function on Z".into()));
    }
    let (first, last) = f.window();
    let (lo, hi) = (first - 1, last + 1);
    let middle: Vec<Rational> = (lo..=hi).map(|n| discrete_mf(f, &int(n))).collect::<Result<_>>()?;
    Ok(right_tail_variation(&f.reflect())? + sequence_variation(&middle) + right_tail_variation(f)?)
}

/// `Mf` at the sites of `[lo, hi]`, and additionally at 0 on the half
/// lattice when `lo < 0 < hi`.
pub fn mf_profile(f: &LatticeFunction, lo: &Rational, hi: &Rational) -> Result<Vec<(Rational, Rational)>> {
    let mut sites: Vec<Rational> = Vec::new();
    let mut s = ceil_site(f.lattice, lo);
    while &s <= hi {
        sites.push(s.clone());
        s += int(1);
    }
    if f.lattice == Lattice::HalfIntegers && lo <= &Rational::zero() && &Rational::zero() <= hi {
        sites.push(Rational::zero());
        sites.sort();
    }
    sites
        .into_iter()
        .map(|n| discrete_mf(f, &n).map(|v| (n, v)))
        .collect()
}

impl LatticeFunction {
    /// Window span plus the distance from `n` to the window centre, plus
    /// one: radii beyond this only approach the tail mean monotonically.
    pub fn radius_bound(&self, n: &Rational) -> Result<i64> {
        let c2 = self.centre_code(n)?;
        let (first, last) = self.window();
        Ok((last - first + 1).max(0) + ((c2 - first - last).abs() + 1) / 2 + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.left_tail.is_zero()
    }

    pub fn total(&self) -> Option<Rational> {
        (self.left_tail.is_zero() && self.right_tail.is_zero()).then(|| self.values.iter().sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::eval_mf;
    use crate::stepfn::RealInterval;
    use proptest::prelude::*;

    fn point_mass(site: i64) -> LatticeFunction {
        LatticeFunction::finite(site, vec![int(1)]).unwrap()
    }

    #[test]
    fn point_mass_values() {
        let f = point_mass(0);
        assert_eq!(discrete_mf(&f, &int(0)).unwrap(), int(1));
        assert_eq!(discrete_mf(&f, &int(1)).unwrap(), rat(1, 3));
        assert_eq!(brute_mf(&f, &int(1), 50).unwrap(), rat(1, 3));
        assert_eq!(discrete_var(&f, &DiscreteInterval::all()).unwrap(), int(2));
    }

    #[test]
    fn plateau_and_constants() {
        let f = LatticeFunction::finite(0, vec![int(1); 5]).unwrap();
        assert_eq!(discrete_mf(&f, &int(2)).unwrap(), int(1));
        assert_eq!(discrete_var(&f, &DiscreteInterval::all()).unwrap(), int(2));
        let c = LatticeFunction::new(Lattice::Integers, rat(3, 2), 0, vec![], rat(3, 2)).unwrap();
        assert!(c.is_constant());
        assert_eq!(discrete_mf(&c, &int(7)).unwrap(), rat(3, 2));
        assert_eq!(brute_mf(&c, &int(7), 10).unwrap(), rat(3, 2));
        assert_eq!(discrete_var(&c, &DiscreteInterval::all()).unwrap(), int(0));
        let z = LatticeFunction::zero(Lattice::Integers);
        assert_eq!(brute_mf(&z, &int(-3), 5).unwrap(), int(0));
    }

    #[test]
    fn lattice_mismatch_and_small_radius() {
        let f = point_mass(0);
        assert!(matches!(discrete_mf(&f, &rat(1, 2)), Err(Error::LatticeMismatch { .. })));
        assert!(matches!(brute_mf(&f, &int(5), 3), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn half_lattice_centre_zero() {
        // masses at -1/2 and 1/2: the window v = -1/2 at n = 0 has two sites
        let f = LatticeFunction::new(Lattice::HalfIntegers, int(0), -1, vec![int(1), int(1)], int(0)).unwrap();
        assert_eq!(discrete_mf(&f, &int(0)).unwrap(), int(1));
        assert_eq!(discrete_mf(&f, &rat(3, 2)).unwrap(), rat(2, 5));
        assert_eq!(brute_mf(&f, &int(0), 20).unwrap(), int(1));
    }

    #[test]
    fn embedding_point_mass() {
        let f = point_mass(0);
        let fc = embed_to_step(&f).unwrap();
        assert_eq!(fc.breakpoints(), &[rat(-1, 2), rat(1, 2)]);
        assert_eq!(fc.value_at(&rat(-1, 2)), &int(1));
        assert_eq!(fc.value_at(&rat(1, 2)), &int(0));
        assert_eq!(eval_mf(&fc, &int(1)), rat(1, 3));
        let z = embed_to_step(&LatticeFunction::zero(Lattice::Integers)).unwrap();
        assert!(z.is_constant());
    }

    #[test]
    fn restricted_operators() {
        for a in 1..6i64 {
            let a_r = int(a);
            let single = point_mass(-a);
            assert_eq!(discrete_m1(&single, &int(0), &a_r).unwrap(), rat(1, 2 * a + 1));
            let mut vals = vec![int(0); (2 * a + 1) as usize];
            vals[0] = int(1);
            vals[2 * a as usize] = int(1);
            let pair = LatticeFunction::finite(-a, vals).unwrap();
            assert_eq!(discrete_m1(&pair, &int(0), &a_r).unwrap(), rat(2, 2 * a + 1));
            for n in 0..a {
                assert_eq!(discrete_m0(&single, &int(n), &a_r).unwrap(), int(0));
            }
        }
        // no admissible v for M0 at n = 0 on the half lattice with a = 1/2
        let f = LatticeFunction::new(Lattice::HalfIntegers, int(0), -1, vec![int(1)], int(0)).unwrap();
        assert_eq!(discrete_m0(&f, &int(0), &rat(1, 2)).unwrap(), int(0));
    }

    #[test]
    fn text_round_trip() {
        let f: LatticeFunction = "1/2; 0; 1 2/3 0 @ -3/2; 1".parse().unwrap();
        assert_eq!(f.lattice(), Lattice::HalfIntegers);
        assert_eq!(f.start(), -2);
        assert_eq!(f.to_string().parse::<LatticeFunction>().unwrap(), f);
        assert!("0; 0; 1 @ 1/2; 0".parse::<LatticeFunction>().is_err());
        assert!("0; 0; 1; 0".parse::<LatticeFunction>().is_err());
    }

    #[test]
    fn centring_shifts_lattice() {
        let f = LatticeFunction::finite(0, vec![int(1), int(2)]).unwrap();
        let g = f.centred(0, 1).unwrap();
        assert_eq!(g.lattice(), Lattice::HalfIntegers);
        assert_eq!(g.value_at(&rat(-1, 2)).unwrap(), &int(1));
        assert_eq!(g.value_at(&rat(1, 2)).unwrap(), &int(2));
    }

    #[test]
    fn tail_variation_routes_agree_on_example() {
        let f = LatticeFunction::new(Lattice::Integers, int(1), 0, vec![int(3), int(0), int(2)], int(0)).unwrap();
        assert_eq!(right_tail_variation(&f).unwrap(), right_tail_variation_sweep(&f).unwrap());
    }

    fn arb_value() -> impl Strategy<Value = Rational> {
        (0i64..5, 1i64..4).prop_map(|(p, q)| rat(p, q))
    }

    fn arb_lattice_fn(lattice: impl Strategy<Value = Lattice>) -> impl Strategy<Value = LatticeFunction> {
        (
            lattice,
            prop_oneof![Just(int(0)), arb_value()],
            -4i64..4,
            prop::collection::vec(arb_value(), 0..7),
            prop_oneof![Just(int(0)), arb_value()],
        )
            .prop_map(|(l, lt, s, v, rt)| LatticeFunction::new(l, lt, s, v, rt).unwrap())
    }

    fn any_lattice() -> impl Strategy<Value = Lattice> {
        prop_oneof![Just(Lattice::Integers), Just(Lattice::HalfIntegers)]
    }

    /// Direct variation over the integer sites of `[lo, hi]`.
    fn direct_var(f: &LatticeFunction, lo: i64, hi: i64) -> Rational {
        (lo..hi).map(|i| (f.at_index(i) - f.at_index(i + 1)).abs()).sum()
    }

    /// `Mf` over a long integer range, summing differences directly.
    fn long_range_mf_var(f: &LatticeFunction, reach: i64) -> Rational {
        let (first, last) = f.window();
        let vals: Vec<Rational> = (first - reach..=last + reach)
            .map(|n| brute_mf(f, &int(n), f.radius_bound(&int(n)).unwrap()).unwrap())
            .collect();
        sequence_variation(&vals)
    }

    proptest! {
        #[test]
        fn matches_brute_force(f in arb_lattice_fn(any_lattice()), n in -8i64..8, extra in 0i64..3, zero in any::<bool>()) {
            let site = if zero { int(0) } else { f.lattice().site(n) };
            let bound = f.radius_bound(&site).unwrap();
            prop_assert_eq!(discrete_mf(&f, &site).unwrap(), brute_mf(&f, &site, bound + extra).unwrap());
        }

        #[test]
        fn wide_denominators_match_brute_force(f in arb_lattice_fn(any_lattice()), n in -6i64..6) {
            // adding 2^-70 pushes the common denominator past the integer
            // fast path; Mf commutes with v -> v/3 + c
            let tiny = Rational::new(BigInt::from(1), BigInt::from(1u128 << 70));
            let scale = |v: &Rational| v * rat(1, 3) + &tiny;
            let (first, _) = f.window();
            let g = LatticeFunction::new(
                f.lattice(),
                scale(f.left_tail()),
                first,
                f.values().iter().map(scale).collect(),
                scale(f.right_tail()),
            )
            .unwrap();
            prop_assert!(g.scaled.is_none());
            let site = f.lattice().site(n);
            let bound = g.radius_bound(&site).unwrap();
            prop_assert_eq!(discrete_mf(&g, &site).unwrap(), brute_mf(&g, &site, bound).unwrap());
            prop_assert_eq!(discrete_mf(&g, &site).unwrap(), scale(&discrete_mf(&f, &site).unwrap()));
        }

        #[test]
        fn embedding_identity(f in arb_lattice_fn(Just(Lattice::Integers)), n in -10i64..10) {
            let fc = embed_to_step(&f).unwrap();
            prop_assert_eq!(discrete_mf(&f, &int(n)).unwrap(), eval_mf(&fc, &int(n)));
        }

        #[test]
        fn variation_transfers(f in arb_lattice_fn(Just(Lattice::Integers))) {
            let fc = embed_to_step(&f).unwrap();
            prop_assert_eq!(
                discrete_var(&f, &DiscreteInterval::all()).unwrap(),
                fc.variation(&RealInterval::real_line())
            );
        }

        #[test]
        fn restricted_variation_matches_direct(f in arb_lattice_fn(any_lattice()), lo in -9i64..3, len in 0i64..9) {
            let iv = DiscreteInterval::new(Some(f.lattice().site(lo)), Some(f.lattice().site(lo + len))).unwrap();
            prop_assert_eq!(discrete_var(&f, &iv).unwrap(), direct_var(&f, lo, lo + len));
        }

        #[test]
        fn reflection(f in arb_lattice_fn(any_lattice()), n in -8i64..8) {
            let g = f.reflect();
            let site = f.lattice().site(n);
            prop_assert_eq!(g.value_at(&-&site).unwrap(), f.value_at(&site).unwrap());
            prop_assert_eq!(discrete_mf(&g, &-&site).unwrap(), discrete_mf(&f, &site).unwrap());
            prop_assert_eq!(g.reflect(), f);
        }

        #[test]
        fn max_of_restricted(f in arb_lattice_fn(any_lattice()), a in 1i64..5, n in 0i64..5) {
            let a_site = f.lattice().site(a);
            let n_site = if f.lattice() == Lattice::HalfIntegers && n == 0 { int(0) } else { f.lattice().site(n) };
            prop_assume!(n_site <= a_site);
            let m0 = discrete_m0(&f, &n_site, &a_site).unwrap();
            let m1 = discrete_m1(&f, &n_site, &a_site).unwrap();
            prop_assert_eq!(discrete_mf(&f, &n_site).unwrap(), m0.max(m1));
        }

        #[test]
        fn gradient_bound(f in arb_lattice_fn(any_lattice()), a in 1i64..5, n in 0i64..6, m in 0i64..6) {
            let a_site = f.lattice().site(a);
            let s0 = |k: i64| if f.lattice() == Lattice::HalfIntegers && k == 0 { int(0) } else { f.lattice().site(k) };
            let (n, m) = (s0(n), s0(m));
            prop_assume!(n != m && !n.is_negative() && !m.is_negative());
            let mn = discrete_m1(&f, &n, &a_site).unwrap();
            let mm = discrete_m1(&f, &m, &a_site).unwrap();
            let d = (&n - &m).abs();
            let lhs = (&mn - &mm) / &d;
            let mid = &mn / (&n + &a_site + rat(1, 2) + &d);
            let rhs = &mm / (&n + &a_site + rat(1, 2));
            prop_assert!(lhs <= mid && mid <= rhs);
        }

        #[test]
        fn local_variation_bound(f in arb_lattice_fn(any_lattice()), a in 1i64..6) {
            let a_site = f.lattice().site(a);
            let profile: Vec<Rational> = mf_sites(f.lattice(), &a_site)
                .iter()
                .map(|n| discrete_m1(&f, n, &a_site).unwrap())
                .collect();
            let bound = &a_site * int(2) / (&a_site * int(2) + int(1)) * profile.last().unwrap();
            prop_assert!(sequence_variation(&profile) <= bound);
        }

        #[test]
        fn m0_nondecreasing(f in arb_lattice_fn(any_lattice()), a in 1i64..6) {
            let a_site = f.lattice().site(a);
            // make f vanish strictly between -a and a
            let (first, last) = f.window();
            let ia = f.lattice().index_of(&-&a_site).unwrap();
            let ib = f.lattice().index_of(&a_site).unwrap();
            let lo = first.min(ia);
            let hi = last.max(ib);
            let vals: Vec<Rational> = (lo..=hi)
                .map(|i| if ia < i && i < ib { int(0) } else { f.at_index(i).clone() })
                .collect();
            let g = LatticeFunction::new(f.lattice(), f.left_tail().clone(), lo, vals, f.right_tail().clone()).unwrap();
            let profile: Vec<Rational> = mf_sites(g.lattice(), &a_site)
                .iter()
                .map(|n| discrete_m0(&g, n, &a_site).unwrap())
                .collect();
            prop_assert!(profile.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn nonincreasing_beyond_support(f in arb_lattice_fn(Just(Lattice::Integers))) {
            let g = LatticeFunction::new(Lattice::Integers, f.left_tail().clone(), f.start(), f.values().to_vec(), int(0)).unwrap();
            let (_, last) = g.window();
            let vals: Vec<Rational> = (last..last + 12).map(|n| discrete_mf(&g, &int(n)).unwrap()).collect();
            prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn tail_routes_agree(f in arb_lattice_fn(Just(Lattice::Integers))) {
            prop_assert_eq!(right_tail_variation(&f).unwrap(), right_tail_variation_sweep(&f).unwrap());
        }

        #[test]
        fn whole_line_variation_against_long_range(f in arb_lattice_fn(Just(Lattice::Integers))) {
            prop_assume!(f.left_tail().is_zero() && f.right_tail().is_zero());
            // with zero tails Mf decays like 1/n, so a long range leaves a small remainder
            let total = mf_variation_z(&f).unwrap();
            let partial = long_range_mf_var(&f, 40);
            prop_assert!(partial <= total);
            let (first, last) = f.window();
            let mass: Rational = f.values().iter().sum();
            let remainder = mass * int(2) / int(2 * 40 - (last - first) + 1).max(int(1));
            prop_assert!(total <= partial + remainder);
        }
    }

    /// The sites of `[0, a]` together with 0.
    fn mf_sites(lattice: Lattice, a: &Rational) -> Vec<Rational> {
        let mut out = vec![int(0)];
        let mut s = lattice.site(0);
        if s.is_zero() {
            s += int(1);
        }
        while &s <= a {
            out.push(s.clone());
            s += int(1);
        }
        out
    }
}
