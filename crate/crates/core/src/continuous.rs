//! Exact centred maximal function of a step function, the restricted
//! operators with a radius threshold, and their piecewise-Möbius envelopes.
//!
//! For a step function the window average `A(r)` at a fixed `x` has the form
//! `beta/2 + alpha/(2r)` between consecutive critical radii `|x - y|` (`y` a
//! breakpoint), so the supremum is attained at a critical radius or in the
//! limit `r -> inf`, whose value is the mean of the two tails. As a function
//! of `x`, the average at the radius `|x - y|` is Möbius on every cell cut out
//! by the breakpoints and their pairwise midpoints.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, precision_budget, AlgebraicSum, QuadraticValue, Rational};
use crate::mobius::{cmp_quadratic, rational_between, upper_envelope, Abscissa, Mobius};
use crate::stepfn::{RealInterval, StepFunction};

/// Which radii enter the supremum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    /// All radii `r > 0`.
    Full,
    /// Radii `r <= a + x`, for `x >= 0`.
    Small(Rational),
    /// Radii `r >= a + x`, for `x >= 0`.
    Large(Rational),
}

impl Operator {
    fn threshold(&self) -> Option<&Rational> {
        match self {
            Operator::Full => None,
            Operator::Small(a) | Operator::Large(a) => Some(a),
        }
    }

    fn has_tail(&self) -> bool {
        !matches!(self, Operator::Small(_))
    }

    fn check(&self, x: &Rational) -> Result<()> {
        if let Some(a) = self.threshold() {
            if !a.is_positive() {
                return Err(Error::Precondition(format!("threshold {a} must be positive")));
            }
            if x.is_negative() {
                return Err(Error::Precondition(format!("restricted operator needs x >= 0, got {x}")));
            }
        }
        Ok(())
    }

    /// Whether radius `r` at `x` is admitted.
    fn admits(&self, x: &Rational, r: &Rational) -> bool {
        match self {
            Operator::Full => true,
            Operator::Small(a) => r <= &(a + x),
            Operator::Large(a) => r >= &(a + x),
        }
    }
}

/// What a candidate average is anchored at.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// Radius `|x - y|` for a breakpoint `y`.
    Anchor(Rational),
    /// Radius `a + x`, the threshold of a restricted operator.
    Threshold(Rational),
    /// The limit `r -> inf`.
    Tail,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Anchor(y) => write!(f, "anchor {y}"),
            Source::Threshold(a) => write!(f, "threshold {a}"),
            Source::Tail => f.write_str("tail"),
        }
    }
}

/// A Möbius function on an open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusPiece {
    pub function: Mobius,
    pub lo: Abscissa,
    pub hi: Abscissa,
    pub source: Source,
}

impl MobiusPiece {
    pub fn start_value(&self) -> QuadraticValue {
        self.function.at(&self.lo)
    }

    pub fn end_value(&self) -> QuadraticValue {
        self.function.at(&self.hi)
    }
}

/// Value at a single point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Knot {
    pub x: QuadraticValue,
    pub value: QuadraticValue,
}

// pieces dominate segment lists, so boxing them would not save space
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    Knot(Knot),
    Piece(MobiusPiece),
}

/// Function on an interval given by ordered open Möbius pieces and the
/// values at the points between them. A missing knot between two pieces
/// means the point is outside the domain of definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseMobius {
    domain: RealInterval,
    segments: Vec<Segment>,
}

impl PiecewiseMobius {
    pub fn domain(&self) -> &RealInterval {
        &self.domain
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn pieces(&self) -> impl Iterator<Item = &MobiusPiece> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Piece(p) => Some(p),
            Segment::Knot(_) => None,
        })
    }

    pub fn knots(&self) -> impl Iterator<Item = &Knot> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Knot(k) => Some(k),
            Segment::Piece(_) => None,
        })
    }

    /// Boundaries between pieces, in order.
    pub fn breakpoints(&self) -> Vec<QuadraticValue> {
        let mut out: Vec<QuadraticValue> = Vec::new();
        let pieces: Vec<&MobiusPiece> = self.pieces().collect();
        for w in pieces.windows(2) {
            if let Abscissa::At(x) = &w[0].hi {
                out.push(x.clone());
            }
        }
        out
    }

    /// Value at a rational point of the domain.
    pub fn value_at(&self, x: &Rational) -> Option<QuadraticValue> {
        let q = QuadraticValue::from(x.clone());
        let bits = precision_budget();
        for s in &self.segments {
            match s {
                Segment::Knot(k) if k.x == q => return Some(k.value.clone()),
                Segment::Piece(p) => {
                    let after_lo = match &p.lo {
                        Abscissa::NegInf => true,
                        Abscissa::At(l) => cmp_quadratic(l, &q, bits).ok()? == Ordering::Less,
                        Abscissa::PosInf => false,
                    };
                    let before_hi = match &p.hi {
                        Abscissa::PosInf => true,
                        Abscissa::At(h) => cmp_quadratic(&q, h, bits).ok()? == Ordering::Less,
                        Abscissa::NegInf => false,
                    };
                    if after_lo && before_hi {
                        return Some(p.function.eval(x).into());
                    }
                }
                Segment::Knot(_) => {}
            }
        }
        None
    }

    /// Ordered values whose consecutive differences make up the variation:
    /// knot values and the one-sided limits of each piece.
    /// Each value carries the sign of the step from its predecessor when
    /// monotonicity already fixes it.
    fn value_sequence(&self) -> Vec<(QuadraticValue, Option<i8>)> {
        let mut seq = Vec::new();
        for s in &self.segments {
            match s {
                Segment::Knot(k) => seq.push((k.value.clone(), None)),
                Segment::Piece(p) => {
                    seq.push((p.start_value(), None));
                    seq.push((p.end_value(), Some(p.function.monotonicity())));
                }
            }
        }
        seq
    }

    /// Exact pointwise variation over the domain.
    pub fn variation(&self) -> Result<AlgebraicSum> {
        let seq = self.value_sequence();
        let mut total = AlgebraicSum::zero();
        for w in seq.windows(2) {
            let (u, _) = &w[0];
            let (v, hint) = &w[1];
            let sign = match hint {
                Some(s) => *s,
                None => match v.exact_cmp(u) {
                    Some(o) => o as i8,
                    None => cmp_quadratic(v, u, precision_budget())? as i8,
                },
            };
            if sign != 0 {
                let s = int(sign as i64);
                total.push_scaled(v, &s);
                total.push_scaled(u, &-s);
            }
        }
        Ok(total)
    }

    /// Whether the function is monotone in direction `dir` (1 nondecreasing,
    /// -1 nonincreasing) over the whole domain, jumps included.
    pub fn is_monotone(&self, dir: i8) -> Result<bool> {
        let seq = self.value_sequence();
        for w in seq.windows(2) {
            let sign = match w[1].1 {
                Some(s) => s,
                None => cmp_quadratic(&w[1].0, &w[0].0, precision_budget())? as i8,
            };
            if sign != 0 && sign != dir {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Infimum over the domain, counting one-sided limits at open ends.
    pub fn infimum(&self) -> Result<QuadraticValue> {
        let mut best: Option<QuadraticValue> = None;
        for (v, _) in self.value_sequence() {
            best = Some(match best {
                Some(b) if cmp_quadratic(&b, &v, precision_budget())? != Ordering::Greater => b,
                _ => v,
            });
        }
        best.ok_or_else(|| Error::Precondition("empty envelope".into()))
    }

    /// Interior points where the function switches between increasing and
    /// decreasing, each with its value.
    pub fn turning_points(&self) -> Vec<Knot> {
        let mut out = Vec::new();
        let mut last_dir: i8 = 0;
        let mut pending: Option<Knot> = None;
        for s in &self.segments {
            match s {
                Segment::Knot(k) => {
                    pending = Some(k.clone());
                }
                Segment::Piece(p) => {
                    let dir = p.function.monotonicity();
                    if dir != 0 {
                        if last_dir != 0 && dir != last_dir {
                            if let Some(k) = pending.take() {
                                out.push(k);
                            } else if let Abscissa::At(x) = &p.lo {
                                out.push(Knot {
                                    x: x.clone(),
                                    value: p.start_value(),
                                });
                            }
                        }
                        last_dir = dir;
                    }
                    pending = None;
                }
            }
        }
        out
    }

    fn merge_runs(&mut self) {
        let mut out: Vec<Segment> = Vec::with_capacity(self.segments.len());
        for s in self.segments.drain(..) {
            if let Segment::Piece(p) = &s {
                let n = out.len();
                if n >= 2 {
                    if let (Segment::Piece(prev), Segment::Knot(k)) = (&out[n - 2], &out[n - 1]) {
                        if prev.function == p.function && p.function.eval_quadratic(&k.x) == k.value {
                            out.pop();
                            if let Some(Segment::Piece(prev)) = out.last_mut() {
                                prev.hi = p.hi.clone();
                            }
                            continue;
                        }
                    }
                }
            }
            out.push(s);
        }
        self.segments = out;
    }
}

fn write_abscissa(f: &mut fmt::Formatter<'_>, x: &Abscissa) -> fmt::Result {
    write!(f, "{x}")
}

impl fmt::Display for PiecewiseMobius {
    /// One record per line: `(a,b,c,d) on [lo,hi]` for a piece and
    /// `v at x` for a knot.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.segments {
            match s {
                Segment::Piece(p) => {
                    write!(f, "{} on [", p.function)?;
                    write_abscissa(f, &p.lo)?;
                    f.write_str(",")?;
                    write_abscissa(f, &p.hi)?;
                    writeln!(f, "]")?;
                }
                Segment::Knot(k) => writeln!(f, "{} at {}", k.value, k.x)?,
            }
        }
        Ok(())
    }
}

/// `F` with `F(x) = G_j + v_j x` on piece `j`, evaluated in logarithmic time.
struct Primitive<'a> {
    f: &'a StepFunction,
    offsets: Vec<Rational>,
}

impl<'a> Primitive<'a> {
    fn new(f: &'a StepFunction) -> Self {
        let at = f.primitive_at_breakpoints();
        let xs = f.breakpoints();
        let vs = f.interval_values();
        let offsets = if xs.is_empty() {
            vec![Rational::zero()]
        } else {
            (0..vs.len())
                .map(|j| {
                    let r = j.saturating_sub(1);
                    &at[r] - &vs[j] * &xs[r]
                })
                .collect()
        };
        Self { f, offsets }
    }

    fn piece_of(&self, s: &Rational) -> usize {
        self.f.breakpoints().partition_point(|b| b < s)
    }

    fn linear(&self, j: usize) -> (&Rational, &Rational) {
        (&self.offsets[j], &self.f.interval_values()[j])
    }

    fn eval(&self, s: &Rational) -> Rational {
        let (g, v) = self.linear(self.piece_of(s));
        g + v * s
    }

    fn average(&self, x: &Rational, r: &Rational) -> Rational {
        (self.eval(&(x + r)) - self.eval(&(x - r))) / (r * int(2))
    }
}

fn tail_limit(f: &StepFunction) -> Rational {
    (f.left_tail() + f.right_tail()) / int(2)
}

/// Average of `f` over `[x - r, x + r]`, `r > 0`.
pub fn window_average(f: &StepFunction, x: &Rational, r: &Rational) -> Result<Rational> {
    if !r.is_positive() {
        return Err(Error::Precondition(format!("radius {r} must be positive")));
    }
    Ok(f.average(x, r))
}

fn pointwise(f: &StepFunction, x: &Rational, op: &Operator) -> Rational {
    let prim = Primitive::new(f);
    let mut best: Option<Rational> = None;
    let mut consider = |v: Rational| {
        if best.as_ref().is_none_or(|b| &v > b) {
            best = Some(v);
        }
    };
    for y in f.breakpoints() {
        if y == x {
            continue;
        }
        let r = (x - y).abs();
        if op.admits(x, &r) {
            consider(prim.average(x, &r));
        }
    }
    if let Some(a) = op.threshold() {
        consider(prim.average(x, &(a + x)));
    }
    if op.has_tail() {
        consider(tail_limit(f));
    }
    best.expect("at least one candidate radius")
}

/// `Mf(x)`, the supremum of window averages over all radii.
pub fn eval_mf(f: &StepFunction, x: &Rational) -> Rational {
    pointwise(f, x, &Operator::Full)
}

/// Supremum over radii `r <= a + x`, for `x >= 0`.
pub fn m0_eval(f: &StepFunction, x: &Rational, a: &Rational) -> Result<Rational> {
    let op = Operator::Small(a.clone());
    op.check(x)?;
    Ok(pointwise(f, x, &op))
}

/// Supremum over radii `r >= a + x`, for `x >= 0`.
pub fn m1_eval(f: &StepFunction, x: &Rational, a: &Rational) -> Result<Rational> {
    let op = Operator::Large(a.clone());
    op.check(x)?;
    Ok(pointwise(f, x, &op))
}

pub fn eval_operator(f: &StepFunction, x: &Rational, op: &Operator) -> Result<Rational> {
    op.check(x)?;
    Ok(pointwise(f, x, op))
}

struct Prepared<'a> {
    f: &'a StepFunction,
    prim: Primitive<'a>,
    op: Operator,
    /// `(y, F(y), source)` in preference order.
    anchors: Vec<(Rational, Rational, Source)>,
}

impl<'a> Prepared<'a> {
    fn new(f: &'a StepFunction, op: Operator) -> Self {
        let prim = Primitive::new(f);
        let fb = f.primitive_at_breakpoints();
        let mut anchors: Vec<(Rational, Rational, Source)> = f
            .breakpoints()
            .iter()
            .zip(fb)
            .filter(|(y, _)| op.threshold().is_none_or(|a| **y != -a))
            .map(|(y, fy)| (y.clone(), fy, Source::Anchor(y.clone())))
            .collect();
        if let Some(a) = op.threshold() {
            let y = -a;
            let fy = prim.eval(&y);
            anchors.push((y, fy, Source::Threshold(a.clone())));
        }
        anchors.sort_by(|p, q| p.0.abs().cmp(&q.0.abs()).then_with(|| p.0.cmp(&q.0)));
        Self { f, prim, op, anchors }
    }

    /// Cell boundaries strictly inside `interval`, plus its finite ends.
    /// Midpoints with the threshold anchor `-a` are where the window edge
    /// `2x + a` meets a breakpoint and where an anchor enters or leaves the
    /// admitted radii.
    fn refinement(&self, interval: &RealInterval) -> Vec<Rational> {
        let ys: Vec<&Rational> = self.anchors.iter().map(|(y, _, _)| y).collect();
        let mut pts: Vec<Rational> = Vec::new();
        for (i, y) in ys.iter().enumerate() {
            pts.push((*y).clone());
            for z in &ys[i + 1..] {
                pts.push((*y + *z) / int(2));
            }
        }
        pts.retain(|p| interval.contains(p) && Some(p) != interval.lo() && Some(p) != interval.hi());
        pts.extend(interval.lo().cloned());
        pts.extend(interval.hi().cloned());
        pts.sort();
        pts.dedup();
        pts
    }

    /// Active candidates on the open cell containing the rational `t`.
    fn cell_candidates(&self, t: &Rational) -> Vec<(Mobius, Source)> {
        let mut out = Vec::new();
        for (y, fy, source) in &self.anchors {
            let right = y < t;
            let active = match (&self.op, source) {
                (_, Source::Threshold(_)) | (Operator::Full, _) => true,
                (Operator::Small(a), _) => {
                    if right {
                        y >= &-a
                    } else {
                        t * int(2) - y >= -a.clone()
                    }
                }
                (Operator::Large(a), _) => {
                    if right {
                        y <= &-a
                    } else {
                        t * int(2) - y <= -a.clone()
                    }
                }
            };
            if !active {
                continue;
            }
            let s = t * int(2) - y;
            let (g, v) = self.prim.linear(self.prim.piece_of(&s));
            let m = if right {
                // (F(2x - y) - F(y)) / (2x - 2y)
                Mobius::new(g - v * y - fy, v * int(2), y * int(-2), int(2))
            } else {
                // (F(y) - F(2x - y)) / (2y - 2x)
                Mobius::new(fy - g + v * y, v * int(-2), y * int(2), int(-2))
            };
            out.push((m.expect("nonzero denominator"), source.clone()));
        }
        if self.op.has_tail() {
            out.push((Mobius::constant(tail_limit(self.f)), Source::Tail));
        }
        out
    }

    fn knot(&self, x: &Rational) -> Segment {
        Segment::Knot(Knot {
            x: x.clone().into(),
            value: pointwise(self.f, x, &self.op).into(),
        })
    }

    fn envelope(&self, interval: &RealInterval) -> Result<PiecewiseMobius> {
        if let Some(a) = self.op.threshold() {
            if interval.lo().is_none_or(|l| l.is_negative()) {
                return Err(Error::Precondition(format!(
                    "restricted operator with threshold {a} needs an interval inside [0, inf)"
                )));
            }
            self.op.check(&Rational::zero())?;
        }
        if interval.is_empty() {
            return Err(Error::InvalidInterval(format!("{interval} is empty")));
        }
        let pts = self.refinement(interval);
        let mut ends: Vec<Abscissa> = Vec::with_capacity(pts.len() + 2);
        if interval.lo().is_none() {
            ends.push(Abscissa::NegInf);
        }
        ends.extend(pts.iter().cloned().map(Abscissa::rational));
        if interval.hi().is_none() {
            ends.push(Abscissa::PosInf);
        }
        let mut segments = Vec::new();
        for (i, lo) in ends.iter().enumerate() {
            if let Abscissa::At(x) = lo {
                let x = x.to_rational().expect("rational refinement point");
                let interior = i > 0 && i + 1 < ends.len();
                if interior || interval.contains(&x) {
                    segments.push(self.knot(&x));
                }
            }
            let Some(hi) = ends.get(i + 1) else { break };
            let t = rational_between(lo, hi)?;
            let cands = self.cell_candidates(&t);
            let functions: Vec<Mobius> = cands.iter().map(|(m, _)| m.clone()).collect();
            let sweep = upper_envelope(&functions, lo, hi)?;
            for (j, p) in sweep.iter().enumerate() {
                if j > 0 {
                    let x = p.start.finite().expect("interior event").clone();
                    let value = functions[p.winner].eval_quadratic(&x);
                    segments.push(Segment::Knot(Knot { x, value }));
                }
                segments.push(Segment::Piece(MobiusPiece {
                    function: functions[p.winner].clone(),
                    lo: p.start.clone(),
                    hi: p.end.clone(),
                    source: cands[p.winner].1.clone(),
                }));
            }
        }
        let mut env = PiecewiseMobius {
            domain: interval.clone(),
            segments,
        };
        env.merge_runs();
        Ok(env)
    }
}

/// Exact `Mf` on `interval` as a piecewise-Möbius function.
pub fn envelope(f: &StepFunction, interval: &RealInterval) -> Result<PiecewiseMobius> {
    Prepared::new(f, Operator::Full).envelope(interval)
}

/// Exact envelope of a restricted operator on an interval inside `[0, inf)`.
pub fn operator_envelope(f: &StepFunction, interval: &RealInterval, op: Operator) -> Result<PiecewiseMobius> {
    Prepared::new(f, op).envelope(interval)
}

/// Exact variation of `Mf` over `interval`.
pub fn variation_mf(f: &StepFunction, interval: &RealInterval) -> Result<AlgebraicSum> {
    envelope(f, interval)?.variation()
}

/// An open cell between consecutive event abscissae and its candidates.
type Cell = (Abscissa, Abscissa, Vec<(Mobius, Source)>);

/// The average at radius `|x - y|` for each breakpoint `y`, as a function
/// of `x` on `interval` (undefined at `x = y`), followed by the constant
/// tail limit when the tails do not vanish or `f` has no breakpoints.
pub fn candidates(f: &StepFunction, interval: &RealInterval) -> Result<Vec<(Source, PiecewiseMobius)>> {
    if interval.length().is_some_and(|l| l.is_zero()) {
        return Err(Error::InvalidInterval(format!("{interval} has zero length")));
    }
    let prep = Prepared::new(f, Operator::Full);
    let pts = prep.refinement(interval);
    let mut ends: Vec<Abscissa> = Vec::new();
    if interval.lo().is_none() {
        ends.push(Abscissa::NegInf);
    }
    ends.extend(pts.iter().cloned().map(Abscissa::rational));
    if interval.hi().is_none() {
        ends.push(Abscissa::PosInf);
    }
    let cells: Vec<Cell> = ends
        .windows(2)
        .map(|w| {
            let t = rational_between(&w[0], &w[1])?;
            Ok((w[0].clone(), w[1].clone(), prep.cell_candidates(&t)))
        })
        .collect::<Result<_>>()?;
    let mut sources: Vec<Source> = prep.anchors.iter().map(|(_, _, s)| s.clone()).collect();
    let tails_vanish = f.left_tail().is_zero() && f.right_tail().is_zero();
    if !tails_vanish || f.is_constant() {
        sources.push(Source::Tail);
    }
    let mut out = Vec::new();
    for source in sources {
        let mut segments = Vec::new();
        for (i, (lo, hi, cands)) in cells.iter().enumerate() {
            let m = &cands.iter().find(|(_, s)| *s == source).expect("all candidates active").0;
            if let Abscissa::At(x) = lo {
                let anchor_here = matches!(&source, Source::Anchor(y) if x.to_rational().as_ref() == Some(y));
                let inside = i > 0 || interval.contains(&x.to_rational().expect("rational"));
                if inside && !anchor_here {
                    segments.push(Segment::Knot(Knot {
                        x: x.clone(),
                        value: m.eval_quadratic(x),
                    }));
                }
            }
            segments.push(Segment::Piece(MobiusPiece {
                function: m.clone(),
                lo: lo.clone(),
                hi: hi.clone(),
                source: source.clone(),
            }));
        }
        if let (Some(Abscissa::At(x)), true) = (ends.last(), interval.hi_closed()) {
            let (_, _, cands) = cells.last().expect("bounded interval has a cell");
            let m = &cands.iter().find(|(_, s)| *s == source).expect("active").0;
            let anchor_here = matches!(&source, Source::Anchor(y) if x.to_rational().as_ref() == Some(y));
            if !anchor_here {
                segments.push(Segment::Knot(Knot {
                    x: x.clone(),
                    value: m.eval_quadratic(x),
                }));
            }
        }
        let mut pm = PiecewiseMobius {
            domain: interval.clone(),
            segments,
        };
        pm.merge_runs();
        out.push((source, pm));
    }
    Ok(out)
}

/// Maximal subinterval of the real line, possibly a single point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachedInterval {
    pub lo: Abscissa,
    pub lo_closed: bool,
    pub hi: Abscissa,
    pub hi_closed: bool,
}

impl fmt::Display for AttachedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// The set `{x in interval : Mf(x) = f(x)}`.
pub fn attachment_set(f: &StepFunction, interval: &RealInterval) -> Result<Vec<AttachedInterval>> {
    let env = envelope(f, interval)?;
    let mut out: Vec<AttachedInterval> = Vec::new();
    let mut push = |iv: AttachedInterval| {
        if let Some(last) = out.last_mut() {
            if last.hi == iv.lo && (last.hi_closed || iv.lo_closed) {
                last.hi = iv.hi;
                last.hi_closed = iv.hi_closed;
                return;
            }
        }
        out.push(iv);
    };
    for s in env.segments() {
        match s {
            Segment::Knot(k) => {
                let fx = match k.x.to_rational() {
                    Some(r) => f.value_at(&r).clone(),
                    None => f.value_at_irrational(&k.x).clone(),
                };
                if k.value == QuadraticValue::from(fx) {
                    let x = Abscissa::At(k.x.clone());
                    push(AttachedInterval {
                        lo: x.clone(),
                        lo_closed: true,
                        hi: x,
                        hi_closed: true,
                    });
                }
            }
            Segment::Piece(p) => {
                let t = rational_between(&p.lo, &p.hi)?;
                let v = f.value_at(&t);
                let [a, b, c, d] = p.function.coefficients();
                let slope = b - v * d;
                let rhs = v * c - a;
                if slope.is_zero() {
                    if rhs.is_zero() {
                        push(AttachedInterval {
                            lo: p.lo.clone(),
                            lo_closed: false,
                            hi: p.hi.clone(),
                            hi_closed: false,
                        });
                    }
                    continue;
                }
                let root = Abscissa::rational(rhs / slope);
                let bits = precision_budget();
                if p.lo.cmp_within(&root, bits)? == Ordering::Less && root.cmp_within(&p.hi, bits)? == Ordering::Less {
                    push(AttachedInterval {
                        lo: root.clone(),
                        lo_closed: true,
                        hi: root,
                        hi_closed: true,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The representative that is 0 where both one-sided values of `f` vanish
/// and `Mf` elsewhere, as a step function.
pub fn canonical_representative(f: &StepFunction) -> Result<StepFunction> {
    let xs = f.breakpoints();
    let vs = f.interval_values();
    let mut interval_values = Vec::with_capacity(vs.len());
    for (j, v) in vs.iter().enumerate() {
        if v.is_zero() {
            interval_values.push(Rational::zero());
            continue;
        }
        let lo = j.checked_sub(1).map(|i| xs[i].clone());
        let hi = xs.get(j).cloned();
        let piece = RealInterval::new(lo, false, hi, false)?;
        let env = envelope(f, &piece)?;
        let pieces: Vec<&MobiusPiece> = env.pieces().collect();
        match pieces.as_slice() {
            [p] if p.function.is_constant() => {
                interval_values.push(p.function.constant_value().expect("constant").clone())
            }
            _ => {
                return Err(Error::NonRationalRepresentative(format!(
                    "Mf is not constant on the piece {piece}"
                )))
            }
        }
    }
    let point_values = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if vs[i].is_zero() && vs[i + 1].is_zero() {
                Rational::zero()
            } else {
                eval_mf(f, x)
            }
        })
        .collect();
    StepFunction::new(xs.to_vec(), interval_values, point_values)
}
