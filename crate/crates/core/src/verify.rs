//! Checkers for the variation bounds, their equality cases and the lemmas
//! behind them, with seeded instance generators and suite drivers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::continuous::{eval_mf, m1_eval, operator_envelope, envelope, variation_mf, Operator};
use crate::discrete::{
    discrete_m0, discrete_m1, discrete_mf, discrete_var, mf_variation_z, sequence_variation, DiscreteInterval,
    Lattice, LatticeFunction,
};
use crate::error::{Error, Result};
use crate::exact::{compare_sums_detailed, int, precision_budget, rat, AlgebraicSum, Comparison, Rational};
use crate::stepfn::{RealInterval, StepFunction};

/// Outcome of the hypothesis "f = 0 or f = Mf".
///
/// `admissible` iff `witnesses` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub admissible: bool,
    pub witnesses: Vec<String>,
}

impl HypothesisCheck {
    fn from_witnesses(witnesses: Vec<String>) -> Self {
        Self {
            admissible: witnesses.is_empty(),
            witnesses,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    HoldsWithEquality,
    #[serde(rename = "VIOLATION")]
    Violation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "Holds",
            Verdict::HoldsWithEquality => "HoldsWithEquality",
            Verdict::Violation => "VIOLATION",
        })
    }
}

/// Comparison of `var(Mf)` with `var(f)` for one instance.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub instance: String,
    pub var_f: Rational,
    pub var_mf: AlgebraicSum,
    pub verdict: Verdict,
    /// From the structural characterization only.
    pub equality_predicted: bool,
    pub comparison_precision_used: u32,
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    instance: &'a str,
    var_f: String,
    var_mf: String,
    var_mf_approx: f64,
    verdict: Verdict,
    equality_predicted: bool,
    comparison_precision_used: u32,
}

impl VerificationReport {
    /// Equality observed exactly when predicted.
    pub fn is_coherent(&self) -> bool {
        (self.verdict == Verdict::HoldsWithEquality) == self.equality_predicted
    }

    /// One JSON object on a single line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ReportRecord {
            instance: &self.instance,
            var_f: self.var_f.to_string(),
            var_mf: self.var_mf.to_string(),
            var_mf_approx: self.var_mf.to_f64(),
            verdict: self.verdict,
            equality_predicted: self.equality_predicted,
            comparison_precision_used: self.comparison_precision_used,
        })
        .expect("serializable")
    }
}

fn verdict_of(var_mf: &AlgebraicSum, var_f: &Rational) -> Result<(Verdict, u32)> {
    let (cmp, bits) = compare_sums_detailed(var_mf, &AlgebraicSum::from(var_f.clone()), precision_budget());
    let verdict = match cmp {
        Comparison::Less => Verdict::Holds,
        Comparison::Equal => Verdict::HoldsWithEquality,
        Comparison::Greater => Verdict::Violation,
        Comparison::Undecided => return Err(Error::Undecided { bits }),
    };
    Ok((verdict, bits))
}

/// "f = 0 or f = Mf" on every piece of `f`; point values are exempt.
///
/// On an open piece with value `v > 0` we have `Mf >= v`, so the check is
/// that the envelope there is the constant `v`.
pub fn hypothesis_continuous(f: &StepFunction) -> Result<HypothesisCheck> {
    let xs = f.breakpoints();
    let mut witnesses = Vec::new();
    for (j, v) in f.interval_values().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let lo = j.checked_sub(1).map(|i| xs[i].clone());
        let hi = xs.get(j).cloned();
        let piece = RealInterval::new(lo, false, hi, false)?;
        let env = envelope(f, &piece)?;
        let flat = env.pieces().all(|p| p.function.constant_value() == Some(v))
            && env.knots().all(|k| k.value.to_rational().as_ref() == Some(v));
        if !flat {
            witnesses.push(format!("f = {v} < Mf somewhere on {piece}"));
        }
    }
    Ok(HypothesisCheck::from_witnesses(witnesses))
}

/// "f(n) = 0 or f(n) = Mf(n)" for every integer `n`.
///
/// Beyond the window, `Mf` is the maximum of the tail value and window
/// averages that are monotone in `n` and tend to the tail value, so the sites
/// next to the window decide the tails.
pub fn hypothesis_discrete(f: &LatticeFunction) -> Result<HypothesisCheck> {
    require_integers(f)?;
    let (first, last) = f.window();
    let mut witnesses = Vec::new();
    for n in first - 1..=last + 1 {
        let v = f.at_index(n);
        if v.is_zero() {
            continue;
        }
        let m = discrete_mf(f, &int(n))?;
        if &m != v {
            witnesses.push(format!("f({n}) = {v} < Mf({n}) = {m}"));
        }
    }
    Ok(HypothesisCheck::from_witnesses(witnesses))
}

fn require_integers(f: &LatticeFunction) -> Result<()> {
    if f.lattice() != Lattice::Integers {
        return Err(Error::InvalidLattice("expected a function on Z".into()));
    }
    Ok(())
}

/// `f` is constant, or `{f > 0}` is a bounded interval of positive length
/// and every point value lies between the adjacent one-sided values.
pub fn equality_predicted_continuous(f: &StepFunction) -> bool {
    if f.is_constant() {
        return true;
    }
    if !f.left_tail().is_zero() || !f.right_tail().is_zero() {
        return false;
    }
    let vs = f.interval_values();
    let ps = f.point_values();
    // interleave: piece 0, point 0, piece 1, ..., piece n
    let mut positive: Vec<(usize, bool)> = Vec::new();
    for (j, v) in vs.iter().enumerate() {
        positive.push((2 * j, v.is_positive()));
        if let Some(p) = ps.get(j) {
            positive.push((2 * j + 1, p.is_positive()));
        }
    }
    let on: Vec<usize> = positive.iter().filter(|(_, b)| *b).map(|(i, _)| *i).collect();
    let contiguous = on.windows(2).all(|w| w[1] == w[0] + 1);
    let has_piece = on.iter().any(|i| i % 2 == 0);
    let between = ps.iter().enumerate().all(|(i, p)| {
        let (l, r) = (&vs[i], &vs[i + 1]);
        l.min(r) <= p && p <= l.max(r)
    });
    contiguous && has_piece && between
}

/// `f` is constant, or `{f > 0}` is a bounded nonempty discrete interval.
pub fn equality_predicted_discrete(f: &LatticeFunction) -> bool {
    f.is_constant()
        || (f.left_tail().is_zero()
            && f.right_tail().is_zero()
            && !f.values().is_empty()
            && f.values().iter().all(|v| v.is_positive()))
}

/// `var(Mf) <= var(f)` over the real line, with the equality case.
pub fn check_continuous(f: &StepFunction) -> Result<VerificationReport> {
    let hyp = hypothesis_continuous(f)?;
    if !hyp.admissible {
        return Err(Error::HypothesisViolated(Box::new(hyp)));
    }
    let var_f = f.total_variation();
    let var_mf = variation_mf(f, &RealInterval::real_line())?;
    let (verdict, bits) = verdict_of(&var_mf, &var_f)?;
    Ok(VerificationReport {
        instance: f.to_string(),
        var_f,
        var_mf,
        verdict,
        equality_predicted: equality_predicted_continuous(f),
        comparison_precision_used: bits,
    })
}

/// `var(Mf) <= var(f)` over Z, with the equality case.
pub fn check_discrete(f: &LatticeFunction) -> Result<VerificationReport> {
    let hyp = hypothesis_discrete(f)?;
    if !hyp.admissible {
        return Err(Error::HypothesisViolated(Box::new(hyp)));
    }
    let var_f = discrete_var(f, &DiscreteInterval::all())?;
    let var_mf = AlgebraicSum::from(mf_variation_z(f)?);
    let (verdict, bits) = verdict_of(&var_mf, &var_f)?;
    Ok(VerificationReport {
        instance: f.to_string(),
        var_f,
        var_mf,
        verdict,
        equality_predicted: equality_predicted_discrete(f),
        comparison_precision_used: bits,
    })
}

/// `var_[a,b](Mf)` against `var_[a,b](f)` between attachment points.
#[derive(Clone, Debug)]
pub struct LocalBoundReport {
    pub var_mf: AlgebraicSum,
    pub var_f: Rational,
    pub outcome: Comparison,
    pub hypothesis: HypothesisCheck,
    pub comparison_precision_used: u32,
}

impl LocalBoundReport {
    pub fn holds(&self) -> bool {
        matches!(self.outcome, Comparison::Less | Comparison::Equal)
    }
}

pub fn check_local_bound(f: &StepFunction, a: &Rational, b: &Rational) -> Result<LocalBoundReport> {
    if a >= b {
        return Err(Error::InvalidInterval(format!("need a < b, got [{a}, {b}]")));
    }
    for x in [a, b] {
        if &eval_mf(f, x) != f.value_at(x) {
            return Err(Error::NotAttachmentPoint(x.to_string()));
        }
    }
    let iv = RealInterval::closed(a.clone(), b.clone())?;
    let var_mf = variation_mf(f, &iv)?;
    let var_f = f.variation(&iv);
    let (outcome, bits) = compare_sums_detailed(&var_mf, &AlgebraicSum::from(var_f.clone()), precision_budget());
    if outcome == Comparison::Undecided {
        return Err(Error::Undecided { bits });
    }
    Ok(LocalBoundReport {
        var_mf,
        var_f,
        outcome,
        hypothesis: hypothesis_continuous(f)?,
        comparison_precision_used: bits,
    })
}

/// `var` of `Mf` over half of an interval against the value at its end.
#[derive(Clone, Debug)]
pub struct HalfBound {
    pub variation: AlgebraicSum,
    pub bound: Rational,
    pub outcome: Comparison,
}

#[derive(Clone, Debug)]
pub enum AbcdReport {
    Bounded {
        left: HalfBound,
        right: HalfBound,
        /// Strictness is owed unless `f` vanishes almost everywhere.
        strict_expected: bool,
    },
    HalfLine {
        monotone: bool,
        variation: AlgebraicSum,
        /// `Mf(a) - inf Mf` over the half line.
        drop: AlgebraicSum,
        identity: Comparison,
    },
}

impl AbcdReport {
    pub fn holds(&self) -> bool {
        match self {
            AbcdReport::Bounded {
                left,
                right,
                strict_expected,
            } => [left, right].iter().all(|h| match h.outcome {
                Comparison::Less => true,
                Comparison::Equal => !strict_expected,
                _ => false,
            }),
            AbcdReport::HalfLine { monotone, identity, .. } => *monotone && *identity == Comparison::Equal,
        }
    }
}

/// Half-interval bounds on a bounded interval where `f` vanishes, and
/// monotonicity with the variation identity on a half line.
pub fn check_prop_abcd(f: &StepFunction, interval: &RealInterval) -> Result<AbcdReport> {
    let bits = precision_budget();
    match (interval.lo(), interval.hi()) {
        (Some(a), Some(b)) => {
            if a >= b {
                return Err(Error::InvalidInterval(format!("need a < b in {interval}")));
            }
            if !f.integral_between(a, b).is_zero() {
                return Err(Error::Precondition(format!("f does not vanish on {interval}")));
            }
            let m = (a + b) / int(2);
            let half = |lo: &Rational, hi: &Rational, end: &Rational| -> Result<HalfBound> {
                let variation = variation_mf(f, &RealInterval::closed(lo.clone(), hi.clone())?)?;
                let bound = eval_mf(f, end);
                let (outcome, used) = compare_sums_detailed(&variation, &AlgebraicSum::from(bound.clone()), bits);
                if outcome == Comparison::Undecided {
                    return Err(Error::Undecided { bits: used });
                }
                Ok(HalfBound {
                    variation,
                    bound,
                    outcome,
                })
            };
            Ok(AbcdReport::Bounded {
                left: half(a, &m, a)?,
                right: half(&m, b, b)?,
                strict_expected: f.interval_values().iter().any(|v| v.is_positive()),
            })
        }
        (Some(a), None) | (None, Some(a)) => {
            let upward = interval.lo().is_some();
            let (tail, far) = if upward {
                (f.right_tail(), f.breakpoints().last().cloned())
            } else {
                (f.left_tail(), f.breakpoints().first().cloned())
            };
            let far = far.unwrap_or_else(|| a.clone());
            let mass = if upward {
                f.integral_between(a, &far.max(a.clone()))
            } else {
                f.integral_between(&far.min(a.clone()), a)
            };
            if !tail.is_zero() || !mass.is_zero() {
                return Err(Error::Precondition(format!("f does not vanish on {interval}")));
            }
            let iv = if upward {
                RealInterval::from_closed(a.clone())
            } else {
                RealInterval::to_closed(a.clone())
            };
            let env = envelope(f, &iv)?;
            let monotone = env.is_monotone(if upward { -1 } else { 1 })?;
            let variation = env.variation()?;
            let mut drop = AlgebraicSum::from(eval_mf(f, a));
            drop.push_scaled(&env.infimum()?, &int(-1));
            let (identity, used) = compare_sums_detailed(&variation, &drop, bits);
            if identity == Comparison::Undecided {
                return Err(Error::Undecided { bits: used });
            }
            Ok(AbcdReport::HalfLine {
                monotone,
                variation,
                drop,
                identity,
            })
        }
        (None, None) => Err(Error::InvalidInterval("need a bounded interval or a half line".into())),
    }
}

/// Gradient bound for the large-window operator with threshold `a`, using
/// the admissible radius `a + x`.
pub fn check_gradient_bound(f: &StepFunction, a: &Rational, x: &Rational, y: &Rational) -> Result<bool> {
    if x == y {
        return Err(Error::Precondition("points must be distinct".into()));
    }
    let mx = m1_eval(f, x, a)?;
    let my = m1_eval(f, y, a)?;
    let d = (x - y).abs();
    let r = a + x;
    let mid = &mx / (&r + &d);
    Ok((&mx - &my) / &d <= mid && mid <= my / r)
}

/// Discrete gradient bound for `M1` at distinct `n, m` in `[0, inf) ∩ S0`.
pub fn check_gradient_bound_discrete(f: &LatticeFunction, a: &Rational, n: &Rational, m: &Rational) -> Result<bool> {
    if n == m {
        return Err(Error::Precondition("points must be distinct".into()));
    }
    let mn = discrete_m1(f, n, a)?;
    let mm = discrete_m1(f, m, a)?;
    let d = (n - m).abs();
    let base = n + a + rat(1, 2);
    let mid = &mn / (&base + &d);
    Ok((&mn - &mm) / &d <= mid && mid <= mm / base)
}

fn vanishes_on(f: &StepFunction, a: &Rational) -> bool {
    f.integral_between(&-a, a).is_zero()
}

/// `M0` nondecreasing on `[0, a]` when `f` vanishes on `[-a, a]`.
pub fn check_m0_monotone(f: &StepFunction, a: &Rational) -> Result<bool> {
    if !vanishes_on(f, a) {
        return Err(Error::Precondition(format!("f does not vanish on [-{a}, {a}]")));
    }
    let env = operator_envelope(f, &RealInterval::closed(Rational::zero(), a.clone())?, Operator::Small(a.clone()))?;
    env.is_monotone(1)
}

/// `var_[0,a](M1) <= M1(a)`, strict when `f` vanishes on `[-a, a]` but not
/// everywhere.
pub fn check_m1_variation(f: &StepFunction, a: &Rational) -> Result<bool> {
    let env = operator_envelope(f, &RealInterval::closed(Rational::zero(), a.clone())?, Operator::Large(a.clone()))?;
    let var = env.variation()?;
    let bound = AlgebraicSum::from(m1_eval(f, a, a)?);
    let (cmp, bits) = compare_sums_detailed(&var, &bound, precision_budget());
    let strict = vanishes_on(f, a) && f.interval_values().iter().any(|v| v.is_positive());
    Ok(match cmp {
        Comparison::Less => true,
        Comparison::Equal => !strict,
        Comparison::Greater => false,
        Comparison::Undecided => return Err(Error::Undecided { bits }),
    })
}

/// The sites of `[0, a]` on the lattice of `f`, together with 0.
fn s0_sites(lattice: Lattice, a: &Rational) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    let mut s = lattice.site(if lattice == Lattice::Integers { 1 } else { 0 });
    while &s <= a {
        out.push(s.clone());
        s += int(1);
    }
    out
}

fn vanishes_inside(f: &LatticeFunction, a: &Rational) -> Result<bool> {
    let lo = f.lattice().index_of(&-a).ok_or_else(|| Error::LatticeMismatch {
        site: (-a).to_string(),
        lattice: f.lattice().to_string(),
    })?;
    let hi = -lo - if f.lattice() == Lattice::HalfIntegers { 1 } else { 0 };
    Ok((lo + 1..hi).all(|i| f.at_index(i).is_zero()))
}

/// Discrete `M0` nondecreasing on `[0, a] ∩ S0` when `f` vanishes strictly
/// between `-a` and `a`.
pub fn check_m0_monotone_discrete(f: &LatticeFunction, a: &Rational) -> Result<bool> {
    if !vanishes_inside(f, a)? {
        return Err(Error::Precondition(format!("f does not vanish on (-{a}, {a})")));
    }
    let vals = s0_sites(f.lattice(), a)
        .iter()
        .map(|n| discrete_m0(f, n, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals.windows(2).all(|w| w[0] <= w[1]))
}

/// `var_[0,a]∩S0(M1) <= 2a/(2a+1) M1(a)`.
pub fn check_m1_variation_discrete(f: &LatticeFunction, a: &Rational) -> Result<bool> {
    let vals = s0_sites(f.lattice(), a)
        .iter()
        .map(|n| discrete_m1(f, n, a))
        .collect::<Result<Vec<_>>>()?;
    let two_a = a * int(2);
    Ok(sequence_variation(&vals) <= &two_a / (&two_a + int(1)) * vals.last().expect("a is a site"))
}

/// Variation of a finite sequence as a supremum over all subsamplings
/// that keep both ends; exponential, for cross-checks only.
pub fn brute_sequence_variation(values: &[Rational]) -> Rational {
    let n = values.len();
    if n < 2 {
        return Rational::zero();
    }
    let inner = n - 2;
    assert!(inner < 20, "brute force is limited to 21 points");
    let mut best = Rational::zero();
    for mask in 0u32..(1 << inner) {
        let mut prev = &values[0];
        let mut total = Rational::zero();
        for (i, v) in values.iter().enumerate().skip(1) {
            if i == n - 1 || mask & (1 << (i - 1)) != 0 {
                total += (v - prev).abs();
                prev = v;
            }
        }
        if total > best {
            best = total;
        }
    }
    best
}

/// `var(max(g, h)) <= var(h)` for nondecreasing `g` with `g(end) <= h(end)`,
/// and the direct variation sum agreeing with the brute-force supremum.
pub fn check_var_of_max(g: &[Rational], h: &[Rational]) -> Result<bool> {
    if g.len() != h.len() || g.is_empty() {
        return Err(Error::Precondition("g and h need the same nonzero length".into()));
    }
    if g.windows(2).any(|w| w[0] > w[1]) || g.last() > h.last() {
        return Err(Error::Precondition("g must be nondecreasing with g(end) <= h(end)".into()));
    }
    let u: Vec<Rational> = g.iter().zip(h).map(|(a, b)| a.max(b).clone()).collect();
    let var_u = sequence_variation(&u);
    let var_h = sequence_variation(h);
    let agrees = u.len() > 21 || (var_u == brute_sequence_variation(&u) && var_h == brute_sequence_variation(h));
    Ok(agrees && var_u <= var_h)
}

/// `Mf` nonincreasing from the last site of the window on, when the right
/// tail vanishes.
pub fn check_half_line_discrete(f: &LatticeFunction, steps: i64) -> Result<bool> {
    require_integers(f)?;
    if !f.right_tail().is_zero() {
        return Err(Error::Precondition("right tail must vanish".into()));
    }
    let (_, last) = f.window();
    let vals = (last..=last + steps)
        .map(|n| discrete_mf(f, &int(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals.windows(2).all(|w| w[0] >= w[1]))
}

/// Instance families for the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Indicator of disjoint intervals with random rational endpoints.
    Indicator,
    /// A positive height times an indicator.
    SingleHeight,
    /// A function on Z satisfying "f = 0 or f = Mf".
    AdmissibleDiscrete,
    /// An unconstrained step function.
    Arbitrary,
    /// An unconstrained function on Z or the half lattice.
    ArbitraryDiscrete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorParams {
    /// Inclusive range for the number of intervals.
    pub intervals: (usize, usize),
    pub max_denominator: i64,
    /// Endpoints lie in `[-span, span]`.
    pub span: i64,
    /// Window length for discrete instances.
    pub window: usize,
    /// Number of breakpoints for arbitrary step functions.
    pub pieces: usize,
    /// Fixed height for single-height instances; random when `None`.
    pub height: Option<Rational>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            intervals: (1, 6),
            max_denominator: 100,
            span: 10,
            window: 9,
            pieces: 6,
            height: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Continuous(StepFunction),
    Discrete(LatticeFunction),
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Continuous(g) => write!(f, "{g}"),
            Instance::Discrete(g) => write!(f, "{g}"),
        }
    }
}

/// Retry budget for rejection sampling, per instance.
pub const REJECTION_BUDGET: usize = 10_000;

/// Generator for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn generate(kind: &GeneratorKind, params: &GeneratorParams, seed: u64) -> Result<Instance> {
    generate_with(kind, params, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn generate_with(kind: &GeneratorKind, params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Result<Instance> {
    match kind {
        GeneratorKind::Indicator => random_indicator(params, rng, int(1)).map(Instance::Continuous),
        GeneratorKind::SingleHeight => {
            let c = match &params.height {
                Some(c) => c.clone(),
                None => rat(rng.random_range(1..=30), rng.random_range(1..=10)),
            };
            random_indicator(params, rng, c).map(Instance::Continuous)
        }
        GeneratorKind::AdmissibleDiscrete => admissible_discrete(params, rng).map(Instance::Discrete),
        GeneratorKind::Arbitrary => arbitrary_step(params, rng).map(Instance::Continuous),
        GeneratorKind::ArbitraryDiscrete => arbitrary_discrete(params, rng).map(Instance::Discrete),
    }
}

fn random_rational(rng: &mut ChaCha8Rng, span: i64, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den.max(1));
    rat(rng.random_range(-span * q..=span * q), q)
}

fn random_indicator(params: &GeneratorParams, rng: &mut ChaCha8Rng, height: Rational) -> Result<StepFunction> {
    let k = rng.random_range(params.intervals.0..=params.intervals.1.max(params.intervals.0));
    let mut ends = BTreeSet::new();
    while ends.len() < 2 * k {
        ends.insert(random_rational(rng, params.span, params.max_denominator));
    }
    let ends: Vec<Rational> = ends.into_iter().collect();
    let intervals = ends
        .chunks(2)
        .map(|c| RealInterval::closed(c[0].clone(), c[1].clone()))
        .collect::<Result<Vec<_>>>()?;
    StepFunction::indicator(&intervals, height)
}

fn arbitrary_step(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Result<StepFunction> {
    let mut xs = BTreeSet::new();
    while xs.len() < params.pieces {
        xs.insert(random_rational(rng, params.span, params.max_denominator.min(8)));
    }
    let value = |rng: &mut ChaCha8Rng| -> Rational {
        if rng.random_bool(0.3) {
            Rational::zero()
        } else {
            rat(rng.random_range(1..=12), rng.random_range(1..=4))
        }
    };
    let mut vals: Vec<Rational> = (0..=params.pieces).map(|_| value(rng)).collect();
    if rng.random_bool(0.7) {
        vals[0] = Rational::zero();
        *vals.last_mut().expect("nonempty") = Rational::zero();
    }
    let points = (0..params.pieces)
        .map(|i| match rng.random_range(0..3) {
            0 => vals[i].clone(),
            1 => vals[i + 1].clone(),
            _ => value(rng),
        })
        .collect();
    StepFunction::new(xs.into_iter().collect(), vals, points)
}

fn arbitrary_discrete(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Result<LatticeFunction> {
    let lattice = if rng.random_bool(0.5) {
        Lattice::Integers
    } else {
        Lattice::HalfIntegers
    };
    let value = |rng: &mut ChaCha8Rng| -> Rational {
        if rng.random_bool(0.3) {
            Rational::zero()
        } else {
            rat(rng.random_range(1..=12), rng.random_range(1..=4))
        }
    };
    let values = (0..params.window).map(|_| value(rng)).collect();
    let (lt, rt) = if rng.random_bool(0.7) {
        (Rational::zero(), Rational::zero())
    } else {
        (value(rng), value(rng))
    };
    let start = rng.random_range(-(params.window as i64)..=0);
    LatticeFunction::new(lattice, lt, start, values, rt)
}

/// Constructive single-height instances and rejection-sampled
/// multi-height ones, alternating at random.
fn admissible_discrete(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Result<LatticeFunction> {
    let w = params.window.max(1);
    let start = -(w as i64 / 2);
    if rng.random_bool(0.5) {
        let c = rat(rng.random_range(1..=12), rng.random_range(1..=4));
        let values = (0..w)
            .map(|_| if rng.random_bool(0.5) { c.clone() } else { Rational::zero() })
            .collect();
        return LatticeFunction::finite(start, values);
    }
    for attempt in 1..=REJECTION_BUDGET {
        let heights = [rat(rng.random_range(1..=12), rng.random_range(1..=4)), rat(rng.random_range(1..=12), rng.random_range(1..=4))];
        let values: Vec<Rational> = (0..w)
            .map(|_| match rng.random_range(0..3) {
                0 => Rational::zero(),
                k => heights[k - 1].clone(),
            })
            .collect();
        let f = LatticeFunction::finite(start, values)?;
        let distinct: BTreeSet<&Rational> = f.values().iter().filter(|v| v.is_positive()).collect();
        if distinct.len() >= 2 && hypothesis_discrete(&f)?.admissible {
            let _ = attempt;
            return Ok(f);
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: REJECTION_BUDGET,
        accepted: 0,
    })
}

/// Counts over a suite run; merging is associative and commutative.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub instances: usize,
    pub holds: usize,
    pub equality_cases: usize,
    pub violations: usize,
    pub incoherent: usize,
    pub undecided: usize,
    pub errors: usize,
    pub max_precision_bits: u32,
    /// Smallest `var(f) - var(Mf)` among strict cases, in floating point.
    pub worst_margin: Option<f64>,
    /// Serialized instances that violated or contradicted the prediction.
    pub witnesses: Vec<String>,
}

impl SuiteSummary {
    pub fn merge(mut self, other: Self) -> Self {
        self.instances += other.instances;
        self.holds += other.holds;
        self.equality_cases += other.equality_cases;
        self.violations += other.violations;
        self.incoherent += other.incoherent;
        self.undecided += other.undecided;
        self.errors += other.errors;
        self.max_precision_bits = self.max_precision_bits.max(other.max_precision_bits);
        self.worst_margin = match (self.worst_margin, other.worst_margin) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort();
        self
    }

    pub fn from_report(result: &Result<VerificationReport>) -> Self {
        let mut s = Self {
            instances: 1,
            ..Self::default()
        };
        match result {
            Ok(r) => {
                match r.verdict {
                    Verdict::Holds => {
                        s.holds += 1;
                        s.worst_margin = Some((AlgebraicSum::from(r.var_f.clone()).sub(&r.var_mf)).to_f64());
                    }
                    Verdict::HoldsWithEquality => s.equality_cases += 1,
                    Verdict::Violation => s.violations += 1,
                }
                if !r.is_coherent() {
                    s.incoherent += 1;
                }
                if r.verdict == Verdict::Violation || !r.is_coherent() {
                    s.witnesses.push(r.to_json());
                }
                s.max_precision_bits = r.comparison_precision_used;
            }
            Err(Error::Undecided { .. } | Error::PrecisionExhausted { .. }) => s.undecided += 1,
            Err(e) => {
                s.errors += 1;
                s.witnesses.push(e.to_string());
            }
        }
        s
    }

    /// No violations, contradictions, undecided comparisons or errors.
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.incoherent == 0 && self.undecided == 0 && self.errors == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Runs `check_continuous` or `check_discrete` on `count` generated
/// instances; reports come back in instance order.
pub fn run_suite(
    kind: &GeneratorKind,
    params: &GeneratorParams,
    count: usize,
    seed: u64,
) -> Result<(Vec<Result<VerificationReport>>, SuiteSummary)> {
    let instances = (0..count as u64)
        .map(|i| generate_with(kind, params, &mut instance_rng(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<Result<VerificationReport>> = instances
        .par_iter()
        .map(|inst| match inst {
            Instance::Continuous(f) => check_continuous(f),
            Instance::Discrete(f) => check_discrete(f),
        })
        .collect();
    let summary = reports
        .iter()
        .map(SuiteSummary::from_report)
        .fold(SuiteSummary::default(), SuiteSummary::merge);
    Ok((reports, summary))
}

/// Per-lemma counts of checked and failed instances.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LemmaSummary {
    pub checked: BTreeMap<String, usize>,
    pub failed: BTreeMap<String, usize>,
    pub witnesses: Vec<String>,
}

impl LemmaSummary {
    fn record(&mut self, lemma: &str, outcome: Result<bool>, instance: &dyn fmt::Display) {
        *self.checked.entry(lemma.to_string()).or_default() += 1;
        let ok = matches!(outcome, Ok(true));
        if !ok {
            *self.failed.entry(lemma.to_string()).or_default() += 1;
            let why = match outcome {
                Err(e) => e.to_string(),
                _ => "inequality fails".to_string(),
            };
            self.witnesses.push(format!("{lemma}: {why}: {}", instance.to_string().replace('\n', "; ")));
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        for (k, v) in other.checked {
            *self.checked.entry(k).or_default() += v;
        }
        for (k, v) in other.failed {
            *self.failed.entry(k).or_default() += v;
        }
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort();
        self
    }

    pub fn failures(&self) -> usize {
        self.failed.values().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Random step function vanishing on `(-a, a)`, with breakpoints at `±a`
/// and random pieces beyond.
fn vanishing_step(rng: &mut ChaCha8Rng, a: &Rational) -> Result<StepFunction> {
    let mut right = BTreeSet::new();
    let mut left = BTreeSet::new();
    for _ in 0..rng.random_range(0..=3) {
        right.insert(a + rat(rng.random_range(1..=16), 4));
    }
    for _ in 0..rng.random_range(0..=3) {
        left.insert(-a - rat(rng.random_range(1..=16), 4));
    }
    let mut xs: Vec<Rational> = left.into_iter().collect();
    let zero_at = xs.len() + 1;
    xs.push(-a);
    xs.push(a.clone());
    xs.extend(right);
    let value = |rng: &mut ChaCha8Rng| -> Rational {
        if rng.random_bool(0.25) {
            Rational::zero()
        } else {
            rat(rng.random_range(1..=12), rng.random_range(1..=4))
        }
    };
    let mut vals: Vec<Rational> = (0..=xs.len()).map(|_| value(rng)).collect();
    vals[zero_at] = Rational::zero();
    let points = (0..xs.len()).map(|i| vals[i + rng.random_range(0..2)].clone()).collect();
    StepFunction::new(xs, vals, points)
}

/// One instance of every lemma check, generated from `rng`.
pub fn lemma_instance(rng: &mut ChaCha8Rng) -> Result<LemmaSummary> {
    let mut out = LemmaSummary::default();
    let params = GeneratorParams {
        pieces: 5,
        span: 4,
        max_denominator: 4,
        window: 8,
        ..GeneratorParams::default()
    };
    let Instance::Continuous(f) = generate_with(&GeneratorKind::Arbitrary, &params, rng)? else {
        unreachable!()
    };
    let a = rat(rng.random_range(1..=8), rng.random_range(1..=4));
    let x = rat(rng.random_range(0..=16), rng.random_range(1..=4));
    let mut y = rat(rng.random_range(0..=16), rng.random_range(1..=4));
    if y == x {
        y += rat(1, 3);
    }
    out.record("gradient bound", check_gradient_bound(&f, &a, &x, &y), &f);
    out.record("M1 variation bound", check_m1_variation(&f, &a), &f);
    let g = vanishing_step(rng, &a)?;
    out.record("M0 monotone", check_m0_monotone(&g, &a), &g);
    out.record("M1 variation bound (vanishing)", check_m1_variation(&g, &a), &g);
    if g.left_tail().is_zero() && g.right_tail().is_zero() {
        out.record(
            "half-interval bounds",
            check_prop_abcd(&g, &RealInterval::closed(-&a, a.clone())?).map(|r| r.holds()),
            &g,
        );
    }
    // same pieces with both tails cut to zero
    let mut vals = f.interval_values().to_vec();
    let last = vals.len() - 1;
    vals[0] = Rational::zero();
    vals[last] = Rational::zero();
    let f0 = StepFunction::new(f.breakpoints().to_vec(), vals, f.point_values().to_vec())?;
    if let Some((lo, hi)) = f0.support_hull() {
        for iv in [RealInterval::from_closed(hi), RealInterval::to_closed(lo)] {
            out.record("half-line monotone", check_prop_abcd(&f0, &iv).map(|r| r.holds()), &f0);
        }
    }

    let Instance::Discrete(d) = generate_with(&GeneratorKind::ArbitraryDiscrete, &params, rng)? else {
        unreachable!()
    };
    let lat = d.lattice();
    let a_site = lat.site(rng.random_range(1..=5));
    let s0 = |k: i64| if lat == Lattice::HalfIntegers && k == 0 { Rational::zero() } else { lat.site(k) };
    let kn = rng.random_range(0..=6);
    let mut km = rng.random_range(0..=6);
    if km == kn {
        km += 1;
    }
    let (n, m) = (s0(kn), s0(km));
    out.record("discrete gradient bound", check_gradient_bound_discrete(&d, &a_site, &n, &m), &d);
    out.record("discrete M1 variation bound", check_m1_variation_discrete(&d, &a_site), &d);
    let dz = zero_inside(&d, &a_site)?;
    out.record("discrete M0 monotone", check_m0_monotone_discrete(&dz, &a_site), &dz);
    // var of max applied to M0 and h = M1 with h(a) = Mf(a)
    let sites = s0_sites(lat, &a_site);
    let g0 = sites.iter().map(|s| discrete_m0(&dz, s, &a_site)).collect::<Result<Vec<_>>>()?;
    let mut h = sites.iter().map(|s| discrete_m1(&dz, s, &a_site)).collect::<Result<Vec<_>>>()?;
    *h.last_mut().expect("nonempty") = discrete_mf(&dz, &a_site)?;
    out.record("var of max", check_var_of_max(&g0, &h), &dz);
    let gs: Vec<Rational> = {
        let mut v: Vec<Rational> = (0..8).map(|_| rat(rng.random_range(0..=6), 2)).collect();
        v.sort();
        v
    };
    let mut hs: Vec<Rational> = (0..8).map(|_| rat(rng.random_range(0..=6), 2)).collect();
    if hs[7] < gs[7] {
        hs[7] = gs[7].clone();
    }
    out.record("var of max", check_var_of_max(&gs, &hs), &format!("g = {gs:?}, h = {hs:?}"));
    let dz = match lat {
        Lattice::Integers => d,
        Lattice::HalfIntegers => d.translate(&rat(1, 2))?,
    };
    let dr = LatticeFunction::new(
        Lattice::Integers,
        dz.left_tail().clone(),
        dz.start(),
        dz.values().to_vec(),
        Rational::zero(),
    )?;
    out.record("discrete half-line monotone", check_half_line_discrete(&dr, 12), &dr);
    Ok(out)
}

fn zero_inside(f: &LatticeFunction, a: &Rational) -> Result<LatticeFunction> {
    let ia = f.lattice().index_of(&-a).expect("a is a site");
    let ib = -ia - if f.lattice() == Lattice::HalfIntegers { 1 } else { 0 };
    let (first, last) = f.window();
    let lo = first.min(ia);
    let hi = last.max(ib);
    let vals = (lo..=hi)
        .map(|i| if ia < i && i < ib { Rational::zero() } else { f.at_index(i).clone() })
        .collect();
    LatticeFunction::new(f.lattice(), f.left_tail().clone(), lo, vals, f.right_tail().clone())
}

/// `count` seeded lemma instances.
pub fn run_lemma_suite(count: usize, seed: u64) -> LemmaSummary {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            lemma_instance(&mut instance_rng(seed, i)).unwrap_or_else(|e| {
                let mut s = LemmaSummary::default();
                s.record("generation", Err(e), &i);
                s
            })
        })
        .reduce(LemmaSummary::default, LemmaSummary::merge)
}

/// Summary of the exhaustive sweep over indicator functions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub instances: u64,
    pub violations: u64,
    pub equality_cases: u64,
    /// Equality observed where not predicted or the reverse.
    pub mismatches: u64,
    pub witnesses: Vec<String>,
}

impl SweepSummary {
    fn merge(mut self, other: Self) -> Self {
        self.instances += other.instances;
        self.violations += other.violations;
        self.equality_cases += other.equality_cases;
        self.mismatches += other.mismatches;
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort();
        self
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} instances, {} violations, equality cases: {}",
            self.instances, self.violations, self.equality_cases
        )
    }
}

/// Largest supported sweep radius.
pub const MAX_SWEEP_N: u32 = 20;

/// All indicator functions on `{-n, ..., n}`.
pub fn exhaustive_discrete_sweep(n: u32) -> Result<SweepSummary> {
    if n > MAX_SWEEP_N {
        return Err(Error::Precondition(format!("sweep radius {n} exceeds {MAX_SWEEP_N}")));
    }
    let width = 2 * n + 1;
    let total: u64 = 1 << width;
    let summary = (0..total)
        .into_par_iter()
        .map(|mask| {
            let values = (0..width).map(|i| int(((mask >> i) & 1) as i64)).collect();
            let f = LatticeFunction::finite(-(n as i64), values).expect("valid indicator");
            let var_f = discrete_var(&f, &DiscreteInterval::all()).expect("total");
            let var_mf = mf_variation_z(&f).expect("indicator variation");
            let equal = var_mf == var_f;
            // interval support: one run of ones, or none
            let interval = mask == 0 || {
                let m = mask >> mask.trailing_zeros();
                m & (m + 1) == 0
            };
            let mut s = SweepSummary {
                instances: 1,
                ..SweepSummary::default()
            };
            if var_mf > var_f {
                s.violations = 1;
            }
            if equal {
                s.equality_cases = 1;
            }
            if equal != interval {
                s.mismatches = 1;
            }
            if var_mf > var_f || equal != interval {
                s.witnesses.push(f.to_string());
            }
            s
        })
        .reduce(SweepSummary::default, SweepSummary::merge);
    Ok(summary)
}
