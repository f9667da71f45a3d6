//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails or overruns its time limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maxvar::builtins::{builtin, two_bumps, BUILTIN_NAMES};
use maxvar::continuous::eval_operator;
use maxvar::discrete::{brute_mf, mf_variation_z};
use maxvar::exact::{compare_sums, int, rat};
use maxvar::format::{builtin_figure, figure_curves, format_decimal, FIGURE_DIGITS};
use maxvar::verify::{
    check_continuous, check_local_bound, exhaustive_discrete_sweep, generate_with, hypothesis_continuous,
    instance_rng, run_lemma_suite, run_suite, GeneratorKind, GeneratorParams, Instance,
};
use maxvar::{
    attachment_set, discrete_mf, discrete_var, embed_to_step, envelope, eval_mf, variation_mf, AlgebraicSum,
    Comparison, DiscreteInterval, Lattice, LatticeFunction, Operator, QuadraticValue, Rational, RealInterval,
    StepFunction, Verdict,
};

/// Comparison budget for strictness certificates.
const PRECISION_BITS: u32 = 1024;
/// Radius grid of the brute-force sandwich, in units of 1e-4.
const GRID_DENOM: i64 = 10_000;
/// Largest admissible gap between the exact value and the grid maximum.
const SANDWICH_GAP: f64 = 1e-6;
/// Rounding allowance for the f64 lower bound.
const LOWER_SLACK: f64 = 1e-12;

const SUITE_SEED: u64 = 20_240_611;

type Check = Result<String, String>;

/// Name, time limit and body of one criterion.
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn q(x: Rational) -> QuadraticValue {
    QuadraticValue::from(x)
}

// 1. two bumps at c = 3/2
fn two_bumps_exact() -> Check {
    let c = rat(3, 2);
    let f = two_bumps(&c).map_err(err)?;
    ensure(eval_mf(&f, &int(0)) == rat(1, 3), || format!("Mf(0) = {}", eval_mf(&f, &int(0))))?;
    for x in [rat(1, 2), rat(-1, 2)] {
        let v = eval_mf(&f, &x);
        ensure(v == rat(1, 4), || format!("Mf({x}) = {v}"))?;
    }
    let iv = RealInterval::closed(int(-1), int(1)).map_err(err)?;
    let var = variation_mf(&f, &iv).map_err(err)?;
    ensure(var.to_rational() == Some(rat(2, 3)), || format!("var = {var}"))?;
    ensure(var.to_rational() == Some(c.recip()), || "var != 1/c".into())?;
    let wide = RealInterval::closed(int(-3), int(3)).map_err(err)?;
    let att: Vec<String> = attachment_set(&f, &wide).map_err(err)?.iter().map(|a| a.to_string()).collect();
    ensure(att == ["[-3/2,-1]", "[1,3/2]"], || format!("attachment set {att:?}"))?;
    Ok("Mf(0) = 1/3, Mf(±1/2) = 1/4, var = 2/3, attached on 1 <= |x| <= 3/2".into())
}

// 2. two bumps over a range of c
fn two_bumps_sweep() -> Check {
    let iv = RealInterval::closed(int(-1), int(1)).map_err(err)?;
    let mut count = 0;
    for k in 1..=50i64 {
        // spread over (1, 3) with assorted denominators
        let c = int(1) + rat(2 * k, 51) - rat(1, 51 * (k + 1));
        ensure(c > int(1) && c < int(3), || format!("c = {c} out of range"))?;
        let f = two_bumps(&c).map_err(err)?;
        let var = variation_mf(&f, &iv).map_err(err)?;
        ensure(var.to_rational() == Some(c.recip()), || format!("c = {c}: var = {var}"))?;
        let top = (&c - int(1)) / &c;
        let low = (int(3) * &c - int(3)) / (int(4) * &c);
        ensure(eval_mf(&f, &int(0)) == top, || format!("c = {c}: Mf(0) = {}", eval_mf(&f, &int(0))))?;
        let third = &c / int(3);
        for x in [third.clone(), -third.clone()] {
            let v = eval_mf(&f, &x);
            ensure(v == low, || format!("c = {c}: Mf({x}) = {v}, want {low}"))?;
        }
        let env = envelope(&f, &iv).map_err(err)?;
        let turns: Vec<(QuadraticValue, QuadraticValue)> =
            env.turning_points().into_iter().map(|k| (k.x, k.value)).collect();
        let want = vec![(q(-third.clone()), q(low.clone())), (q(int(0)), q(top.clone())), (q(third), q(low.clone()))];
        ensure(turns == want, || format!("c = {c}: turning points {turns:?}"))?;
        let inf = env.infimum().map_err(err)?;
        ensure(inf == q(low), || format!("c = {c}: infimum {inf}"))?;
        count += 1;
    }
    Ok(format!("{count} values of c: var = 1/c, max (c-1)/c at 0, minima (3c-3)/(4c) at ±c/3"))
}

// 3. bumps with a plateau
fn plateau_example() -> Check {
    let (f, _) = builtin("example-1-8", None).map_err(err)?;
    let m = eval_mf(&f, &int(0));
    ensure(m == rat(7, 15) && m > rat(2, 5), || format!("Mf(0) = {m}"))?;
    let r = check_local_bound(&f, &rat(-1, 3), &rat(1, 3)).map_err(err)?;
    ensure(r.outcome == Comparison::Greater, || format!("local bound outcome {}", r.outcome))?;
    let hyp = hypothesis_continuous(&f).map_err(err)?;
    ensure(!hyp.admissible, || "reported admissible".into())?;
    ensure(hyp.witnesses.iter().any(|w| w.contains("2/5")), || format!("witnesses {:?}", hyp.witnesses))?;
    Ok(format!(
        "Mf(0) = 7/15 > 2/5, local bound fails ({} > {}), inadmissible at the plateau",
        r.var_mf, r.var_f
    ))
}

/// Number of maximal intervals where an indicator is positive. Indicator
/// intervals never touch, so these are the runs of positive pieces.
fn positive_runs(f: &StepFunction) -> usize {
    let vals = f.interval_values();
    (0..vals.len())
        .filter(|&i| vals[i].is_positive() && (i == 0 || !vals[i - 1].is_positive()))
        .count()
}

fn scaled_sum(s: &AlgebraicSum, h: &Rational) -> Result<AlgebraicSum, String> {
    let mut out = AlgebraicSum::zero();
    out.add_rational(&(s.rational_part() * h));
    for (d, coef) in s.surds() {
        let root = QuadraticValue::sqrt(&Rational::from_integer(d.clone())).map_err(err)?;
        out.push_scaled(&root, &(coef * h));
    }
    Ok(out)
}

fn indicator_suite(kind: GeneratorKind, scaling: bool) -> Check {
    let params = GeneratorParams::default();
    let (reports, summary) = run_suite(&kind, &params, 500, SUITE_SEED).map_err(err)?;
    ensure(summary.instances == 500, || format!("{} instances", summary.instances))?;
    ensure(
        summary.violations == 0 && summary.incoherent == 0 && summary.undecided == 0 && summary.errors == 0,
        || format!("summary {}", summary.to_json()),
    )?;
    ensure(summary.max_precision_bits <= PRECISION_BITS, || {
        format!("needed {} bits", summary.max_precision_bits)
    })?;
    let mut singles = 0;
    for r in &reports {
        let r = r.as_ref().map_err(err)?;
        let f: StepFunction = r.instance.parse().map_err(err)?;
        let runs = positive_runs(&f);
        let single = runs == 1;
        singles += single as usize;
        let equal = r.verdict == Verdict::HoldsWithEquality;
        ensure(equal == single, || format!("verdict {:?} for {}", r.verdict, r.instance))?;
        ensure(r.var_f == int(2 * runs as i64) * f.max_value(), || format!("var f = {} for {}", r.var_f, r.instance))?;
        if scaling {
            let h = f.max_value().clone();
            let unit = f.scale(&h.recip()).map_err(err)?;
            let base = check_continuous(&unit).map_err(err)?;
            ensure(base.verdict == r.verdict, || format!("scaled verdict differs for {}", r.instance))?;
            let scaled = scaled_sum(&base.var_mf, &h)?;
            ensure(compare_sums(&scaled, &r.var_mf, PRECISION_BITS) == Comparison::Equal, || {
                format!("var Mf not equivariant for {}", r.instance)
            })?;
        }
    }
    Ok(format!(
        "500 instances, {} equality (all single intervals), {} strict, max {} bits",
        singles,
        500 - singles,
        summary.max_precision_bits
    ))
}

// 6. every indicator on {-8, ..., 8}
fn exhaustive_sweep() -> Check {
    let n = 8u32;
    let s = exhaustive_discrete_sweep(n).map_err(err)?;
    let width = 2 * n as u64 + 1;
    // the empty set and every nonempty run of consecutive sites
    let runs: u64 = (0..width).map(|i| width - i).sum();
    let expected_equal = 1 + runs;
    ensure(s.instances == 1 << width, || format!("{} instances", s.instances))?;
    ensure(s.violations == 0, || format!("violations: {:?}", s.witnesses))?;
    ensure(s.mismatches == 0, || format!("equality mismatches: {:?}", s.witnesses))?;
    ensure(s.equality_cases == expected_equal, || format!("{} equality cases, want {expected_equal}", s.equality_cases))?;

    // small sweep against direct window sums: Mf is monotone off the support
    // and tends to 0, so the tails add Mf at the two ends
    let small = 4i64;
    let reach = small + 3;
    for mask in 0u32..(1 << (2 * small + 1)) {
        let vals = (0..=2 * small).map(|i| int(((mask >> i) & 1) as i64)).collect();
        let f = LatticeFunction::finite(-small, vals).map_err(err)?;
        let profile = (-reach..=reach)
            .map(|k| brute_mf(&f, &int(k), 4 * reach))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let inner: Rational = profile.windows(2).map(|w| (&w[1] - &w[0]).abs()).sum();
        let var = inner + &profile[0] + &profile[profile.len() - 1];
        let fast = mf_variation_z(&f).map_err(err)?;
        ensure(fast == var, || format!("{f}: {fast} against direct {var}"))?;
    }
    Ok(s.to_string())
}

// 7. lattice functions and their step embeddings
fn embedding() -> Check {
    let params = GeneratorParams::default();
    let mut points = 0;
    for i in 0..200u64 {
        let Instance::Discrete(d) =
            generate_with(&GeneratorKind::ArbitraryDiscrete, &params, &mut instance_rng(SUITE_SEED, i)).map_err(err)?
        else {
            return Err("expected a lattice function".into());
        };
        // the embedding is defined on Z; translation commutes with Mf
        let f = match d.lattice() {
            Lattice::Integers => d,
            Lattice::HalfIntegers => d.translate(&rat(1, 2)).map_err(err)?,
        };
        let g = embed_to_step(&f).map_err(err)?;
        let (first, last) = f.window();
        for n in first - 5..=last + 5 {
            let n = int(n);
            let a = discrete_mf(&f, &n).map_err(err)?;
            let b = eval_mf(&g, &n);
            ensure(a == b, || format!("{f} at {n}: {a} against {b}"))?;
            points += 1;
        }
        let vd = discrete_var(&f, &DiscreteInterval::all()).map_err(err)?;
        let vc = g.variation(&RealInterval::real_line());
        ensure(vd == vc, || format!("{f}: var {vd} against {vc}"))?;
    }
    Ok(format!("200 functions, {points} sites, variations agree"))
}

// 8. lemma suites
fn lemmas() -> Check {
    let s = run_lemma_suite(200, SUITE_SEED);
    ensure(s.failures() == 0, || format!("failures {:?}: {:?}", s.failed, s.witnesses))?;
    for key in [
        "gradient bound",
        "discrete gradient bound",
        "M0 monotone",
        "discrete M0 monotone",
        "M1 variation bound",
        "M1 variation bound (vanishing)",
        "discrete M1 variation bound",
        "var of max",
        "half-line monotone",
        "discrete half-line monotone",
    ] {
        let n = s.checked.get(key).copied().unwrap_or(0);
        ensure(n >= 200, || format!("{key}: only {n} instances"))?;
    }
    Ok(format!("{} checks, 0 failures", s.checked.values().sum::<usize>()))
}

/// Step function with breakpoints on the 1e-4 grid, kept as f64 pieces for
/// the brute-force side.
struct GridStep {
    exact: StepFunction,
    /// Breakpoints in grid units.
    breaks: Vec<i64>,
    /// Values on the pieces, tails included.
    values: Vec<f64>,
}

fn random_grid_step(rng: &mut ChaCha8Rng) -> Result<GridStep, String> {
    let k = rng.random_range(1..=8);
    let mut breaks: Vec<i64> = (0..k).map(|_| rng.random_range(-3 * GRID_DENOM..=3 * GRID_DENOM)).collect();
    breaks.sort_unstable();
    breaks.dedup();
    let tail = |rng: &mut ChaCha8Rng| if rng.random_bool(0.7) { 0 } else { rng.random_range(1..=4) };
    let mut nums: Vec<i64> = (0..=breaks.len()).map(|_| rng.random_range(0..=12)).collect();
    nums[0] = tail(rng);
    let last = nums.len() - 1;
    nums[last] = tail(rng);
    let den = 4;
    let vals: Vec<Rational> = nums.iter().map(|&v| rat(v, den)).collect();
    let points = (0..breaks.len()).map(|i| vals[i + rng.random_range(0..2)].clone()).collect();
    let xs = breaks.iter().map(|&b| rat(b, GRID_DENOM)).collect();
    let exact = StepFunction::new(xs, vals, points).map_err(err)?;
    let values = nums.iter().map(|&v| v as f64 / den as f64).collect();
    Ok(GridStep { exact, breaks, values })
}

impl GridStep {
    /// Integral over `[lo, hi]`, ends in grid units.
    fn integral(&self, lo: i64, hi: i64) -> f64 {
        let mut total = 0.0;
        let mut left = i64::MIN;
        for (i, &v) in self.values.iter().enumerate() {
            let right = self.breaks.get(i).copied().unwrap_or(i64::MAX);
            let a = lo.max(left);
            let b = hi.min(right);
            if b > a {
                total += v * (b - a) as f64;
            }
            left = right;
        }
        total / GRID_DENOM as f64
    }

    /// Largest window average over grid radii up to one unit past the
    /// farthest breakpoint, and the tail limit.
    fn grid_max(&self, x: i64) -> f64 {
        let reach = self.breaks.iter().map(|b| (b - x).abs()).max().unwrap_or(0) + GRID_DENOM;
        let mut best = (self.values[0] + self.values[self.values.len() - 1]) / 2.0;
        for r in 1..=reach {
            let avg = self.integral(x - r, x + r) / (2.0 * r as f64 / GRID_DENOM as f64);
            best = best.max(avg);
        }
        best
    }
}

// 9. exact values against dense brute force
fn oracle_sandwich() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = random_grid_step(&mut rng)?;
        for _ in 0..20 {
            let x = rng.random_range(-4 * GRID_DENOM..=4 * GRID_DENOM);
            let exact = eval_mf(&g.exact, &rat(x, GRID_DENOM));
            let e = exact.to_f64().ok_or("Mf out of range")?;
            let lower = g.grid_max(x);
            ensure(lower <= e + LOWER_SLACK, || format!("grid {lower} exceeds Mf = {exact} at {x}e-4"))?;
            let gap = e - lower;
            ensure(gap < SANDWICH_GAP, || format!("gap {gap} at {x}e-4 for {}", g.exact))?;
            worst = worst.max(gap);
        }
    }
    Ok(format!("2000 points, largest gap {worst:.3e}"))
}

// 10. figure data against pointwise evaluation
fn figures() -> Check {
    let mut rows = 0;
    for name in BUILTIN_NAMES {
        let (f, iv) = builtin(name, None).map_err(err)?;
        let (prefix, threshold) = builtin_figure(name).ok_or("no figure")?;
        let curves = figure_curves(&f, &iv, 201, threshold.as_ref(), prefix).map_err(err)?;
        for c in &curves {
            let suffix = c.name.strip_prefix(prefix).unwrap_or("");
            for row in &c.rows {
                let Some(x) = row.rational_x() else { continue };
                let want = match suffix {
                    "_f" => f.value_at(&x).clone(),
                    "_Mf" => eval_mf(&f, &x),
                    "_Mnotf" => eval_operator(&f, &x, &Operator::Small(threshold.clone().ok_or("threshold")?))
                        .map_err(err)?,
                    "_Msupf" => eval_operator(&f, &x, &Operator::Large(threshold.clone().ok_or("threshold")?))
                        .map_err(err)?,
                    other => return Err(format!("unexpected curve {other}")),
                };
                ensure(row.y == q(want.clone()), || format!("{} at {x}: {} against {want}", c.name, row.y))?;
                rows += 1;
            }
        }
        if prefix == "data_twot" {
            let mf = curves.iter().find(|c| c.name == "data_twot_Mf").ok_or("no Mf curve")?;
            for (x, y) in [(int(0), rat(1, 3)), (rat(1, 2), rat(1, 4)), (rat(-1, 2), rat(1, 4))] {
                ensure(mf.rows.iter().any(|r| r.x == q(x.clone()) && r.y == q(y.clone())), || {
                    format!("missing extremum row ({x}, {y})")
                })?;
            }
            let text = mf.render(false);
            let third = format_decimal(&q(rat(1, 3)), FIGURE_DIGITS);
            for line in [format!("0 {third}"), "0.5 0.25".into(), "-0.5 0.25".into()] {
                ensure(text.lines().any(|l| l == line), || format!("missing line {line:?}"))?;
            }
        }
    }
    ensure(rows > 0, || "no rows".into())?;
    Ok(format!("{rows} rational rows match exactly"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("two bumps at c = 3/2", Duration::from_secs(1), two_bumps_exact),
        ("two bumps, 50 values of c", Duration::from_secs(30), two_bumps_sweep),
        ("plateau counterexample", Duration::from_secs(1), plateau_example),
        ("random indicators", Duration::from_secs(300), || indicator_suite(GeneratorKind::Indicator, false)),
        ("single-height indicators", Duration::from_secs(300), || {
            indicator_suite(GeneratorKind::SingleHeight, true)
        }),
        ("exhaustive lattice sweep", Duration::from_secs(600), exhaustive_sweep),
        ("lattice embedding", Duration::from_secs(120), embedding),
        ("lemma suites", Duration::from_secs(300), lemmas),
        ("oracle sandwich", Duration::from_secs(120), oracle_sandwich),
        ("figure data", Duration::from_secs(60), figures),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = match result {
            Ok(_) if took > *limit => Err(format!("took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
