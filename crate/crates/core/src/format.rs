//! Decimal output of exact values and the sampled curves behind the figure
//! data files.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::continuous::{envelope, operator_envelope, Operator, PiecewiseMobius};
use crate::error::{Error, Result};
use crate::exact::{int, precision_budget, QuadraticValue, Rational};
use crate::mobius::Abscissa;
use crate::stepfn::{RealInterval, StepFunction};

/// Significant digits in figure files.
pub const FIGURE_DIGITS: u32 = 12;

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

fn scale10(x: &QuadraticValue, e: i64) -> QuadraticValue {
    let p = Rational::from_integer(pow10(e.unsigned_abs() as u32));
    x.mul_rational(&if e >= 0 { p } else { p.recip() })
}

/// Exact floor of a quadratic value.
fn floor_exact(y: &QuadraticValue) -> BigInt {
    if let Some(r) = y.to_rational() {
        return r.floor().to_integer();
    }
    let mut k = y.enclose(64).lo().floor().to_integer();
    while y.cmp_rational(&Rational::from_integer(k.clone())) == Ordering::Less {
        k -= 1;
    }
    while y.cmp_rational(&Rational::from_integer(&k + 1)) != Ordering::Less {
        k += 1;
    }
    k
}

/// Nearest integer, ties to even.
fn round_half_even(y: &QuadraticValue) -> BigInt {
    let k = floor_exact(y);
    let half = Rational::from_integer(k.clone()) + Rational::new(BigInt::one(), BigInt::from(2));
    match y.cmp_rational(&half) {
        Ordering::Less => k,
        Ordering::Greater => k + 1,
        Ordering::Equal => {
            if k.is_even() {
                k
            } else {
                k + 1
            }
        }
    }
}

/// `e` with `10^e <= |x| < 10^(e+1)`, for `x != 0`.
fn decimal_exponent(x: &QuadraticValue) -> i64 {
    let approx = x.enclose(64).lo().to_f64().unwrap_or(1.0).abs().max(f64::MIN_POSITIVE);
    let mut e = approx.log10().floor() as i64;
    let one = Rational::one();
    while scale10(x, -e).cmp_rational(&one) == Ordering::Less {
        e -= 1;
    }
    while scale10(x, -(e + 1)).cmp_rational(&one) != Ordering::Less {
        e += 1;
    }
    e
}

/// `x` rounded half-to-even to `digits` significant digits, as a plain
/// decimal with trailing zeros removed.
pub fn format_decimal(x: &QuadraticValue, digits: u32) -> String {
    let digits = digits.max(1);
    let sign = x.signum();
    if sign == 0 {
        return "0".into();
    }
    let ax = if sign < 0 { x.neg() } else { x.clone() };
    let mut e = decimal_exponent(&ax);
    let mut n = round_half_even(&scale10(&ax, digits as i64 - 1 - e));
    if n == pow10(digits) {
        n /= 10;
        e += 1;
    }
    let ds = n.to_string();
    let body = if e >= digits as i64 {
        format!("{ds}{}", "0".repeat((e + 1 - digits as i64) as usize))
    } else if e >= 0 {
        let (int_part, frac) = ds.split_at(e as usize + 1);
        format!("{int_part}.{frac}")
    } else {
        format!("0.{}{ds}", "0".repeat((-e - 1) as usize))
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if sign < 0 {
        format!("-{body}")
    } else {
        body
    }
}

pub fn format_rational_decimal(x: &Rational, digits: u32) -> String {
    format_decimal(&QuadraticValue::from(x.clone()), digits)
}

/// Exact value without spaces, so that it fits a whitespace-separated column.
pub fn format_exact(x: &QuadraticValue) -> String {
    x.to_string().replace(' ', "")
}

/// One sampled point of a curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub x: QuadraticValue,
    pub y: QuadraticValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    /// File stem, such as `data_twot_Mf`.
    pub name: String,
    pub rows: Vec<Row>,
}

impl Curve {
    /// Two whitespace-separated columns, one row per line.
    pub fn render(&self, exact: bool) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let (x, y) = if exact {
                (format_exact(&r.x), format_exact(&r.y))
            } else {
                (format_decimal(&r.x, FIGURE_DIGITS), format_decimal(&r.y, FIGURE_DIGITS))
            };
            out.push_str(&x);
            out.push(' ');
            out.push_str(&y);
            out.push('\n');
        }
        out
    }
}

/// `samples` equally spaced rationals across a bounded interval.
pub fn uniform_grid(interval: &RealInterval, samples: usize) -> Result<Vec<Rational>> {
    let (Some(lo), Some(hi)) = (interval.lo(), interval.hi()) else {
        return Err(Error::InvalidInterval(format!("figure interval {interval} must be bounded")));
    };
    if samples < 2 {
        return Err(Error::Precondition(format!("need at least 2 samples, got {samples}")));
    }
    let step = (hi - lo) / int(samples as i64 - 1);
    Ok((0..samples).map(|k| lo + &step * int(k as i64)).collect())
}

fn sort_dedup(rows: &mut Vec<Row>) -> Result<()> {
    let bits = precision_budget();
    let mut err = None;
    rows.sort_by(|a, b| match a.x.cmp_within(&b.x, bits).ordering() {
        Some(o) => o,
        None => {
            err = Some(Error::Undecided { bits });
            Ordering::Equal
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    rows.dedup_by(|a, b| a.x == b.x);
    Ok(())
}

/// Values of a piecewise Möbius function at the grid, at its breakpoints
/// and at its knots.
fn sample_piecewise(pm: &PiecewiseMobius, grid: &[Rational]) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for x in grid {
        let y = pm
            .value_at(x)
            .ok_or_else(|| Error::Precondition(format!("{x} outside the envelope domain")))?;
        rows.push(Row {
            x: QuadraticValue::from(x.clone()),
            y,
        });
    }
    for k in pm.knots() {
        rows.push(Row {
            x: k.x.clone(),
            y: k.value.clone(),
        });
    }
    for p in pm.pieces() {
        // continuous crossings carry no knot; sample their left end
        if let Abscissa::At(x) = &p.lo {
            if !rows.iter().any(|r| &r.x == x) {
                rows.push(Row {
                    x: x.clone(),
                    y: p.start_value(),
                });
            }
        }
    }
    sort_dedup(&mut rows)?;
    Ok(rows)
}

/// The curves of one figure: `f` and `Mf`, and with a threshold `a` also
/// the small- and large-window operators on the same interval.
pub fn figure_curves(
    f: &StepFunction,
    interval: &RealInterval,
    samples: usize,
    threshold: Option<&Rational>,
    prefix: &str,
) -> Result<Vec<Curve>> {
    let grid = uniform_grid(interval, samples)?;
    let mut f_rows: Vec<Row> = grid
        .iter()
        .chain(f.breakpoints().iter().filter(|x| interval.contains(x)))
        .map(|x| Row {
            x: QuadraticValue::from(x.clone()),
            y: QuadraticValue::from(f.value_at(x).clone()),
        })
        .collect();
    sort_dedup(&mut f_rows)?;
    let mut curves = vec![
        Curve {
            name: format!("{prefix}_f"),
            rows: f_rows,
        },
        Curve {
            name: format!("{prefix}_Mf"),
            rows: sample_piecewise(&envelope(f, interval)?, &grid)?,
        },
    ];
    if let Some(a) = threshold {
        for (suffix, op) in [("Mnotf", Operator::Small(a.clone())), ("Msupf", Operator::Large(a.clone()))] {
            curves.push(Curve {
                name: format!("{prefix}_{suffix}"),
                rows: sample_piecewise(&operator_envelope(f, interval, op)?, &grid)?,
            });
        }
    }
    Ok(curves)
}

/// File prefix and threshold for a builtin's figure.
pub fn builtin_figure(name: &str) -> Option<(&'static str, Option<Rational>)> {
    match name {
        "example-1-6" => Some(("data_twot", None)),
        "example-1-8" => Some(("data_muchvar", None)),
        "figure-3" => Some(("data_defp", Some(int(1)))),
        _ => None,
    }
}

impl Row {
    /// The abscissa when it is rational.
    pub fn rational_x(&self) -> Option<Rational> {
        self.x.to_rational()
    }
}
