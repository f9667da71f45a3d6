//! Named step functions used by the command line and the test suites.

use crate::error::{Error, Result};
use crate::exact::{int, rat, Rational};
use crate::stepfn::{RealInterval, StepFunction};

/// `χ[-c,-1] + χ[1,c]` for `1 < c < 3`.
pub fn two_bumps(c: &Rational) -> Result<StepFunction> {
    if !(c > &int(1) && c < &int(3)) {
        return Err(Error::Precondition(format!("c = {c} must lie in (1, 3)")));
    }
    StepFunction::indicator(
        &[
            RealInterval::closed(-c, int(-1))?,
            RealInterval::closed(int(1), c.clone())?,
        ],
        int(1),
    )
}

/// `χ[-3/2,-1] + h χ[-1/2,1/2] + χ[1,3/2]`.
pub fn bumps_with_plateau(h: &Rational) -> Result<StepFunction> {
    StepFunction::weighted_indicators(&[
        (rat(-3, 2), int(-1), int(1)),
        (rat(-1, 2), rat(1, 2), h.clone()),
        (int(1), rat(3, 2), int(1)),
    ])
}

/// `χ[-5/2,-2] + χ[-3/2,-1] + χ[1,2] + χ[3,7/2]`, vanishing on `[-1, 1]`.
pub fn four_bumps() -> Result<StepFunction> {
    StepFunction::weighted_indicators(&[
        (rat(-5, 2), int(-2), int(1)),
        (rat(-3, 2), int(-1), int(1)),
        (int(1), int(2), int(1)),
        (int(3), rat(7, 2), int(1)),
    ])
}

/// A builtin by name with its default plotting interval. `c` is used by
/// `example-1-6` only and defaults to 3/2.
pub fn builtin(name: &str, c: Option<&Rational>) -> Result<(StepFunction, RealInterval)> {
    match name {
        "example-1-6" => {
            let c = c.cloned().unwrap_or_else(|| rat(3, 2));
            let reach = &c + rat(1, 2);
            Ok((two_bumps(&c)?, RealInterval::closed(-&reach, reach)?))
        }
        "example-1-8" => Ok((bumps_with_plateau(&rat(2, 5))?, RealInterval::closed(int(-2), int(2))?)),
        "figure-3" => Ok((four_bumps()?, RealInterval::closed(int(0), int(1))?)),
        _ => Err(Error::Parse(format!(
            "unknown builtin {name:?}; expected example-1-6, example-1-8 or figure-3"
        ))),
    }
}

pub const BUILTIN_NAMES: [&str; 3] = ["example-1-6", "example-1-8", "figure-3"];
