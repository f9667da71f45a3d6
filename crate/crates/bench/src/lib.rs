//! Fixtures shared by the benchmarks.

use maxvar::builtins::four_bumps;
use maxvar::verify::{generate, GeneratorKind, GeneratorParams, Instance};
use maxvar::exact::{int, rat};
use maxvar::{Lattice, LatticeFunction, RealInterval, StepFunction};

/// Step functions of increasing size: the four-bump figure and random
/// indicators with 2, 4 and 8 intervals.
pub fn step_functions() -> Vec<(String, StepFunction)> {
    let mut out = vec![("four_bumps".to_string(), four_bumps().expect("builtin"))];
    for k in [2usize, 4, 8] {
        let params = GeneratorParams {
            intervals: (k, k),
            ..GeneratorParams::default()
        };
        if let Ok(Instance::Continuous(f)) = generate(&GeneratorKind::Indicator, &params, k as u64) {
            out.push((format!("indicator_{k}"), f));
        }
    }
    out
}

/// Random functions on Z with windows of 8, 32 and 128 sites.
pub fn lattice_functions() -> Vec<(String, LatticeFunction)> {
    [8usize, 32, 128]
        .into_iter()
        .filter_map(|w| {
            let params = GeneratorParams {
                window: w,
                ..GeneratorParams::default()
            };
            match generate(&GeneratorKind::ArbitraryDiscrete, &params, w as u64) {
                Ok(Instance::Discrete(f)) => {
                    let f = match f.lattice() {
                        Lattice::Integers => f,
                        Lattice::HalfIntegers => f.translate(&rat(1, 2)).expect("half step"),
                    };
                    Some((format!("window_{w}"), f))
                }
                _ => None,
            }
        })
        .collect()
}

/// The smallest closed interval holding every breakpoint, padded by one.
pub fn support_interval(f: &StepFunction) -> RealInterval {
    let b = f.breakpoints();
    let one = int(1);
    RealInterval::closed(&b[0] - &one, b[b.len() - 1].clone() + one).expect("ordered")
}
