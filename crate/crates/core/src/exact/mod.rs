//! Exact scalars: rationals, quadratic irrationals `p + q*sqrt(d)`, finite
//! sums of those over several radicands, and certified dyadic enclosures used
//! to order sums that live in different quadratic fields.

mod interval;
mod quadratic;
mod rational;
mod squarefree;
mod sum;

use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

pub use interval::CertifiedInterval;
pub use quadratic::{solve_quadratic, QuadraticValue};
pub use rational::{int, parse_rational, rat, Rational};
pub use sum::{compare_sums, compare_sums_detailed, AlgebraicSum, Comparison};

/// Budget used by comparisons that do not take an explicit one.
pub const DEFAULT_PRECISION_BITS: u32 = 1024;

static PRECISION_BITS: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_BITS);

/// Current process-wide comparison budget in bits.
pub fn precision_budget() -> u32 {
    PRECISION_BITS.load(AtomicOrdering::Relaxed)
}

/// Overrides the process-wide comparison budget. Values below 16 are clamped.
pub fn set_precision_budget(bits: u32) {
    PRECISION_BITS.store(bits.max(16), AtomicOrdering::Relaxed);
}
