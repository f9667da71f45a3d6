//! Exact computation of the centred Hardy–Littlewood maximal function of
//! step functions and lattice functions, its variation, and checkers for
//! the sharp variation bound `var(Mf) <= var(f)`.

pub mod builtins;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod exact;
pub mod format;
pub mod mobius;
pub mod stepfn;
pub mod verify;

pub use continuous::{
    attachment_set, canonical_representative, envelope, eval_mf, eval_operator, operator_envelope, variation_mf,
    Operator, PiecewiseMobius,
};
pub use discrete::{brute_mf, discrete_mf, discrete_var, embed_to_step, DiscreteInterval, Lattice, LatticeFunction};
pub use error::{Error, Result};
pub use exact::{AlgebraicSum, Comparison, QuadraticValue, Rational};
pub use mobius::{Abscissa, Mobius};
pub use stepfn::{RealInterval, StepFunction};
pub use verify::{HypothesisCheck, Verdict, VerificationReport};
