use thiserror::Error;

use crate::verify::HypothesisCheck;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("identically zero polynomial")]
    IdenticallyZeroPolynomial,

    #[error("precision exhausted after {bits} bits")]
    PrecisionExhausted { bits: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("indicator intervals overlap or touch: {0}")]
    OverlappingIntervals(String),

    #[error("affine map must have nonzero slope")]
    DegenerateAffineMap,

    #[error("non-rational representative: {0}")]
    NonRationalRepresentative(String),

    #[error("invalid lattice function: {0}")]
    InvalidLattice(String),

    #[error("site {site} does not belong to the lattice {lattice}")]
    LatticeMismatch { site: String, lattice: String },

    #[error("radius bound {given} too small, need at least {needed}")]
    RadiusTooSmall { given: i64, needed: i64 },

    #[error("{0} is not an attachment point")]
    NotAttachmentPoint(String),

    #[error("hypothesis f = 0 or f = Mf fails at {} location(s)", .0.witnesses.len())]
    HypothesisViolated(Box<HypothesisCheck>),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("comparison undecided at {bits} bits")]
    Undecided { bits: u32 },

    #[error("rejection sampling gave up after {attempts} attempts ({accepted} accepted so far)")]
    RejectionBudgetExceeded { attempts: usize, accepted: usize },
}
