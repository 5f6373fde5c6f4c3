//! Exact scalars, one-sided points and interval-set algebra.

mod interval_set;
mod rational;
mod signed;

pub use interval_set::{hausdorff_closure_distance, Interval, IntervalSet, SetOp};
pub use rational::{q, Rational};
pub use signed::{Side, SignedPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("malformed rational {0:?} (expected p/q)")]
    BadRational(String),
    #[error("signed point {0} lies outside its admissible range")]
    BadSignedPoint(String),
    #[error("Hausdorff distance requires non-empty sets")]
    EmptySet,
}
