//! Primes of the form [n^c tan^theta(log n)].

pub mod arith;
pub mod counting;
pub mod error;
pub mod expsum;
pub mod hb;
pub mod numeric;
pub mod par;
pub mod report;
pub mod sequence;
pub mod vaaler;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::{BallScalar, EvalConfig, Evaluator, FBall, Params};
