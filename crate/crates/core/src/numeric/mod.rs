//! Interval arithmetic and certified evaluation.

mod ball;
pub mod eval;
mod fball;
mod params;
pub mod jet;

pub use ball::BallScalar;
pub use eval::{certified_floor, EvalConfig, Evaluator, FloorOutcome};
pub use fball::FBall;
pub use params::{Params, C_MAX};
