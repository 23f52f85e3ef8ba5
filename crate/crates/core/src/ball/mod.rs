//! Rigorous midpoint–radius ball arithmetic over dyadic floats of
//! configurable precision. Every operation returns a ball containing the exact
//! image of all points of its inputs.

mod complex;
pub mod dyadic;
pub mod format;
mod real;

pub use complex::ComplexBall;
pub use dyadic::{Dyadic, Round};
pub use real::{default_digits, BallJson, RealBall, DEFAULT_PREC};
