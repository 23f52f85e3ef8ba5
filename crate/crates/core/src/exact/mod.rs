//! Exact scalars, bivariate polynomials, trigonometric traces and tensors.

pub mod poly;
pub mod rat;
pub mod tensor;
pub mod trig;

pub use poly::Poly2;
pub use rat::Rat;
pub use tensor::TensorPoly;
pub use trig::{boundary_trace, harmonic_extension, TrigPoly};
