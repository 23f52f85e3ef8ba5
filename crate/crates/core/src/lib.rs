//! Expected signature of planar Brownian motion stopped on the unit circle.
//!
//! * [`exact`]: rationals, bivariate polynomials, trigonometric traces, tensors.
//! * [`hierarchy`]: the exact Dirichlet hierarchy for the expected-signature
//!   levels `πₙ(Φ(z))` and their developed 3-vectors `Vₙ(z)`.
//! * [`development`]: the hyperbolic development `M` and tensor contractions.
//! * [`ball`]: rigorous ball arithmetic.
//! * [`bessel`]: enclosures of `J₀`, `J₁`, `d(λ)` and the closed-form solution.
//! * [`pole`]: certified localization of the real zero of `d`.
//! * [`montecarlo`]: independent simulation of stopped Brownian signatures.

pub mod ball;
pub mod bessel;
pub mod development;
pub mod error;
pub mod exact;
pub mod hierarchy;
pub mod montecarlo;
pub mod pole;

pub use error::{Error, Result};
