//! Normal-form machinery for the coupled system: the differentiation-by-parts
//! operators (boundary terms `B₁..B₃`, cubic terms `R₁..R₅`, resonant
//! corrections `ρ₁..ρ₃`), the resonance denominators with their cubic
//! factorizations, and a numerical verifier of the integrated identity that
//! the operators satisfy along a simulated trajectory.

mod coefficients;
mod coupling;
mod identity;
mod operators;

pub use coefficients::{compute_coefficients, RationalRoots, ResonanceCoefficients};
pub use coupling::Coupling;
pub use identity::{verify_integrated_identity, IdentityOptions, ResidualReport};
pub use operators::{NormalFormOperators, NormalFormTerms, DEFAULT_EPS_RES};
