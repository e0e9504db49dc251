//! Pseudospectral toolkit for the Hirota-Satsuma coupled KdV system on the
//! 2π-periodic torus:
//!
//! ```text
//! u_t + a u_xxx + 3a (u²)_x + β (v²)_x = 0        (conservative)
//! v_t + v_xxx + 3 u v_x               = 0
//! ```
//!
//! with dispersion coupling `a ∈ (1/4, 1)`, plus the weakly damped and forced
//! variant where `γ u − f` and `γ v − g` enter the left-hand sides.
//!
//! The crate provides:
//!
//! - [`spectral`]: truncated Fourier fields, transforms, Sobolev norms and
//!   dealiased products;
//! - [`system`]: right-hand sides and an integrating-factor RK4 integrator for
//!   the conservative and dissipative flows;
//! - [`normal_form`]: the differentiation-by-parts operators (boundary terms
//!   `B₁..B₃`, cubic terms `R₁..R₅`, resonant corrections `ρ₁..ρ₃`), resonance
//!   denominators, and a numerical verifier of the integrated normal-form
//!   identity;
//! - [`diophantine`]: continued fractions, small-denominator gap scans,
//!   irrationality-exponent bookkeeping, smoothing-gain and critical-index
//!   formulas;
//! - [`diagnostics`]: conserved-energy monitors, nonlinear-smoothing
//!   experiments, dissipative energy bounds, absorbing-ball and
//!   attractor-regularity probes;
//! - [`oracle`]: slow brute-force reference implementations used to
//!   cross-check the fast paths.

pub mod diagnostics;
pub mod diophantine;
pub mod error;
pub mod normal_form;
pub mod oracle;
pub mod spectral;
pub mod system;

pub use error::{Error, Result};
