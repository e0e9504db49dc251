//! Resonance coefficients and the cubic denominator factorizations.
//!
//! For coupling `a ∈ (1/4, 1)` the two convolution denominators factor as
//!
//! ```text
//! a k³ - k₁³ - k₂³ = -3k (k₁ - r₁ k)(k₁ - r₂ k),      k₂ = k - k₁,
//! k³ - a k₁³ - k₂³ = (1-a) k₁ (k₁ - r̃₁ k)(k₁ - r̃₂ k),
//! ```
//!
//! where `r₁ = 1/2 + √(12a-3)/6`, `r₂ = 1 - r₁` are the roots of
//! `3x² - 3x + (1-a)` and `r̃_j = 1/r_j` are the roots of `(1-a)x² - 3x + 3`.
//! Exact zeros of the denominators exist precisely when `r₁ ∈ ℚ`, i.e. when
//! `a = (3p(p-q) + q²)/q²` for integers `q/2 < p < q`.

use serde::{Deserialize, Serialize};

use super::coupling::{gcd, Coupling};
use crate::error::{Error, Result};

/// Exact fractional roots, present only when `r₁ = p/q ∈ ℚ`.
///
/// `r₂ = (q-p)/q`, `r̃₁ = q/p`, `r̃₂ = q/(q-p)` follow from `r₁ + r₂ = 1` and
/// `r̃_j = 1/r_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRoots {
    pub p: i64,
    pub q: i64,
}

impl RationalRoots {
    /// `r₁ k ∈ ℤ` (equivalently `r₂ k ∈ ℤ`) iff `q | k`.
    pub fn r1_times_is_integer(&self, k: i64) -> bool {
        k % self.q == 0
    }

    pub fn r1_times(&self, k: i64) -> i64 {
        debug_assert!(self.r1_times_is_integer(k));
        self.p * (k / self.q)
    }

    /// `r̃₁ k ∈ ℤ` iff `p | k`.
    pub fn rt1_times_is_integer(&self, k: i64) -> bool {
        k % self.p == 0
    }

    pub fn rt1_times(&self, k: i64) -> i64 {
        debug_assert!(self.rt1_times_is_integer(k));
        self.q * (k / self.p)
    }

    /// `r̃₂ k ∈ ℤ` iff `(q-p) | k`.
    pub fn rt2_times_is_integer(&self, k: i64) -> bool {
        k % (self.q - self.p) == 0
    }

    pub fn rt2_times(&self, k: i64) -> i64 {
        debug_assert!(self.rt2_times_is_integer(k));
        self.q * (k / (self.q - self.p))
    }
}

/// Roots and resonance data attached to a coupling value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceCoefficients {
    pub coupling: Coupling,
    pub a: f64,
    /// `ρ_a = √(12a - 3)`.
    pub rho_a: f64,
    pub r1: f64,
    pub r2: f64,
    pub rt1: f64,
    pub rt2: f64,
    /// Present exactly when `r₁ ∈ ℚ` (the fully resonant case).
    pub rational_case: Option<RationalRoots>,
}

/// Computes roots and resonance classification for `a ∈ (1/4, 1)`.
///
/// With an exact fraction the rational case is decided by integer
/// arithmetic: `12a - 3` must be the square of a rational, which reduces to
/// both numerator and denominator of the reduced fraction being perfect
/// squares.
pub fn compute_coefficients(coupling: &Coupling) -> Result<ResonanceCoefficients> {
    let a = coupling.as_f64();
    if !(a > 0.25 && a < 1.0) {
        return Err(Error::Domain(format!(
            "coupling a = {a} outside the admissible interval (1/4, 1)"
        )));
    }

    let rational_case = match coupling.exact() {
        Some((pa, qa)) => rational_roots(pa, qa),
        None => None,
    };

    let (rho_a, r1, r2, rt1, rt2) = match rational_case {
        Some(RationalRoots { p, q }) => {
            let (p, q) = (p as f64, q as f64);
            // ρ_a = 6(r₁ - 1/2) = (6p - 3q)/q.
            let rho = (6.0 * p - 3.0 * q) / q;
            (rho, p / q, (q - p) / q, q / p, q / (q - p))
        }
        None => {
            let rho = (12.0 * a - 3.0).sqrt();
            let r1 = 0.5 + rho / 6.0;
            let r2 = 0.5 - rho / 6.0;
            (rho, r1, r2, 1.0 / r1, 1.0 / r2)
        }
    };

    Ok(ResonanceCoefficients {
        coupling: *coupling,
        a,
        rho_a,
        r1,
        r2,
        rt1,
        rt2,
        rational_case,
    })
}

/// Exact roots of `3x² - 3x + (1 - p/q)`: rational iff `12a - 3` is the
/// square of a rational.
fn rational_roots(pa: i64, qa: i64) -> Option<RationalRoots> {
    // 12a - 3 = (12 pa - 3 qa) / qa, reduced.
    let num = 12 * pa - 3 * qa;
    let den = qa;
    debug_assert!(den > 0);
    if num <= 0 {
        return None;
    }
    let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
    let (num, den) = (num / g, den / g);
    let s = perfect_sqrt(num)?;
    let t = perfect_sqrt(den)?;
    // r₁ = 1/2 + (s/t)/6 = (3t + s) / (6t), reduced.
    let p_raw = 3 * t + s;
    let q_raw = 6 * t;
    let g = gcd(p_raw.unsigned_abs(), q_raw.unsigned_abs()) as i64;
    Some(RationalRoots {
        p: p_raw / g,
        q: q_raw / g,
    })
}

fn perfect_sqrt(x: i64) -> Option<i64> {
    if x < 0 {
        return None;
    }
    let r = (x as f64).sqrt().round() as i64;
    for cand in [r - 1, r, r + 1] {
        if cand >= 0 && cand * cand == x {
            return Some(cand);
        }
    }
    None
}

impl ResonanceCoefficients {
    /// Denominator of the first resonance equation:
    /// `a k³ - k₁³ - k₂³` with `k₂ = k - k₁`.
    pub fn denom_uu(&self, k: i64, k1: i64) -> f64 {
        let k2 = k - k1;
        self.a * cube(k) - cube(k1) - cube(k2)
    }

    /// The same quantity through its factorization
    /// `-3k (k₁ - r₁k)(k₁ - r₂k)`.
    pub fn denom_uu_factored(&self, k: i64, k1: i64) -> f64 {
        let (k, k1) = (k as f64, k1 as f64);
        -3.0 * k * (k1 - self.r1 * k) * (k1 - self.r2 * k)
    }

    /// Denominator of the second resonance equation:
    /// `k³ - a k₁³ - k₂³` with `k₂ = k - k₁`.
    pub fn denom_uv(&self, k: i64, k1: i64) -> f64 {
        let k2 = k - k1;
        cube(k) - self.a * cube(k1) - cube(k2)
    }

    /// The same quantity through `(1-a) k₁ (k₁ - r̃₁k)(k₁ - r̃₂k)`.
    pub fn denom_uv_factored(&self, k: i64, k1: i64) -> f64 {
        let (k, k1) = (k as f64, k1 as f64);
        (1.0 - self.a) * k1 * (k1 - self.rt1 * k) * (k1 - self.rt2 * k)
    }

    /// Exact-zero test for `a k³ - k₁³ - k₂³`. With an exact coupling the
    /// answer is decided in integer arithmetic; on the floating path a value
    /// inside the classification band is an error rather than a silent skip.
    pub fn denom_uu_is_zero(&self, k: i64, k1: i64, eps_res: f64) -> Result<bool> {
        if let Some((p, q)) = self.coupling.exact() {
            let k2 = k - k1;
            let lhs = p as i128 * cube128(k);
            let rhs = q as i128 * (cube128(k1) + cube128(k2));
            return Ok(lhs == rhs);
        }
        self.classify_float(self.denom_uu(k, k1), k, eps_res)
    }

    /// Exact-zero test for `k³ - a k₁³ - k₂³`.
    pub fn denom_uv_is_zero(&self, k: i64, k1: i64, eps_res: f64) -> Result<bool> {
        if let Some((p, q)) = self.coupling.exact() {
            let k2 = k - k1;
            let lhs = q as i128 * (cube128(k) - cube128(k2));
            let rhs = p as i128 * cube128(k1);
            return Ok(lhs == rhs);
        }
        self.classify_float(self.denom_uv(k, k1), k, eps_res)
    }

    /// Exact-zero test for the quadratic factor `(n - r₁k)(n - r₂k)`
    /// appearing in the first cubic operator; equals
    /// `(3n² - 3nk + (1-a)k²)/3`.
    pub fn quad_uu_is_zero(&self, k: i64, n: i64, eps_res: f64) -> Result<bool> {
        if let Some((p, q)) = self.coupling.exact() {
            let lhs = q as i128 * (3 * sq128(n) - 3 * n as i128 * k as i128 + sq128(k));
            let rhs = p as i128 * sq128(k);
            return Ok(lhs == rhs);
        }
        let value = self.quad_uu(k, n);
        let scale = 1f64.max((k as f64) * (k as f64));
        if value.abs() < eps_res * scale {
            return Err(Error::AmbiguousDenominator(format!(
                "(n-r₁k)(n-r₂k) = {value:.3e} at (k, n) = ({k}, {n}) is inside the \
                 classification band; supply a as an exact fraction"
            )));
        }
        Ok(false)
    }

    /// `(n - r₁k)(n - r₂k) = n² - nk + (1-a)k²/3`, evaluated from `a` alone.
    pub fn quad_uu(&self, k: i64, n: i64) -> f64 {
        let (k, n) = (k as f64, n as f64);
        n * n - n * k + (1.0 - self.a) * k * k / 3.0
    }

    fn classify_float(&self, value: f64, k: i64, eps_res: f64) -> Result<bool> {
        let scale = 1f64.max((k as f64).abs().powi(3));
        if value.abs() < eps_res * scale {
            return Err(Error::AmbiguousDenominator(format!(
                "denominator {value:.3e} at k = {k} is inside the classification band; \
                 supply a as an exact fraction to resolve resonances exactly"
            )));
        }
        Ok(false)
    }
}

fn cube(x: i64) -> f64 {
    let x = x as f64;
    x * x * x
}

fn cube128(x: i64) -> i128 {
    let x = x as i128;
    x * x * x
}

fn sq128(x: i64) -> i128 {
    let x = x as i128;
    x * x
}
