//! Continued fractions, small-denominator scans, irrationality-exponent
//! bookkeeping, and the smoothing-gain / critical-index formulas.
//!
//! The irrationality exponent `μ(r)` is the supremum of powers `μ` with
//! `0 < |r - n/k| < |k|^{-μ}` for infinitely many pairs; it maps ℝ onto
//! `{1} ∪ [2, ∞]`, with `μ = 1` for rationals and `μ = 2` for algebraic
//! irrationals and almost every real. For irrational non-algebraic coupling
//! values the exponent is not computable from a float, so here it is an
//! input or a clearly-labeled empirical slope fit, never a silent guess.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::diagnostics::linear_fit;
use crate::error::{Error, Result};
use crate::normal_form::{Coupling, ResonanceCoefficients};

/// Simple continued fraction `[a₀; a₁, a₂, ...]` with exact convergents.
#[derive(Debug, Clone)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<BigInt>,
    /// Convergents `pₙ/qₙ` as exact integer pairs.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// True when the expansion terminated exactly (rational input).
    pub terminated: bool,
}

impl ContinuedFraction {
    /// Exact expansion of `num/den` by the Euclidean algorithm.
    pub fn from_rational(num: i64, den: i64, depth: usize) -> Result<Self> {
        if den == 0 {
            return Err(Error::Config("continued fraction of n/0".into()));
        }
        if depth == 0 {
            return Err(Error::Config("continued-fraction depth must be ≥ 1".into()));
        }
        let mut p = BigInt::from(num) * den.signum();
        let mut q = BigInt::from(den.abs());
        let mut quotients = Vec::new();
        while !q.is_zero() && quotients.len() < depth {
            let (a, r) = p.div_mod_floor(&q);
            quotients.push(a);
            p = q;
            q = r;
        }
        Ok(Self::from_quotients(quotients, true))
    }

    /// Floating expansion; terminates once the residual drops below `1e-12`
    /// (the precision of the input is exhausted there).
    pub fn from_f64(x: f64, depth: usize) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Config(
                "continued fraction of a non-finite value".into(),
            ));
        }
        if depth == 0 {
            return Err(Error::Config("continued-fraction depth must be ≥ 1".into()));
        }
        let mut quotients = Vec::new();
        let mut value = x;
        let mut terminated = false;
        for _ in 0..depth {
            let a = value.floor();
            quotients.push(BigInt::from(a as i64));
            let frac = value - a;
            if frac.abs() < 1e-12 {
                terminated = true;
                break;
            }
            value = 1.0 / frac;
        }
        Ok(Self::from_quotients(quotients, terminated))
    }

    fn from_quotients(quotients: Vec<BigInt>, terminated: bool) -> Self {
        let mut convergents = Vec::with_capacity(quotients.len());
        // p_{-2}/q_{-2} = 0/1, p_{-1}/q_{-1} = 1/0.
        let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        for a in &quotients {
            let p2 = a * &p1 + &p0;
            let q2 = a * &q1 + &q0;
            convergents.push((p2.clone(), q2.clone()));
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
        }
        ContinuedFraction {
            partial_quotients: quotients,
            convergents,
            terminated,
        }
    }

    /// `pₙ qₙ₋₁ - pₙ₋₁ qₙ = (-1)^{n-1}` for every consecutive pair.
    pub fn determinant_identity_holds(&self) -> bool {
        self.convergents.windows(2).enumerate().all(|(i, w)| {
            let (p_prev, q_prev) = &w[0];
            let (p, q) = &w[1];
            let det = p * q_prev - p_prev * q;
            let expect = if i % 2 == 0 { 1 } else { -1 };
            det == BigInt::from(expect)
        })
    }
}

/// Provenance of an irrationality-exponent value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MuProvenance {
    /// `r ∈ ℚ`, exponent exactly 1.
    Rational,
    /// Quadratic (hence algebraic) irrational: exponent exactly 2.
    AlgebraicIrrational,
    UserSupplied,
    /// Heuristic slope fit from a resonance-gap scan.
    EmpiricalEstimate,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MuAssignment {
    pub value: f64,
    pub provenance: MuProvenance,
}

/// Resolves `μ(ρ_a)`. The exponent is invariant under `r ↦ q + r`,
/// `r ↦ qr` and `r ↦ 1/r` for rational `q`, so all of `r₁, r₂, r̃₁, r̃₂` and
/// `ρ_a = √(12a-3)` share one value:
///
/// - rational case: `μ = 1`;
/// - exact `a` without the rational case: `ρ_a` is a quadratic irrational,
///   so `μ = 2`;
/// - floating `a`: a user-supplied value or (when allowed) an empirical
///   estimate from the gap scan; otherwise an error.
pub fn mu_of_coefficients(
    rc: &ResonanceCoefficients,
    user_mu: Option<f64>,
    allow_empirical: bool,
) -> Result<MuAssignment> {
    if rc.rational_case.is_some() {
        return Ok(MuAssignment {
            value: 1.0,
            provenance: MuProvenance::Rational,
        });
    }
    if rc.coupling.exact().is_some() {
        return Ok(MuAssignment {
            value: 2.0,
            provenance: MuProvenance::AlgebraicIrrational,
        });
    }
    if let Some(mu) = user_mu {
        if mu < 2.0 {
            return Err(Error::Domain(format!(
                "user-supplied μ = {mu} below 2 is impossible for an irrational"
            )));
        }
        return Ok(MuAssignment {
            value: mu,
            provenance: MuProvenance::UserSupplied,
        });
    }
    if allow_empirical {
        let scan = min_resonance_gap(&Coupling::Approx(rc.rho_a), 10_000)?;
        let value = scan
            .fitted_exponent
            .map(|e| (1.0 + e).max(2.0))
            .unwrap_or(2.0);
        return Ok(MuAssignment {
            value,
            provenance: MuProvenance::EmpiricalEstimate,
        });
    }
    Err(Error::UnresolvedMu(format!(
        "a = {} has no exact form; pass μ explicitly or enable empirical estimation",
        rc.a
    )))
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub k: i64,
    /// Integer `n` minimizing `|r - n/k|`.
    pub n_best: i64,
    /// `min_n |r - n/k|`.
    pub gap: f64,
    /// `|k| · dist(rk, ℤ)`.
    pub scaled_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapTable {
    pub rows: Vec<GapRow>,
    /// Slope of `-ln dist(rk, ℤ)` against `ln k` along record-setting `k`;
    /// estimates `μ(r) - 1`. `None` with fewer than two positive records.
    pub fitted_exponent: Option<f64>,
}

impl GapTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,n_best,gap,scaled_gap\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.15e},{:.15e}\n",
                r.k, r.n_best, r.gap, r.scaled_gap
            ));
        }
        out
    }

    /// Indices with exactly zero gap (rational resonances).
    pub fn exact_zeros(&self) -> Vec<i64> {
        self.rows
            .iter()
            .filter(|r| r.gap == 0.0)
            .map(|r| r.k)
            .collect()
    }
}

/// Scans `k = 1..=k_max` for the distance from `rk` to the integers.
/// Exact-rational inputs use integer arithmetic, so zeros are exact.
pub fn min_resonance_gap(r: &Coupling, k_max: i64) -> Result<GapTable> {
    if k_max < 1 {
        return Err(Error::Config("gap scan needs k_max ≥ 1".into()));
    }
    let mut rows = Vec::with_capacity(k_max as usize);
    let mut best = f64::INFINITY;
    let mut fit_x = Vec::new();
    let mut fit_y = Vec::new();
    for k in 1..=k_max {
        let (dist, n_best) = match r.exact() {
            Some((p, q)) => {
                // dist(pk/q, ℤ) = min(m, q-m)/q with m = pk mod q.
                let m = (p as i128 * k as i128).rem_euclid(q as i128);
                let down = m;
                let up = q as i128 - m;
                let n = if down <= up {
                    (p as i128 * k as i128 - down) / q as i128
                } else {
                    (p as i128 * k as i128 + up) / q as i128
                };
                (down.min(up) as f64 / q as f64, n as i64)
            }
            None => {
                let x = r.as_f64() * k as f64;
                let n = x.round();
                ((x - n).abs(), n as i64)
            }
        };
        if dist > 0.0 && dist < best {
            best = dist;
            fit_x.push((k as f64).ln());
            fit_y.push(-dist.ln());
        }
        rows.push(GapRow {
            k,
            n_best,
            gap: dist / k as f64,
            scaled_gap: k as f64 * dist,
        });
    }
    let fitted_exponent = (fit_x.len() >= 2).then(|| linear_fit(&fit_x, &fit_y).0);
    Ok(GapTable {
        rows,
        fitted_exponent,
    })
}

/// Supremum of the admissible smoothing gain `s₁ - s`.
///
/// Irrational case (`s > 1/2`): `min{1, s - 1/2, s + 2 - μ, 2s + 1 - μ}`,
/// an open bound. Rational case (`s > 1`): `min{1⁻, s - 1}`.
pub fn smoothing_gain(s: f64, mu: &MuAssignment, rational_case: bool) -> Result<f64> {
    if rational_case {
        if s <= 1.0 {
            return Err(Error::Domain(format!(
                "rational-case smoothing needs s > 1, got s = {s}"
            )));
        }
        return Ok(1f64.min(s - 1.0));
    }
    if s <= 0.5 {
        return Err(Error::Domain(format!(
            "smoothing needs s > 1/2, got s = {s}"
        )));
    }
    let mu = mu.value;
    Ok(1f64.min(s - 0.5).min(s + 2.0 - mu).min(2.0 * s + 1.0 - mu))
}

/// Critical local-theory index as a function of `μ(ρ_a)`:
/// `1` for `μ = 1` or `μ ≥ 3`, `(μ-1)/2` for `2 ≤ μ < 3`.
pub fn critical_index(mu: f64) -> Result<f64> {
    if mu == 1.0 || mu >= 3.0 {
        Ok(1.0)
    } else if (2.0..3.0).contains(&mu) {
        Ok((mu - 1.0) / 2.0)
    } else {
        Err(Error::Domain(format!(
            "μ = {mu} outside the exponent range {{1}} ∪ [2, ∞]"
        )))
    }
}
