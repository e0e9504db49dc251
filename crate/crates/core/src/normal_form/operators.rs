//! The differentiation-by-parts operators.
//!
//! Boundary (bilinear) terms, with `k₂ = k - k₁` and `Σ*` skipping exact-zero
//! denominators:
//!
//! ```text
//! B₁(f,g)_k = -Σ f_{k₁} g_{k₂} / (k₁ k₂)
//! B₂(f,g)_k = -βk Σ* f_{k₁} g_{k₂} / (a k³ - k₁³ - k₂³)
//! B₃(f,g)_k = -3 Σ* k₂ f_{k₁} g_{k₂} / (k³ - a k₁³ - k₂³)
//! ```
//!
//! Cubic terms over `k₁ + k₂ + k₃ = k`:
//!
//! ```text
//! R₁(f,g,h)_k = -2iβ Σ* k₂ f g h / ((k₁+k₂-r₁k)(k₁+k₂-r₂k))
//! R₂(f,g,h)_k =  6ia Σ  f g h / k₁          over (k₁+k₂)(k₂+k₃)(k₃+k₁) ≠ 0
//! R₃(f,g,h)_k =  2iβ Σ  f g h / k₁          over k₁ ≠ 0, k₂+k₃ ≠ 0
//! R₄(f,g,h)_k =  9ia Σ* k₃(k₁+k₂) f g h / (k³ - a(k₁+k₂)³ - k₃³)
//! R₅(f,g,h)_k =  9i  Σ* k₃(k₂+k₃) f g h / (k³ - a k₁³ - (k₂+k₃)³)
//! ```
//!
//! and resonant corrections, active only when `r₁ ∈ ℚ` (for `ρ₂`, `ρ₃`):
//!
//! ```text
//! ρ₁(f,g)_k = -(6ia/k) |f_k|² g_k
//! ρ₂(f,g)_k = -2iβk f_{r₁k} g_{r₂k}
//! ρ₃(f,g)_k = -3ik [(1-r̃₁) f_{r̃₁k} g_{(1-r̃₁)k} + (1-r̃₂) f_{r̃₂k} g_{(1-r̃₂)k}]
//! ```
//!
//! `R₃` is the trilinear term produced by differentiating `B₁` against the
//! quadratic coupling: substituting the `v`-equation into `∂_t(f_{k₁} f_{k₂})`
//! yields the kernel `1/k₁` acting on `(u, v, v)` with the pair `k₂ + k₃`
//! inheriting the nonzero constraint of the original `B₁` index.

use num_complex::Complex64;

use super::coefficients::ResonanceCoefficients;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

pub const DEFAULT_EPS_RES: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Operator context: resonance data plus the coupling strength `β` that
/// enters `B₂`, `R₁`, `R₃` and `ρ₂`.
#[derive(Debug, Clone)]
pub struct NormalFormOperators {
    rc: ResonanceCoefficients,
    beta: f64,
    eps_res: f64,
}

impl NormalFormOperators {
    pub fn new(rc: ResonanceCoefficients, beta: f64) -> Self {
        NormalFormOperators {
            rc,
            beta,
            eps_res: DEFAULT_EPS_RES,
        }
    }

    pub fn with_eps(mut self, eps_res: f64) -> Self {
        self.eps_res = eps_res;
        self
    }

    pub fn coefficients(&self) -> &ResonanceCoefficients {
        &self.rc
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eps_res(&self) -> f64 {
        self.eps_res
    }

    /// Dispatch over the boundary terms `j ∈ {1, 2, 3}`.
    pub fn bilinear(&self, j: u8, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        match j {
            1 => self.b1(f, g),
            2 => self.b2(f, g),
            3 => self.b3(f, g),
            _ => Err(Error::Config(format!("no bilinear operator B_{j}"))),
        }
    }

    /// Dispatch over the cubic terms `j ∈ {1..5}`.
    pub fn trilinear(
        &self,
        j: u8,
        f: &SpectralField,
        g: &SpectralField,
        h: &SpectralField,
    ) -> Result<SpectralField> {
        match j {
            1 => self.r1(f, g, h),
            2 => self.r2(f, g, h),
            3 => self.r3(f, g, h),
            4 => self.r4(f, g, h),
            5 => self.r5(f, g, h),
            _ => Err(Error::Config(format!("no trilinear operator R_{j}"))),
        }
    }

    /// Dispatch over the resonant corrections `j ∈ {1, 2, 3}`.
    pub fn resonant(&self, j: u8, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        match j {
            1 => Ok(self.rho1(f, g)),
            2 => Ok(self.rho2(f, g)),
            3 => Ok(self.rho3(f, g)),
            _ => Err(Error::Config(format!("no resonant operator ρ_{j}"))),
        }
    }

    pub fn b1(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        require_mean_zero(f, "first argument of B₁")?;
        require_mean_zero(g, "second argument of B₁")?;
        let n = common_truncation(&[f, g])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in (k - nn).max(-nn)..=(k + nn).min(nn) {
                let k2 = k - k1;
                if k1 == 0 || k2 == 0 {
                    continue;
                }
                acc += f.coeff(k1) * g.coeff(k2) / ((k1 * k2) as f64);
            }
            set_raw(&mut out, k, -acc);
        }
        Ok(out)
    }

    pub fn b2(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        let n = common_truncation(&[f, g])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in (k - nn).max(-nn)..=(k + nn).min(nn) {
                let k2 = k - k1;
                if self.rc.denom_uu_is_zero(k, k1, self.eps_res)? {
                    continue;
                }
                acc += f.coeff(k1) * g.coeff(k2) / self.rc.denom_uu(k, k1);
            }
            set_raw(&mut out, k, -self.beta * k as f64 * acc);
        }
        Ok(out)
    }

    pub fn b3(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        require_mean_zero(f, "first argument of B₃")?;
        let n = common_truncation(&[f, g])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in (k - nn).max(-nn)..=(k + nn).min(nn) {
                let k2 = k - k1;
                if self.rc.denom_uv_is_zero(k, k1, self.eps_res)? {
                    continue;
                }
                acc += k2 as f64 * f.coeff(k1) * g.coeff(k2) / self.rc.denom_uv(k, k1);
            }
            set_raw(&mut out, k, -3.0 * acc);
        }
        Ok(out)
    }

    pub fn r1(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        h: &SpectralField,
    ) -> Result<SpectralField> {
        let n = common_truncation(&[f, g, h])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in -nn..=nn {
                let fc = f.coeff(k1);
                if fc.norm_sqr() == 0.0 {
                    continue;
                }
                for k2 in -nn..=nn {
                    let k3 = k - k1 - k2;
                    if k3.abs() > nn || k2 == 0 {
                        continue;
                    }
                    let pair = k1 + k2;
                    if self.rc.quad_uu_is_zero(k, pair, self.eps_res)? {
                        continue;
                    }
                    acc += k2 as f64 * fc * g.coeff(k2) * h.coeff(k3) / self.rc.quad_uu(k, pair);
                }
            }
            set_raw(&mut out, k, -2.0 * self.beta * I * acc);
        }
        Ok(out)
    }

    pub fn r2(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        h: &SpectralField,
    ) -> Result<SpectralField> {
        require_mean_zero(f, "first argument of R₂")?;
        let n = common_truncation(&[f, g, h])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in -nn..=nn {
                if k1 == 0 {
                    continue;
                }
                let fc = f.coeff(k1) / k1 as f64;
                if fc.norm_sqr() == 0.0 {
                    continue;
                }
                for k2 in -nn..=nn {
                    let k3 = k - k1 - k2;
                    if k3.abs() > nn {
                        continue;
                    }
                    if (k1 + k2) == 0 || (k2 + k3) == 0 || (k3 + k1) == 0 {
                        continue;
                    }
                    acc += fc * g.coeff(k2) * h.coeff(k3);
                }
            }
            set_raw(&mut out, k, 6.0 * self.rc.a * I * acc);
        }
        Ok(out)
    }

    pub fn r3(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        h: &SpectralField,
    ) -> Result<SpectralField> {
        require_mean_zero(f, "first argument of R₃")?;
        let n = common_truncation(&[f, g, h])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in -nn..=nn {
                if k1 == 0 || k1 == k {
                    // k₁ = k makes k₂ + k₃ = 0, which the kernel excludes.
                    continue;
                }
                let fc = f.coeff(k1) / k1 as f64;
                if fc.norm_sqr() == 0.0 {
                    continue;
                }
                for k2 in -nn..=nn {
                    let k3 = k - k1 - k2;
                    if k3.abs() > nn {
                        continue;
                    }
                    acc += fc * g.coeff(k2) * h.coeff(k3);
                }
            }
            set_raw(&mut out, k, 2.0 * self.beta * I * acc);
        }
        Ok(out)
    }

    pub fn r4(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        h: &SpectralField,
    ) -> Result<SpectralField> {
        let n = common_truncation(&[f, g, h])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in -nn..=nn {
                let fc = f.coeff(k1);
                if fc.norm_sqr() == 0.0 {
                    continue;
                }
                for k2 in -nn..=nn {
                    let k3 = k - k1 - k2;
                    if k3.abs() > nn {
                        continue;
                    }
                    let pair = k1 + k2;
                    // k³ - a(k₁+k₂)³ - k₃³ is the uv denominator at (k, k₁+k₂).
                    if self.rc.denom_uv_is_zero(k, pair, self.eps_res)? {
                        continue;
                    }
                    acc += (k3 * pair) as f64 * fc * g.coeff(k2) * h.coeff(k3)
                        / self.rc.denom_uv(k, pair);
                }
            }
            set_raw(&mut out, k, 9.0 * self.rc.a * I * acc);
        }
        Ok(out)
    }

    pub fn r5(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        h: &SpectralField,
    ) -> Result<SpectralField> {
        let n = common_truncation(&[f, g, h])?;
        let mut out = SpectralField::zeros(n, false);
        let nn = n as i64;
        for k in -nn..=nn {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in -nn..=nn {
                // k³ - a k₁³ - (k₂+k₃)³ is the uv denominator at (k, k₁).
                if self.rc.denom_uv_is_zero(k, k1, self.eps_res)? {
                    continue;
                }
                let fc = f.coeff(k1) / self.rc.denom_uv(k, k1);
                if fc.norm_sqr() == 0.0 {
                    continue;
                }
                let tail = k - k1;
                for k2 in -nn..=nn {
                    let k3 = k - k1 - k2;
                    if k3.abs() > nn {
                        continue;
                    }
                    acc += (k3 * tail) as f64 * fc * g.coeff(k2) * h.coeff(k3);
                }
            }
            set_raw(&mut out, k, 9.0 * I * acc);
        }
        Ok(out)
    }

    pub fn rho1(&self, f: &SpectralField, g: &SpectralField) -> SpectralField {
        let n = f.truncation().max(g.truncation());
        let mut out = SpectralField::zeros(n, true);
        for k in -(n as i64)..=n as i64 {
            if k == 0 {
                continue;
            }
            let value = -6.0 * self.rc.a / k as f64 * I * f.coeff(k).norm_sqr() * g.coeff(k);
            set_raw(&mut out, k, value);
        }
        out
    }

    /// Zero unless `r₁ ∈ ℚ`; then reads the single resonant pair
    /// `(r₁k, r₂k)` whenever both indices are integers, contributing zero
    /// when they fall outside the truncation.
    pub fn rho2(&self, f: &SpectralField, g: &SpectralField) -> SpectralField {
        let n = f.truncation().max(g.truncation());
        let mut out = SpectralField::zeros(n, true);
        let Some(roots) = self.rc.rational_case else {
            return out;
        };
        for k in -(n as i64)..=n as i64 {
            if k == 0 || !roots.r1_times_is_integer(k) {
                continue;
            }
            let k1 = roots.r1_times(k);
            let k2 = k - k1;
            let value = -2.0 * self.beta * k as f64 * I * f.coeff(k1) * g.coeff(k2);
            set_raw(&mut out, k, value);
        }
        out
    }

    /// Zero unless `r₁ ∈ ℚ`; the two terms activate independently when
    /// `r̃₁k` resp. `r̃₂k` is an integer.
    pub fn rho3(&self, f: &SpectralField, g: &SpectralField) -> SpectralField {
        let n = f.truncation().max(g.truncation());
        let mut out = SpectralField::zeros(n, true);
        let Some(roots) = self.rc.rational_case else {
            return out;
        };
        let (p, q) = (roots.p, roots.q);
        for k in -(n as i64)..=n as i64 {
            if k == 0 {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            if roots.rt1_times_is_integer(k) {
                let k1 = roots.rt1_times(k);
                let w = (p - q) as f64 / p as f64; // 1 - r̃₁
                acc += w * f.coeff(k1) * g.coeff(k - k1);
            }
            if roots.rt2_times_is_integer(k) {
                let k1 = roots.rt2_times(k);
                let w = -(p as f64) / (q - p) as f64; // 1 - r̃₂
                acc += w * f.coeff(k1) * g.coeff(k - k1);
            }
            set_raw(&mut out, k, -3.0 * k as f64 * I * acc);
        }
        out
    }
}

/// All operator outputs for a state `(u, v)` with the canonical argument
/// assignment of the evolution equations.
#[derive(Debug, Clone)]
pub struct NormalFormTerms {
    pub b1: SpectralField,
    pub b2: SpectralField,
    pub b3: SpectralField,
    pub r1: SpectralField,
    pub r2: SpectralField,
    pub r3: SpectralField,
    pub r4: SpectralField,
    pub r5: SpectralField,
    pub rho1: SpectralField,
    pub rho2: SpectralField,
    pub rho3: SpectralField,
}

impl NormalFormTerms {
    pub fn compute(
        ops: &NormalFormOperators,
        u: &SpectralField,
        v: &SpectralField,
    ) -> Result<Self> {
        Ok(NormalFormTerms {
            b1: ops.b1(u, u)?,
            b2: ops.b2(v, v)?,
            b3: ops.b3(u, v)?,
            r1: ops.r1(u, v, v)?,
            r2: ops.r2(u, u, u)?,
            r3: ops.r3(u, v, v)?,
            r4: ops.r4(u, u, v)?,
            r5: ops.r5(u, u, v)?,
            rho1: ops.rho1(u, u),
            rho2: ops.rho2(v, v),
            rho3: ops.rho3(u, v),
        })
    }
}

fn common_truncation(fields: &[&SpectralField]) -> Result<usize> {
    let n = fields[0].truncation();
    if fields.iter().any(|f| f.truncation() != n) {
        return Err(Error::Config(
            "operator arguments have mismatched truncations".into(),
        ));
    }
    Ok(n)
}

fn require_mean_zero(field: &SpectralField, what: &str) -> Result<()> {
    let tol = 1e-13 * field.max_abs().max(1.0);
    if field.coeff(0).norm() > tol {
        return Err(Error::Invariant(format!(
            "nonzero mode 0 in a mean-zero slot: {what}"
        )));
    }
    Ok(())
}

#[inline]
fn set_raw(out: &mut SpectralField, k: i64, value: Complex64) {
    let n = out.truncation() as i64;
    out.coeffs_mut()[(k + n) as usize] = value;
}
