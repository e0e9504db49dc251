//! Brute-force reference implementations.
//!
//! Everything here trades speed for transparency: transforms are evaluated
//! straight from their definition sums, convolutions by scattering over all
//! index tuples, and the normal-form kernels through the *factored* root form
//! of the denominators rather than the cubic polynomials. These routines are
//! the second leg of every dual-route check; keep them independent of the
//! fast paths.

use num_complex::Complex64;

use crate::normal_form::ResonanceCoefficients;
use crate::spectral::{GridSpec, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Resonance threshold for the factored-form denominators. The reference
/// inputs are small integer modes where genuine zeros are exact and nonzero
/// denominators are O(1), so a wide band is safe.
const ORACLE_RES_TOL: f64 = 1e-6;

/// Coefficients by direct evaluation of `(1/M) Σ_j u_j e^{-ik x_j}`.
pub fn dft_forward_direct(samples: &[f64], grid: &GridSpec) -> SpectralField {
    let m = grid.physical_size();
    let n = grid.truncation();
    let mut out = SpectralField::zeros(n, false);
    for k in 0..=n as i64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &s) in samples.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            acc += s * (-I * (k as f64) * x).exp();
        }
        acc /= m as f64;
        out.set_pair(
            k,
            if k == 0 {
                Complex64::new(acc.re, 0.0)
            } else {
                acc
            },
        );
    }
    out
}

/// Samples by direct evaluation of `Σ_k c_k e^{ik x_j}`.
pub fn dft_inverse_direct(field: &SpectralField, grid: &GridSpec) -> Vec<f64> {
    let m = grid.physical_size();
    let n = field.truncation() as i64;
    (0..m)
        .map(|j| {
            let x = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in -n..=n {
                acc += field.coeff(k) * (I * (k as f64) * x).exp();
            }
            acc.re
        })
        .collect()
}

/// Truncated convolution by scattering every pair `(k₁, k₂)`.
pub fn convolve_direct(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let n = f.truncation().max(g.truncation()) as i64;
    let mut out = SpectralField::zeros(n as usize, false);
    for k1 in -n..=n {
        let fc = f.coeff(k1);
        if fc.norm_sqr() == 0.0 {
            continue;
        }
        for k2 in -n..=n {
            let k = k1 + k2;
            if k.abs() > n {
                continue;
            }
            add_raw(&mut out, k, fc * g.coeff(k2));
        }
    }
    out
}

/// Right-hand side of the conservative system by direct convolution sums:
/// `du_k = -3iak (u·u)_k - iβk (v·v)_k`, `dv_k = -3i Σ k₂ u_{k₁} v_{k₂}`.
pub fn rhs_direct(
    u: &SpectralField,
    v: &SpectralField,
    a: f64,
    beta: f64,
) -> (SpectralField, SpectralField) {
    let n = u.truncation() as i64;
    let mut du = SpectralField::zeros(n as usize, true);
    let mut dv = SpectralField::zeros(n as usize, false);
    for k1 in -n..=n {
        for k2 in -n..=n {
            let k = k1 + k2;
            if k.abs() > n {
                continue;
            }
            let kf = k as f64;
            add_raw(
                &mut du,
                k,
                -3.0 * a * kf * I * u.coeff(k1) * u.coeff(k2)
                    - beta * kf * I * v.coeff(k1) * v.coeff(k2),
            );
            add_raw(
                &mut dv,
                k,
                -3.0 * I * (k2 as f64) * u.coeff(k1) * v.coeff(k2),
            );
        }
    }
    (du, dv)
}

fn uu_denominator_factored(rc: &ResonanceCoefficients, k: i64, k1: i64) -> Option<f64> {
    let (kf, k1f) = (k as f64, k1 as f64);
    let den = -3.0 * kf * (k1f - rc.r1 * kf) * (k1f - rc.r2 * kf);
    (den.abs() >= ORACLE_RES_TOL * 1f64.max(kf.abs().powi(3))).then_some(den)
}

fn uv_denominator_factored(rc: &ResonanceCoefficients, k: i64, k1: i64) -> Option<f64> {
    let (kf, k1f) = (k as f64, k1 as f64);
    let den = (1.0 - rc.a) * k1f * (k1f - rc.rt1 * kf) * (k1f - rc.rt2 * kf);
    (den.abs() >= ORACLE_RES_TOL * 1f64.max(kf.abs().powi(3))).then_some(den)
}

/// Boundary terms by pair scattering and factored denominators.
pub fn bilinear_direct(
    j: u8,
    f: &SpectralField,
    g: &SpectralField,
    rc: &ResonanceCoefficients,
    beta: f64,
) -> SpectralField {
    let n = f.truncation().max(g.truncation()) as i64;
    let mut out = SpectralField::zeros(n as usize, false);
    for k1 in -n..=n {
        for k2 in -n..=n {
            let k = k1 + k2;
            if k.abs() > n {
                continue;
            }
            let pair = f.coeff(k1) * g.coeff(k2);
            let term = match j {
                1 => {
                    if k1 == 0 || k2 == 0 {
                        continue;
                    }
                    -pair / ((k1 * k2) as f64)
                }
                2 => match uu_denominator_factored(rc, k, k1) {
                    Some(den) => -beta * k as f64 * pair / den,
                    None => continue,
                },
                3 => match uv_denominator_factored(rc, k, k1) {
                    Some(den) => -3.0 * k2 as f64 * pair / den,
                    None => continue,
                },
                _ => panic!("no bilinear operator B_{j}"),
            };
            add_raw(&mut out, k, term);
        }
    }
    out
}

/// Cubic terms by triple scattering and factored denominators.
pub fn trilinear_direct(
    j: u8,
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
    rc: &ResonanceCoefficients,
    beta: f64,
) -> SpectralField {
    let n = f.truncation().max(g.truncation()).max(h.truncation()) as i64;
    let mut out = SpectralField::zeros(n as usize, false);
    for k1 in -n..=n {
        for k2 in -n..=n {
            for k3 in -n..=n {
                let k = k1 + k2 + k3;
                if k.abs() > n {
                    continue;
                }
                let triple = f.coeff(k1) * g.coeff(k2) * h.coeff(k3);
                if triple.norm_sqr() == 0.0 {
                    continue;
                }
                let term = match j {
                    1 => {
                        let nf = (k1 + k2) as f64;
                        let kf = k as f64;
                        let den = (nf - rc.r1 * kf) * (nf - rc.r2 * kf);
                        if den.abs() < ORACLE_RES_TOL * 1f64.max(kf * kf) {
                            continue;
                        }
                        -2.0 * beta * I * (k2 as f64) * triple / den
                    }
                    2 => {
                        if k1 == 0 || (k1 + k2) == 0 || (k2 + k3) == 0 || (k3 + k1) == 0 {
                            continue;
                        }
                        6.0 * rc.a * I * triple / k1 as f64
                    }
                    3 => {
                        if k1 == 0 || (k2 + k3) == 0 {
                            continue;
                        }
                        2.0 * beta * I * triple / k1 as f64
                    }
                    4 => match uv_denominator_factored(rc, k, k1 + k2) {
                        Some(den) => 9.0 * rc.a * I * ((k3 * (k1 + k2)) as f64) * triple / den,
                        None => continue,
                    },
                    5 => match uv_denominator_factored(rc, k, k1) {
                        Some(den) => 9.0 * I * ((k3 * (k2 + k3)) as f64) * triple / den,
                        None => continue,
                    },
                    _ => panic!("no trilinear operator R_{j}"),
                };
                add_raw(&mut out, k, term);
            }
        }
    }
    out
}

/// Resonant corrections by nearest-integer detection of `r₁k`, `r̃_j k`.
pub fn resonant_direct(
    j: u8,
    f: &SpectralField,
    g: &SpectralField,
    rc: &ResonanceCoefficients,
    beta: f64,
) -> SpectralField {
    let n = f.truncation().max(g.truncation()) as i64;
    let mut out = SpectralField::zeros(n as usize, false);
    for k in -n..=n {
        if k == 0 {
            continue;
        }
        let kf = k as f64;
        let value = match j {
            1 => -6.0 * rc.a / kf * I * f.coeff(k).norm_sqr() * g.coeff(k),
            2 => match integer_multiple(rc.r1, k) {
                Some(k1) => -2.0 * beta * kf * I * f.coeff(k1) * g.coeff(k - k1),
                None => continue,
            },
            3 => {
                let mut acc = Complex64::new(0.0, 0.0);
                if let Some(k1) = integer_multiple(rc.rt1, k) {
                    acc += (1.0 - rc.rt1) * f.coeff(k1) * g.coeff(k - k1);
                }
                if let Some(k1) = integer_multiple(rc.rt2, k) {
                    acc += (1.0 - rc.rt2) * f.coeff(k1) * g.coeff(k - k1);
                }
                -3.0 * kf * I * acc
            }
            _ => panic!("no resonant operator ρ_{j}"),
        };
        add_raw(&mut out, k, value);
    }
    out
}

fn integer_multiple(r: f64, k: i64) -> Option<i64> {
    let x = r * k as f64;
    let m = x.round();
    ((x - m).abs() < 1e-9).then_some(m as i64)
}

fn add_raw(out: &mut SpectralField, k: i64, value: Complex64) {
    let n = out.truncation() as i64;
    out.coeffs_mut()[(k + n) as usize] += value;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::random_hs_field;
    use crate::normal_form::{compute_coefficients, Coupling, NormalFormOperators};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Fast operator paths against the scattering oracle on random data.
    #[test]
    fn operators_match_brute_force_at_small_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let beta = -1.0;
        let n = 8;
        for coupling in [
            Coupling::from_fraction(1, 3).unwrap(),
            Coupling::from_fraction(1, 2).unwrap(),
        ] {
            let rc = compute_coefficients(&coupling).unwrap();
            let ops = NormalFormOperators::new(rc.clone(), beta);
            for trial in 0..5 {
                let u = random_hs_field(n, 1.0, 1.0, true, &mut rng);
                let v = random_hs_field(n, 1.0, 1.0, false, &mut rng);

                for j in 1..=3u8 {
                    // B₁ takes two mean-zero slots, B₂ two v-type slots,
                    // B₃ the mixed pair.
                    let (f, g) = match j {
                        1 => (&u, &u),
                        2 => (&v, &v),
                        _ => (&u, &v),
                    };
                    let fast = ops.bilinear(j, f, g).unwrap();
                    let slow = bilinear_direct(j, f, g, &rc, beta);
                    assert!(
                        fast.max_diff(&slow) < 1e-12,
                        "B_{j} mismatch {:.2e} (a = {}, trial {trial})",
                        fast.max_diff(&slow),
                        rc.a
                    );
                }
                for j in 1..=5u8 {
                    let (f, g, h) = match j {
                        1 | 3 => (&u, &v, &v),
                        _ => (&u, &u, &v),
                    };
                    let fast = ops.trilinear(j, f, g, h).unwrap();
                    let slow = trilinear_direct(j, f, g, h, &rc, beta);
                    assert!(
                        fast.max_diff(&slow) < 1e-12,
                        "R_{j} mismatch {:.2e} (a = {})",
                        fast.max_diff(&slow),
                        rc.a
                    );
                }
                for j in 1..=3u8 {
                    let fast = ops.resonant(j, &u, &v).unwrap();
                    let slow = resonant_direct(j, &u, &v, &rc, beta);
                    assert!(
                        fast.max_diff(&slow) < 1e-12,
                        "ρ_{j} mismatch {:.2e} (a = {})",
                        fast.max_diff(&slow),
                        rc.a
                    );
                }
            }
        }
    }
}
