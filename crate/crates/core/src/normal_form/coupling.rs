use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest denominator recovered when a floating coupling value is promoted
/// to an exact fraction. Small rationals like 1/3 or 3/4 written as decimals
/// are recognized; values such as 0.51 stay on the floating path, where the
/// arithmetic nature of the coupling is treated as unknown.
const RECONSTRUCT_MAX_DEN: i64 = 64;
const RECONSTRUCT_TOL: f64 = 1e-12;

/// The dispersion coupling `a`, kept exact when supplied as a fraction.
///
/// The rational/irrational dichotomy drives the entire resonance analysis,
/// so the representation is explicit: `Exact` routes all denominator-zero
/// classification through integer arithmetic, `Approx` leaves it to guarded
/// floating-point comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coupling {
    /// Exact fraction `p/q` in lowest terms with `q > 0`.
    Exact { p: i64, q: i64 },
    /// Floating value with no recognized exact form.
    Approx(f64),
}

impl Coupling {
    pub fn from_fraction(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Config("fraction with zero denominator".into()));
        }
        let sign = if q < 0 { -1 } else { 1 };
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        Ok(Coupling::Exact {
            p: sign * p / g,
            q: sign * q / g,
        })
    }

    /// Wraps a floating value, promoting it to an exact small fraction when
    /// one lies within `1e-12`. This keeps classification consistent between
    /// `1.0/3.0` and the fraction 1/3.
    pub fn from_f64(value: f64) -> Self {
        if !value.is_finite() {
            return Coupling::Approx(value);
        }
        if let Some((p, q)) = reconstruct_rational(value, RECONSTRUCT_MAX_DEN, RECONSTRUCT_TOL) {
            return Coupling::Exact { p, q };
        }
        Coupling::Approx(value)
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Coupling::Exact { p, q } => p as f64 / q as f64,
            Coupling::Approx(v) => v,
        }
    }

    pub fn exact(&self) -> Option<(i64, i64)> {
        match *self {
            Coupling::Exact { p, q } => Some((p, q)),
            Coupling::Approx(_) => None,
        }
    }
}

impl FromStr for Coupling {
    type Err = Error;

    /// Parses either an exact fraction `"p/q"` or a decimal literal. Only
    /// the fraction form is treated as exact.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let p: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad fraction numerator in '{s}'")))?;
            let q: i64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad fraction denominator in '{s}'")))?;
            Coupling::from_fraction(p, q)
        } else {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse coupling value '{s}'")))?;
            Ok(Coupling::from_f64(v))
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Coupling::Exact { p, q } => write!(f, "{p}/{q}"),
            Coupling::Approx(v) => write!(f, "{v}"),
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Continued-fraction reconstruction of a small rational near `value`.
fn reconstruct_rational(value: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, value.floor() as i64, 1i64);
    let mut frac = value - value.floor();
    for _ in 0..64 {
        if ((p1 as f64 / q1 as f64) - value).abs() <= tol {
            return Some((p1, q1));
        }
        if frac.abs() < f64::EPSILON {
            break;
        }
        let r = 1.0 / frac;
        let a = r.floor();
        frac = r - a;
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    (((p1 as f64 / q1 as f64) - value).abs() <= tol && q1 <= max_den).then_some((p1, q1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings_stay_exact() {
        let a: Coupling = "1/3".parse().unwrap();
        assert_eq!(a.exact(), Some((1, 3)));
        let b: Coupling = "6/18".parse().unwrap();
        assert_eq!(b.exact(), Some((1, 3)));
    }

    #[test]
    fn small_decimals_are_promoted() {
        assert_eq!(Coupling::from_f64(0.5).exact(), Some((1, 2)));
        assert_eq!(Coupling::from_f64(1.0 / 3.0).exact(), Some((1, 3)));
        assert_eq!(Coupling::from_f64(0.3).exact(), Some((3, 10)));
    }

    #[test]
    fn generic_decimals_stay_floating() {
        // 0.51 = 51/100 has denominator beyond the reconstruction bound, so
        // its arithmetic nature is treated as unknown.
        assert_eq!(Coupling::from_f64(0.51).exact(), None);
        assert_eq!(Coupling::from_f64(0.2947198).exact(), None);
    }

    #[test]
    fn decimal_strings_route_to_floating() {
        let a: Coupling = "0.51".parse().unwrap();
        assert_eq!(a.exact(), None);
        assert!((a.as_f64() - 0.51).abs() < 1e-15);
    }
}
