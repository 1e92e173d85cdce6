//! Rotation angles, stored as `θ/π` so that rationality is an exact property.

use std::fmt;

use crate::scalar::{Rational, Scalar, ScalarError};
use num_traits::{Signed, ToPrimitive};

#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    /// Exact value of `θ/π`.
    Exact(Scalar),
    /// Floating-point value of `θ/π`, produced by numeric decomposition.
    Numeric(f64),
}

impl Angle {
    pub fn turns_pi(p: i64, q: i64) -> Angle {
        Angle::Exact(Scalar::ratio(p, q))
    }

    pub fn over_pi_f64(&self) -> f64 {
        match self {
            Angle::Exact(s) => s.to_f64(),
            Angle::Numeric(x) => *x,
        }
    }

    pub fn radians(&self) -> f64 {
        self.over_pi_f64() * std::f64::consts::PI
    }

    pub fn exact(&self) -> Option<&Scalar> {
        match self {
            Angle::Exact(s) => Some(s),
            Angle::Numeric(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact(_))
    }

    /// `θ/π` reduced into `[0, 2)`.
    pub fn reduced(&self) -> Result<Angle, ScalarError> {
        Ok(match self {
            Angle::Exact(s) => {
                let half = s.scale(&Rational::new(1.into(), 2.into()));
                let k = half.floor()?;
                Angle::Exact(s - &Scalar::from_bigint(k * 2))
            }
            Angle::Numeric(x) => Angle::Numeric(x.rem_euclid(2.0)),
        })
    }

    /// `2π - θ`.
    pub fn conjugate(&self) -> Angle {
        match self {
            Angle::Exact(s) => Angle::Exact(&Scalar::from_integer(2) - s),
            Angle::Numeric(x) => Angle::Numeric(2.0 - x),
        }
    }

    /// Whether the angle lies in `(0, π) ∪ (π, 2π)`.
    pub fn is_admissible(&self) -> Result<bool, ScalarError> {
        match self {
            Angle::Exact(s) => {
                use std::cmp::Ordering::*;
                Ok(s.signum()? == Greater
                    && s.cmp_rational(&Rational::from_integer(2.into()))? == Less
                    && !s.is_integer())
            }
            Angle::Numeric(x) => Ok(*x > 0.0 && *x < 2.0 && (*x - 1.0).abs() > 0.0),
        }
    }

    /// `θ ∈ (0, π)`.
    pub fn in_upper_half(&self) -> Result<bool, ScalarError> {
        match self {
            Angle::Exact(s) => Ok(s.signum()?.is_gt() && s.cmp_rational(&Rational::from_integer(1.into()))?.is_lt()),
            Angle::Numeric(x) => Ok(*x > 0.0 && *x < 1.0),
        }
    }

    /// Exact `(cos θ, sin θ)` when `θ/π` is a multiple of `1/12`.
    pub fn exact_trig(&self) -> Option<(Scalar, Scalar)> {
        let r = self.exact()?.as_rational()?;
        let k = r * Rational::from_integer(12.into());
        if !k.is_integer() {
            return None;
        }
        let k = k.to_integer().mod_floor_24();
        Some((cos_twelfth(k), cos_twelfth((k + 18) % 24)))
    }

    pub fn cos_sin_f64(&self) -> (f64, f64) {
        if let Some((c, s)) = self.exact_trig() {
            return (c.to_f64(), s.to_f64());
        }
        let t = self.radians();
        (t.cos(), t.sin())
    }
}

trait Mod24 {
    fn mod_floor_24(&self) -> i64;
}

impl Mod24 for num_bigint::BigInt {
    fn mod_floor_24(&self) -> i64 {
        let r: num_bigint::BigInt = self % 24;
        let r = if r.is_negative() { r + 24 } else { r };
        r.to_i64().expect("small residue")
    }
}

/// `cos(kπ/12)` for `k` in `0..24`.
fn cos_twelfth(k: i64) -> Scalar {
    let k = if k > 12 { 24 - k } else { k };
    if k > 6 {
        return -cos_twelfth(12 - k);
    }
    let q = |p| Rational::new(num_bigint::BigInt::from(p), 4.into());
    match k {
        0 => Scalar::one(),
        1 => Scalar::sqrt(6).scale(&q(1)) + Scalar::sqrt(2).scale(&q(1)),
        2 => Scalar::sqrt(3).scale(&q(2)),
        3 => Scalar::sqrt(2).scale(&q(2)),
        4 => Scalar::ratio(1, 2),
        5 => Scalar::sqrt(6).scale(&q(1)) - Scalar::sqrt(2).scale(&q(1)),
        _ => Scalar::zero(),
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Exact(s) if s.is_zero() => write!(f, "0"),
            Angle::Exact(s) => write!(f, "({s})π"),
            Angle::Numeric(x) => write!(f, "{x:.12}π"),
        }
    }
}

impl From<Scalar> for Angle {
    fn from(s: Scalar) -> Self {
        Angle::Exact(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelfths_match_floats() {
        for k in -30..30 {
            let a = Angle::turns_pi(k, 12);
            let (c, s) = a.exact_trig().unwrap();
            let t = k as f64 * std::f64::consts::PI / 12.0;
            assert!((c.to_f64() - t.cos()).abs() < 1e-12, "cos {k}");
            assert!((s.to_f64() - t.sin()).abs() < 1e-12, "sin {k}");
            let one = c.try_mul(&c).unwrap() + s.try_mul(&s).unwrap();
            assert_eq!(one, Scalar::one());
        }
        assert!(Angle::turns_pi(1, 5).exact_trig().is_none());
    }

    #[test]
    fn reduction_and_admissibility() {
        let a = Angle::Exact(Scalar::sqrt(2).scale_int(3)).reduced().unwrap();
        // 3√2 ≈ 4.243 → 0.243
        assert!((a.over_pi_f64() - (3.0 * 2f64.sqrt() - 4.0)).abs() < 1e-12);
        assert!(a.is_admissible().unwrap());
        assert!(!Angle::turns_pi(1, 1).is_admissible().unwrap());
    }
}
