//! Exact scalars over the rationals extended by declared irrational generators.
//!
//! A [`Scalar`] is `rat + sum(coeff_g * g)` over generators `g` that the user
//! declares to be linearly independent over the rationals together with `1`.
//! Rationality is therefore decided structurally. Comparisons with integers
//! go through certified enclosures refined up to a bisection budget.
//!
//! Square-root generators `sqrt(d)` additionally multiply and invert inside the
//! multiquadratic field they span; declared generators only support linear
//! operations.

mod generator;
pub mod lattice;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use generator::{Gen, Generator, GeneratorKind};
pub use lattice::{relation_lattice, RelationLattice};

pub type Rational = BigRational;

pub const DEFAULT_ENCLOSURE_BUDGET: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("enclosure budget exceeded while separating {0} from {1}")]
    EnclosureBudgetExceeded(String, String),
    #[error("product of {0} and {1} leaves the declared generator span")]
    NonLinear(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown generator id {0:?}")]
    UnknownGenerator(String),
}

/// Bisection budget, overridable through `MASLOV_ENCLOSURE_BUDGET`.
pub fn enclosure_budget() -> u32 {
    static BUDGET: OnceLock<u32> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("MASLOV_ENCLOSURE_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_ENCLOSURE_BUDGET)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    rat: Rational,
    irr: BTreeMap<Gen, Rational>,
}

/// Result of [`Scalar::floor_ops`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloorOps {
    pub floor: BigInt,
    pub frac: Scalar,
    pub ceil: BigInt,
    pub phi: u8,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_rational(rat: Rational) -> Self {
        Scalar { rat, irr: BTreeMap::new() }
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::from_rational(Rational::from_integer(n))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::from_rational(Rational::new(p.into(), q.into()))
    }

    pub fn generator(g: &Arc<Generator>) -> Self {
        Scalar::zero().with_term(g, Rational::one())
    }

    /// `sqrt(n)` for a non-negative integer, reduced to canonical form.
    pub fn sqrt(n: u64) -> Self {
        let (s, d) = generator::squarefree_split(n);
        if d == 1 {
            return Scalar::from_integer(s as i64);
        }
        let g = Generator::sqrt(d).expect("squarefree radicand");
        Scalar::zero().with_term(&g, Rational::from_integer(s.into()))
    }

    /// Adds `coeff * g` to `self`.
    pub fn with_term(mut self, g: &Arc<Generator>, coeff: Rational) -> Self {
        let key = Gen(g.clone());
        let entry = self.irr.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.irr.remove(&key);
        }
        self
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rat
    }

    pub fn irrational_coeffs(&self) -> impl Iterator<Item = (&Arc<Generator>, &Rational)> {
        self.irr.iter().map(|(g, c)| (&g.0, c))
    }

    pub fn generators(&self) -> impl Iterator<Item = &Arc<Generator>> {
        self.irr.keys().map(|g| &g.0)
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rat)
    }

    pub fn is_zero(&self) -> bool {
        self.irr.is_empty() && self.rat.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rat.is_integer()
    }

    pub fn scale(&self, k: &Rational) -> Scalar {
        if k.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            rat: &self.rat * k,
            irr: self.irr.iter().map(|(g, c)| (g.clone(), c * k)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Scalar {
        self.scale(&Rational::from_integer(k.into()))
    }

    fn all_sqrt(&self) -> bool {
        self.irr.keys().all(|g| g.0.radicand().is_some())
    }

    /// Exact product. Fails when both factors are irrational and either one
    /// involves a declared (non square-root) generator.
    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if let Some(k) = other.as_rational() {
            return Ok(self.scale(k));
        }
        if let Some(k) = self.as_rational() {
            return Ok(other.scale(k));
        }
        if !self.all_sqrt() || !other.all_sqrt() {
            return Err(ScalarError::NonLinear(self.to_string(), other.to_string()));
        }
        let mut out = Scalar::from_rational(&self.rat * &other.rat);
        for (g, c) in &other.irr {
            out = out.with_term(&g.0, c * &self.rat);
        }
        for (g, c) in &self.irr {
            out = out.with_term(&g.0, c * &other.rat);
        }
        for (ga, ca) in &self.irr {
            for (gb, cb) in &other.irr {
                let da = ga.0.radicand().unwrap_or(1);
                let db = gb.0.radicand().unwrap_or(1);
                let (k, d) = generator::sqrt_product(da, db);
                let coeff = ca * cb * Rational::from_integer(k.into());
                if d == 1 {
                    out.rat += coeff;
                } else {
                    out = out.with_term(&Generator::sqrt(d)?, coeff);
                }
            }
        }
        Ok(out)
    }

    /// Exact inverse inside the multiquadratic field spanned by square roots.
    pub fn try_inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Scalar::from_rational(r.recip()));
        }
        if !self.all_sqrt() {
            return Err(ScalarError::NonLinear("1".into(), self.to_string()));
        }
        let primes: Vec<u64> = self
            .irr
            .keys()
            .filter_map(|g| g.0.radicand())
            .flat_map(generator::prime_factors)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        // product of all non-identity Galois conjugates
        let mut conj_prod = Scalar::one();
        for mask in 1u32..(1u32 << primes.len()) {
            let flipped: Vec<u64> = primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| *p)
                .collect();
            conj_prod = conj_prod.try_mul(&self.conjugate(&flipped))?;
        }
        let norm = self.try_mul(&conj_prod)?;
        let norm = norm
            .as_rational()
            .cloned()
            .ok_or_else(|| ScalarError::NonLinear("norm".into(), self.to_string()))?;
        Ok(conj_prod.scale(&norm.recip()))
    }

    /// Galois conjugate flipping the sign of `sqrt(p)` for every listed prime.
    fn conjugate(&self, primes: &[u64]) -> Scalar {
        let mut out = Scalar::from_rational(self.rat.clone());
        for (g, c) in &self.irr {
            let d = g.0.radicand().unwrap_or(1);
            let flips = primes.iter().filter(|p| d % **p == 0).count();
            let c = if flips % 2 == 1 { -c.clone() } else { c.clone() };
            out = out.with_term(&g.0, c);
        }
        out
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.try_mul(&other.try_inv()?)
    }

    /// Interval enclosure after `level` refinement steps of every generator.
    pub fn enclosure(&self, level: u32) -> (Rational, Rational) {
        let mut lo = self.rat.clone();
        let mut hi = self.rat.clone();
        for (g, c) in &self.irr {
            let (glo, ghi) = g.0.enclosure(level);
            if c.is_positive() {
                lo += c * glo;
                hi += c * ghi;
            } else {
                lo += c * ghi;
                hi += c * glo;
            }
        }
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = self.rat.to_f64().unwrap_or(f64::NAN);
        for (g, c) in &self.irr {
            v += c.to_f64().unwrap_or(f64::NAN) * g.0.approx();
        }
        v
    }

    /// Refines enclosures until `pred(lo, hi)` yields a decision.
    fn refine<T>(
        &self,
        what: &str,
        mut pred: impl FnMut(&Rational, &Rational) -> Option<T>,
    ) -> Result<T, ScalarError> {
        let budget = enclosure_budget();
        let mut level = 0u32;
        loop {
            let (lo, hi) = self.enclosure(level);
            if let Some(t) = pred(&lo, &hi) {
                return Ok(t);
            }
            if level >= budget {
                return Err(ScalarError::EnclosureBudgetExceeded(
                    self.to_string(),
                    what.to_string(),
                ));
            }
            level = if level == 0 { 8 } else { (level * 2).min(budget) };
        }
    }

    /// Sign of the represented real number.
    pub fn signum(&self) -> Result<Ordering, ScalarError> {
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        if let Some(r) = self.as_rational() {
            return Ok(r.cmp(&Rational::zero()));
        }
        self.refine("0", |lo, hi| {
            if lo.is_positive() {
                Some(Ordering::Greater)
            } else if hi.is_negative() {
                Some(Ordering::Less)
            } else {
                None
            }
        })
    }

    pub fn cmp_exact(&self, other: &Scalar) -> Result<Ordering, ScalarError> {
        (self - other).signum()
    }

    pub fn cmp_rational(&self, r: &Rational) -> Result<Ordering, ScalarError> {
        (self - &Scalar::from_rational(r.clone())).signum()
    }

    pub fn floor(&self) -> Result<BigInt, ScalarError> {
        if let Some(r) = self.as_rational() {
            return Ok(r.floor().to_integer());
        }
        self.refine("the nearest integers", |lo, hi| {
            let f = lo.floor();
            // hi must stay strictly below the next integer and lo must not be an integer
            (f == hi.floor() && !hi.is_integer() && !lo.is_integer()).then(|| f.to_integer())
        })
    }

    pub fn ceil(&self) -> Result<BigInt, ScalarError> {
        if let Some(r) = self.as_rational() {
            return Ok(r.ceil().to_integer());
        }
        Ok(self.floor()? + 1)
    }

    pub fn frac(&self) -> Result<Scalar, ScalarError> {
        Ok(self - &Scalar::from_bigint(self.floor()?))
    }

    /// `floor`, fractional part, `ceil` and `phi = ceil - floor`.
    pub fn floor_ops(&self) -> Result<FloorOps, ScalarError> {
        let floor = self.floor()?;
        let ceil = self.ceil()?;
        let frac = self - &Scalar::from_bigint(floor.clone());
        let phi = if ceil == floor { 0 } else { 1 };
        Ok(FloorOps { floor, frac, ceil, phi })
    }

    /// `E(a) = ceil(a)` as a machine integer.
    pub fn ceil_i64(&self) -> Result<i64, ScalarError> {
        Ok(self.ceil()?.to_i64().expect("ceil fits in i64"))
    }

    pub fn floor_i64(&self) -> Result<i64, ScalarError> {
        Ok(self.floor()?.to_i64().expect("floor fits in i64"))
    }

    /// `phi(a) = E(a) - floor(a)`, zero exactly at integers.
    pub fn phi(&self) -> u8 {
        if self.is_integer() {
            0
        } else {
            1
        }
    }

    /// Fractional part lies strictly inside `(0, bound)`.
    pub fn frac_in_open(&self, bound: &Rational) -> Result<bool, ScalarError> {
        let f = self.frac()?;
        if f.is_zero() {
            return Ok(false);
        }
        Ok(f.cmp_rational(bound)? == Ordering::Less)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, other: &Scalar) -> Scalar {
        let mut out = self.clone();
        out.rat += &other.rat;
        for (g, c) in &other.irr {
            out = out.with_term(&g.0, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, other: &Scalar) -> Scalar {
        self + &(-other)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(&-Rational::one())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, other: Scalar) -> Scalar {
        &self + &other
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, other: Scalar) -> Scalar {
        &self - &other
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.rat.is_zero() || self.irr.is_empty() {
            parts.push(self.rat.to_string());
        }
        for (g, c) in &self.irr {
            if c.is_one() {
                parts.push(g.0.id().to_string());
            } else {
                parts.push(format!("{}*{}", c, g.0.id()));
            }
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"1.414213"`.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let err = || ScalarError::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, dec)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), dec);
        let num: BigInt = digits.parse().map_err(|_| err())?;
        let den = num_traits::pow(BigInt::from(10), dec.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(p))
}

/// `p/q` string in lowest terms, integers without a denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Scalar {
        Scalar::sqrt(2)
    }

    #[test]
    fn floor_ops_integer_and_half() {
        let a = Scalar::from_integer(2).floor_ops().unwrap();
        assert_eq!((a.floor, a.ceil, a.phi), (2.into(), 2.into(), 0));
        assert!(a.frac.is_zero());
        let b = Scalar::ratio(3, 2).floor_ops().unwrap();
        assert_eq!((b.floor, b.ceil, b.phi), (1.into(), 2.into(), 1));
        assert_eq!(b.frac, Scalar::ratio(1, 2));
    }

    #[test]
    fn floor_ops_sqrt2_declared_enclosure() {
        let g = Generator::declared(
            "sqrt(2)",
            "sqrt(2)",
            parse_rational("1.414213").unwrap(),
            parse_rational("1.414214").unwrap(),
        )
        .unwrap();
        let a = Scalar::generator(&g);
        let ops = a.floor_ops().unwrap();
        assert_eq!((ops.floor.clone(), ops.ceil.clone(), ops.phi), (1.into(), 2.into(), 1));
        assert_eq!(ops.frac, &a - &Scalar::one());
    }

    #[test]
    fn negative_irrational_floor() {
        let a = -sqrt2();
        assert_eq!(a.floor().unwrap(), BigInt::from(-2));
        assert_eq!(a.ceil().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn rationality_is_structural() {
        assert!(Scalar::ratio(5, 3).is_rational());
        assert!(!sqrt2().is_rational());
        assert!((&sqrt2() - &sqrt2()).is_rational());
    }

    #[test]
    fn multiquadratic_products() {
        let p = sqrt2().try_mul(&Scalar::sqrt(3)).unwrap();
        assert_eq!(p, Scalar::sqrt(6));
        assert_eq!(sqrt2().try_mul(&sqrt2()).unwrap(), Scalar::from_integer(2));
        let x = &Scalar::one() + &sqrt2();
        let y = &Scalar::from_integer(3) - &Scalar::sqrt(3);
        let xy = x.try_mul(&y).unwrap();
        // (1+√2)(3-√3) = 3 - √3 + 3√2 - √6
        let expect = Scalar::from_integer(3) - Scalar::sqrt(3) + Scalar::sqrt(2).scale_int(3)
            - Scalar::sqrt(6);
        assert_eq!(xy, expect);
    }

    #[test]
    fn multiquadratic_inverse() {
        let x = Scalar::one() + Scalar::sqrt(2) + Scalar::sqrt(3);
        let inv = x.try_inv().unwrap();
        assert_eq!(x.try_mul(&inv).unwrap(), Scalar::one());
        assert!((x.to_f64() * inv.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn declared_generators_do_not_multiply() {
        let g = Generator::declared(
            "t",
            "transcendental",
            parse_rational("0.1").unwrap(),
            parse_rational("0.2").unwrap(),
        )
        .unwrap();
        let t = Scalar::generator(&g);
        assert!(t.try_mul(&t).is_err());
        assert_eq!(t.try_mul(&Scalar::from_integer(2)).unwrap(), t.scale_int(2));
    }

    #[test]
    fn budget_exceeded_on_unrefinable_enclosure() {
        let g = Generator::declared(
            "t",
            "wide",
            parse_rational("0.5").unwrap(),
            parse_rational("1.5").unwrap(),
        )
        .unwrap();
        let t = Scalar::generator(&g);
        assert!(matches!(t.floor(), Err(ScalarError::EnclosureBudgetExceeded(..))));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-3/6").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("1.25").unwrap(), Rational::new(5.into(), 4.into()));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(format_rational(&Rational::new(4.into(), 2.into())), "2");
        assert!(parse_rational("x").is_err());
    }
}
