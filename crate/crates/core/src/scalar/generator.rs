//! Irrational generators and their certified enclosures.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::ScalarError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Square root of a squarefree integer greater than one. Enclosures are
    /// refinable to any width through integer square roots.
    Sqrt(u64),
    /// A user-declared irrational known only through a fixed enclosure.
    Declared,
}

#[derive(Clone, Debug)]
pub struct Generator {
    id: String,
    desc: String,
    kind: GeneratorKind,
    lo: BigRational,
    hi: BigRational,
}

impl Generator {
    /// Canonical generator for `sqrt(d)` with `d` squarefree and `d > 1`.
    pub fn sqrt(d: u64) -> Result<Arc<Generator>, ScalarError> {
        if d < 2 || !is_squarefree(d) {
            return Err(ScalarError::InvalidGenerator(format!(
                "sqrt({d}) is not a squarefree radicand"
            )));
        }
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Generator>>>> = OnceLock::new();
        let mut cache = CACHE
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        let g = cache.entry(d).or_insert_with(|| {
            let root = BigUint::from(d).sqrt();
            let lo = BigRational::from_integer(BigInt::from(root));
            let hi = &lo + BigRational::one();
            Arc::new(Generator {
                id: format!("sqrt({d})"),
                desc: format!("sqrt({d})"),
                kind: GeneratorKind::Sqrt(d),
                lo,
                hi,
            })
        });
        Ok(g.clone())
    }

    /// A generator declared with an enclosure `[lo, hi]`. A description of the
    /// form `sqrt(N)` with squarefree `N` is recognised: the bounds must contain
    /// the root and the canonical `sqrt(N)` generator is returned instead.
    pub fn declared(
        id: &str,
        desc: &str,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Arc<Generator>, ScalarError> {
        if lo >= hi {
            return Err(ScalarError::InvalidGenerator(format!(
                "generator {id}: empty enclosure"
            )));
        }
        let kind = match parse_sqrt_desc(desc) {
            Some(d) if d > 1 && is_squarefree(d) => {
                let d_rat = BigRational::from_integer(BigInt::from(d));
                let contains = (lo.is_negative() || &lo * &lo < d_rat) && &hi * &hi > d_rat;
                if !contains {
                    return Err(ScalarError::InvalidGenerator(format!(
                        "generator {id}: enclosure [{lo}, {hi}] does not contain sqrt({d})"
                    )));
                }
                // square roots are canonicalised so products stay in one basis
                return Generator::sqrt(d);
            }
            _ => GeneratorKind::Declared,
        };
        Ok(Arc::new(Generator {
            id: id.to_string(),
            desc: desc.to_string(),
            kind,
            lo,
            hi,
        }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn desc(&self) -> &str {
        &self.desc
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn declared_bounds(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn radicand(&self) -> Option<u64> {
        match self.kind {
            GeneratorKind::Sqrt(d) => Some(d),
            GeneratorKind::Declared => None,
        }
    }

    /// Enclosure after `level` bisection steps. Width is at most
    /// `2^-level` for square roots; declared generators never refine.
    pub fn enclosure(&self, level: u32) -> (BigRational, BigRational) {
        match self.kind {
            GeneratorKind::Sqrt(d) => {
                let scale = BigUint::one() << (2 * level as usize);
                let root = (BigUint::from(d) * scale).sqrt();
                let denom = BigInt::one() << level as usize;
                let lo = BigRational::new(BigInt::from(root.clone()), denom.clone());
                let hi = BigRational::new(BigInt::from(root + 1u32), denom);
                // intersect with the declared bounds
                let lo = if lo > self.lo { lo } else { self.lo.clone() };
                let hi = if hi < self.hi { hi } else { self.hi.clone() };
                (lo, hi)
            }
            GeneratorKind::Declared => (self.lo.clone(), self.hi.clone()),
        }
    }

    pub fn approx(&self) -> f64 {
        match self.kind {
            GeneratorKind::Sqrt(d) => (d as f64).sqrt(),
            GeneratorKind::Declared => {
                let mid = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
                mid.to_f64().unwrap_or(f64::NAN)
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// Map key ordering generators by id.
#[derive(Clone, Debug)]
pub struct Gen(pub Arc<Generator>);

impl PartialEq for Gen {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Gen {}

impl PartialOrd for Gen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gen {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.id.cmp(&other.0.id)
    }
}

pub(crate) fn is_squarefree(mut d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        if d % p == 0 {
            d /= p;
        }
        p += 1;
    }
    true
}

/// Splits `n = s^2 * d` with `d` squarefree; returns `(s, d)`.
pub(crate) fn squarefree_split(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut d = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    d *= n;
    (s, d)
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Product `sqrt(a) * sqrt(b)` for squarefree `a, b` as `(coefficient, radicand)`.
pub(crate) fn sqrt_product(a: u64, b: u64) -> (u64, u64) {
    let g = a.gcd(&b);
    (g, (a / g) * (b / g))
}

fn parse_sqrt_desc(desc: &str) -> Option<u64> {
    let s = desc.trim();
    let inner = s
        .strip_prefix("sqrt(")
        .or_else(|| s.strip_prefix("√("))?
        .strip_suffix(')')?;
    inner.trim().parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational as parse_bound;

    #[test]
    fn sqrt_enclosure_shrinks() {
        let g = Generator::sqrt(2).unwrap();
        let (lo, hi) = g.enclosure(20);
        let two = BigRational::from_integer(2.into());
        assert!(&lo * &lo < two && &hi * &hi > two);
        assert!(hi - lo <= BigRational::new(1.into(), (1u64 << 20).into()));
    }

    #[test]
    fn squarefree_helpers() {
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(8), (2, 2));
        assert_eq!(sqrt_product(2, 6), (2, 3));
        assert!(!is_squarefree(18));
        assert_eq!(prime_factors(30), vec![2, 3, 5]);
    }

    #[test]
    fn declared_sqrt_is_recognised() {
        let g = Generator::declared(
            "s2",
            "sqrt(2)",
            parse_bound("1.414213").unwrap(),
            parse_bound("1.414214").unwrap(),
        )
        .unwrap();
        assert_eq!(g.radicand(), Some(2));
        assert_eq!(g.id(), "sqrt(2)");
        let bad = Generator::declared(
            "s2",
            "sqrt(2)",
            parse_bound("1.5").unwrap(),
            parse_bound("1.6").unwrap(),
        );
        assert!(bad.is_err());
    }
}
