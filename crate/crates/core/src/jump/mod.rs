//! Common index jump: the scan vector `v`, a sign pattern `χ(a)` from the
//! orbit-closure tangent space, the search for `(N, m_1, …, m_q)` and
//! certificate verification.

mod certificate;
mod search;
#[cfg(test)]
mod tests;

pub use certificate::{
    build_certificate, compute_delta, compute_i, rho_and_injection, verify_certificate, Check, Injection,
    InjectionRow, JumpCertificate,
};
pub use search::search_n;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::iteration::{mean_index, IterError, PathRecord};
use crate::normal_form::mu;
use crate::scalar::{relation_lattice, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, Error)]
pub enum JumpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("constraint unsatisfiable: coordinate {index} of v is rational, so χ must be 0 there")]
    ConstraintUnsatisfiable { index: usize },
    #[error("no admissible direction in the tangent space (dimension {0}) meets the constraints")]
    NoDirection(usize),
    #[error("no hit below bound {bound}: best near-miss N = {best_n} at deviation {best_dev:.3e} ({rejected} window hits failed verification)")]
    NoHit { bound: u64, best_n: u64, best_dev: f64, rejected: usize },
    #[error("identity failure: {0}")]
    Identity(String),
    #[error("empty candidate row at slot s = {0}")]
    EmptyRow(usize),
    #[error(transparent)]
    Iter(#[from] IterError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug)]
pub struct JumpProblem {
    pub records: Vec<PathRecord>,
    pub delta: Rational,
    pub epsilon: Rational,
    pub big_m: u64,
    pub m0: u64,
    pub n_bound: u64,
}

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

/// Rational angles `θ/π` of a record, plus `1` when eigenvalue `-1` occurs.
fn rational_turns(rec: &PathRecord) -> Vec<Rational> {
    let d = &rec.descriptor;
    let mut out: Vec<Rational> = d
        .all_angles()
        .filter_map(|a| a.exact().and_then(|s| s.as_rational().cloned()))
        .collect();
    if d.q_minus + d.q_zero + d.q_plus > 0 {
        out.push(rat(1, 1));
    }
    out
}

/// Least `M` with `M·θ/π` an even integer for every rational `θ/π` in any record.
pub fn default_m(records: &[PathRecord]) -> u64 {
    let mut m = BigInt::from(1);
    for rec in records {
        for t in rational_turns(rec) {
            let need = if t.numer().is_odd() { t.denom() * 2 } else { t.denom().clone() };
            m = m.lcm(&need);
        }
    }
    m.to_u64().expect("M fits in u64")
}

/// `lcm(M, numerators of M·î_k)` over rational `î_k`, so that `M0 | N` makes
/// every `N/(M·î_k)` integral.
pub fn default_m0(records: &[PathRecord], big_m: u64) -> Result<u64, JumpError> {
    let mut m0 = BigInt::from(big_m);
    for rec in records {
        if let Some(r) = mean_index(rec)?.as_rational() {
            let x = r * Rational::from_integer(big_m.into());
            m0 = m0.lcm(&x.numer().abs());
        }
    }
    m0.to_u64().ok_or_else(|| JumpError::InvalidProblem("M0 overflows u64".into()))
}

/// `min(δ, 1/3) / 2`.
pub fn default_epsilon(delta: &Rational) -> Rational {
    delta.clone().min(rat(1, 3)) / rat(2, 1)
}

impl JumpProblem {
    pub fn with_defaults(records: Vec<PathRecord>, delta: Rational, n_bound: u64) -> Result<Self, JumpError> {
        let big_m = default_m(&records);
        let m0 = default_m0(&records, big_m)?;
        let epsilon = default_epsilon(&delta);
        let p = JumpProblem { records, delta, epsilon, big_m, m0, n_bound };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), JumpError> {
        let bad = |s: String| Err(JumpError::InvalidProblem(s));
        if self.records.is_empty() {
            return bad("no records".into());
        }
        if !self.delta.is_positive() || self.delta >= rat(1, 2) {
            return bad(format!("delta = {} must lie in (0, 1/2)", self.delta));
        }
        if !self.epsilon.is_positive() {
            return bad("epsilon must be positive".into());
        }
        if self.big_m == 0 || self.m0 == 0 || self.n_bound == 0 {
            return bad("M, M0 and N_bound must be positive".into());
        }
        let max_mu = self.records.iter().map(|r| mu(&r.descriptor)).max().unwrap_or(0);
        if &self.delta * Rational::from_integer(max_mu.into()) >= rat(1, 2) {
            return bad(format!("delta · max μ_k = {} · {max_mu} must be < 1/2", self.delta));
        }
        for rec in &self.records {
            rec.validate()?;
            if !rec.descriptor.is_exact() {
                return bad(format!("{}: angles must be exact", rec.label));
            }
            if mean_index(rec)?.signum()?.is_le() {
                return bad(format!("{}: mean index must be positive", rec.label));
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.records.len()
    }

    pub fn mean_indices(&self) -> Result<Vec<Scalar>, JumpError> {
        self.records.iter().map(|r| Ok(mean_index(r)?)).collect()
    }
}

/// `v ∈ ℝ^h` together with the provenance of each coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpVector {
    pub v: Vec<Scalar>,
    /// Owning path, and for the angle coordinates the angle `θ/π`.
    pub coords: Vec<(usize, Option<Scalar>)>,
}

impl JumpVector {
    pub fn h(&self) -> usize {
        self.v.len()
    }

    /// Coordinates actually scanned: the first `q` entries divided by `M`, so
    /// that they read `N/(M·î_k)` as in the formula for `m_k`. A positive
    /// diagonal rescaling maps the tangent space onto itself coordinatewise,
    /// so `χ(a)` carries over unchanged.
    pub fn scan(&self, big_m: u64) -> Vec<Scalar> {
        let inv_m = rat(1, big_m as i64);
        self.v
            .iter()
            .zip(&self.coords)
            .map(|(x, (_, ang))| if ang.is_none() { x.scale(&inv_m) } else { x.clone() })
            .collect()
    }
}

/// `v = (1/î_1, …, 1/î_q, θ/(π·î_k) …)`, each angle repeated `S⁻` times.
pub fn build_v(p: &JumpProblem) -> Result<JumpVector, JumpError> {
    let means = p.mean_indices()?;
    let mut v = Vec::new();
    let mut coords = Vec::new();
    let mut inv = Vec::new();
    for (k, d) in means.iter().enumerate() {
        if d.is_zero() {
            return Err(JumpError::InvalidProblem(format!("{}: zero mean index", p.records[k].label)));
        }
        let i = d.try_inv()?;
        v.push(i.clone());
        coords.push((k, None));
        inv.push(i);
    }
    for (k, rec) in p.records.iter().enumerate() {
        for (a, sm) in rec.descriptor.minus_spectrum()? {
            let t = a.exact().expect("validated exact").clone();
            let x = t.try_mul(&inv[k])?;
            for _ in 0..sm {
                v.push(x.clone());
                coords.push((k, Some(t.clone())));
            }
        }
    }
    Ok(JumpVector { v, coords })
}

pub fn psi(x: &Rational) -> u8 {
    u8::from(x.is_negative())
}

/// All vectors of `{-l..=l}^d` with max-norm exactly `l`, in odometer order.
fn shell(d: usize, l: i64) -> impl Iterator<Item = Vec<i64>> {
    let total = (2 * l + 1).checked_pow(d as u32).unwrap_or(u64::MAX as i64) as u64;
    (0..total).filter_map(move |mut code| {
        let mut c = vec![0i64; d];
        for slot in c.iter_mut() {
            *slot = (code % (2 * l as u64 + 1)) as i64 - l;
            code /= 2 * l as u64 + 1;
        }
        c.iter().any(|x| x.abs() == l).then_some(c)
    })
}

/// Picks `a` in the tangent space of the orbit closure of `{Nv}` with
/// `a_k ≠ 0` wherever `v_k` is irrational, and returns `(a, χ(a))`.
/// Without constraints the sign is fixed so the first irrational coordinate is
/// negative; with constraints both `a` and `-a` are tried.
pub fn choose_a(
    jv: &JumpVector,
    constraints: &BTreeMap<usize, u8>,
) -> Result<(Vec<Rational>, Vec<u8>), JumpError> {
    let h = jv.h();
    let irr: Vec<usize> = (0..h).filter(|&k| !jv.v[k].is_rational()).collect();
    for (&k, &val) in constraints {
        if k >= h || val > 1 {
            return Err(JumpError::InvalidProblem(format!("constraint χ[{k}] = {val} out of range")));
        }
        if jv.v[k].is_rational() && val == 1 {
            return Err(JumpError::ConstraintUnsatisfiable { index: k });
        }
    }
    if irr.is_empty() {
        return Ok((vec![Rational::zero(); h], vec![0; h]));
    }
    let basis = relation_lattice(&jv.v).tangent_space();
    let dim = basis.len();
    let meets = |a: &[Rational]| constraints.iter().all(|(&k, &val)| psi(&a[k]) == val);
    for l in 1..=3 {
        for c in shell(dim, l) {
            let mut a = vec![Rational::zero(); h];
            for (ci, b) in c.iter().zip(&basis) {
                if *ci != 0 {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y * Rational::from_integer((*ci).into());
                    }
                }
            }
            if irr.iter().any(|&k| a[k].is_zero()) {
                continue;
            }
            if a[irr[0]].is_positive() {
                a.iter_mut().for_each(|x| *x = -x.clone());
            }
            let neg: Vec<Rational> = a.iter().map(|x| -x.clone()).collect();
            for cand in [a, neg] {
                if meets(&cand) {
                    let chi = cand.iter().map(psi).collect();
                    return Ok((cand, chi));
                }
            }
        }
    }
    Err(JumpError::NoDirection(dim))
}
