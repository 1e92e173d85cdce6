//! Closed-form index and nullity iteration for a closed characteristic.

use thiserror::Error;

use crate::normal_form::{capital_c, realize, s_plus_one, NormalFormDescriptor, NormalFormError};
use crate::scalar::{Rational, Scalar, ScalarError};
use crate::symplectic::{Angle, SympError};

#[derive(Debug, Clone, Error)]
pub enum IterError {
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("invalid record {label}: {reason}")]
    InvalidRecord { label: String, reason: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    Symp(#[from] SympError),
}

/// One closed characteristic: `i(γ,1)`, `ν(γ,1)`, the monodromy descriptor
/// and the minimal period.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub label: String,
    pub n: usize,
    pub i1: i64,
    pub nu1: usize,
    pub descriptor: NormalFormDescriptor,
    /// Minimal period in units of π.
    pub tau: Scalar,
}

impl PathRecord {
    pub fn new(label: impl Into<String>, n: usize, i1: i64, descriptor: NormalFormDescriptor, tau: Scalar) -> Result<Self, IterError> {
        let nu1 = descriptor.nullity_one();
        let rec = PathRecord { label: label.into(), n, i1, nu1, descriptor, tau };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<(), IterError> {
        let bad = |reason: String| IterError::InvalidRecord { label: self.label.clone(), reason };
        self.descriptor.validate_for(self.n).map_err(|e| bad(e.to_string()))?;
        if self.nu1 != self.descriptor.nullity_one() {
            return Err(bad(format!(
                "nu1 = {} but the descriptor has ν₁ = {}",
                self.nu1,
                self.descriptor.nullity_one()
            )));
        }
        if self.tau.signum()?.is_le() {
            return Err(bad("tau must be positive".into()));
        }
        Ok(())
    }

    pub fn mean_index(&self) -> Result<Scalar, IterError> {
        mean_index(self)
    }
}

/// `x/2` for an angle stored as `θ/π`: the argument `θ/2π`.
fn half_turns(a: &Angle, m: i64) -> Result<Scalar, IterError> {
    match a {
        Angle::Exact(s) => Ok(s.scale(&Rational::new(m.into(), 2.into()))),
        Angle::Numeric(_) => Err(NormalFormError::NumericAngle(a.to_string()).into()),
    }
}

fn e_of(x: &Scalar) -> Result<i64, IterError> {
    Ok(x.ceil_i64()?)
}

fn phi_of(x: &Scalar) -> i64 {
    x.phi() as i64
}

/// `i(γ, m)` by the rewritten formula, cross-checked against the abstract
/// splitting-number formula.
pub fn index_iterate(rec: &PathRecord, m: u64) -> Result<i64, IterError> {
    let rewritten = index_rewritten(rec, m)?;
    let abstract_form = index_abstract(rec, m)?;
    if rewritten != abstract_form {
        return Err(IterError::Inconsistent(format!(
            "{}: i(γ,{m}) rewritten {rewritten} != abstract {abstract_form}",
            rec.label
        )));
    }
    Ok(rewritten)
}

fn even(m: i64) -> i64 {
    i64::from(m % 2 == 0)
}

pub fn index_rewritten(rec: &PathRecord, m: u64) -> Result<i64, IterError> {
    let d = &rec.descriptor;
    let m = m as i64;
    let (pm, p0, r) = (d.p_minus as i64, d.p_zero as i64, d.r() as i64);
    let mut val = m * (rec.i1 + pm + p0 - r) - r - pm - p0 - even(m) * (d.q_zero + d.q_plus) as i64;
    for t in &d.theta_list {
        val += 2 * e_of(&half_turns(t, m)?)?;
    }
    let mut phis = 0;
    for a in &d.alpha_list {
        phis += phi_of(&half_turns(a, m)?);
    }
    Ok(val + 2 * (phis - d.r_star() as i64))
}

pub fn index_abstract(rec: &PathRecord, m: u64) -> Result<i64, IterError> {
    let d = &rec.descriptor;
    let m = m as i64;
    let (sp, c) = (s_plus_one(d) as i64, capital_c(d) as i64);
    let mut sum = 0;
    for (a, sm) in d.minus_spectrum()? {
        sum += e_of(&half_turns(&a, m)?)? * sm as i64;
    }
    Ok(m * (rec.i1 + sp - c) + 2 * sum - (sp + c))
}

/// `ν(γ, m)`.
pub fn nullity_iterate(rec: &PathRecord, m: u64) -> Result<usize, IterError> {
    let d = &rec.descriptor;
    let mi = m as i64;
    let mut val = rec.nu1 as i64
        + even(mi) * (d.q_minus + 2 * d.q_zero + d.q_plus) as i64
        + 2 * (d.r() + d.r_star() + d.r_zero()) as i64;
    for a in d.all_angles() {
        val -= 2 * phi_of(&half_turns(a, mi)?);
    }
    usize::try_from(val).map_err(|_| IterError::Inconsistent(format!("negative nullity {val}")))
}

/// `ν(γ, m)` checked against `dim ker(realize(d)^m - I)`.
pub fn nullity_iterate_checked(rec: &PathRecord, m: u64) -> Result<usize, IterError> {
    let formula = nullity_iterate(rec, m)?;
    let oracle = nullity_oracle(&rec.descriptor, m)?;
    if formula != oracle {
        return Err(IterError::Inconsistent(format!(
            "{}: ν(γ,{m}) formula {formula} != matrix-power oracle {oracle}",
            rec.label
        )));
    }
    Ok(formula)
}

pub fn nullity_oracle(d: &NormalFormDescriptor, m: u64) -> Result<usize, IterError> {
    let mat = realize(d)?.pow(m)?;
    Ok(mat.nullity_omega(&Angle::turns_pi(0, 1))?)
}

/// `dim ker(realize(d)^m - I)` for `m = 1..=m_max`, by successive products.
pub fn nullity_oracle_range(d: &NormalFormDescriptor, m_max: u64) -> Result<Vec<usize>, IterError> {
    let base = realize(d)?;
    let one = Angle::turns_pi(0, 1);
    let mut acc = base.clone();
    let mut out = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        out.push(acc.nullity_omega(&one)?);
        if m < m_max {
            acc = acc.mul(&base)?;
        }
    }
    Ok(out)
}

/// `î = i(γ,1) + p₋ + p₀ - r + Σ θ_l/π`.
pub fn mean_index(rec: &PathRecord) -> Result<Scalar, IterError> {
    let d = &rec.descriptor;
    let mut v = Scalar::from_integer(rec.i1 + (d.p_minus + d.p_zero) as i64 - d.r() as i64);
    for t in &d.theta_list {
        match t {
            Angle::Exact(s) => v = &v + s,
            Angle::Numeric(_) => return Err(NormalFormError::NumericAngle(t.to_string()).into()),
        }
    }
    Ok(v)
}

/// Bound on `|i(γ,m) - m î|`: `3r + p₋ + p₀ + q₀ + q₊ + 2r₊`.
pub fn mean_deviation_bound(d: &NormalFormDescriptor) -> usize {
    3 * d.r() + d.p_minus + d.p_zero + d.q_zero + d.q_plus + 2 * d.r_star()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexReport {
    pub pass: bool,
    pub reasons: Vec<String>,
}

/// Shape `N₁(1,1) ⋄ M` and `î > 2`.
pub fn check_convex_constraints(rec: &PathRecord) -> Result<ConvexReport, IterError> {
    let mut reasons = Vec::new();
    if rec.descriptor.p_minus < 1 {
        reasons.push("missing N₁(1,1) block (p₋ = 0)".to_string());
    }
    let mi = mean_index(rec)?;
    if mi.cmp_rational(&Rational::from_integer(2.into()))?.is_le() {
        reasons.push(format!("mean index {mi} ≤ 2"));
    }
    Ok(ConvexReport { pass: reasons.is_empty(), reasons })
}
