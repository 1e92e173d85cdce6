//! The normal-form descriptor of a symplectic matrix: block counts, rotation
//! angles, realization, splitting numbers and the derived counts.

mod decompose;

pub use decompose::{decompose, Certainty};

use rand::Rng;
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};
use crate::symplectic::{diamond_all, Angle, BasicForm, SympError, SymplecticMatrix};

#[derive(Debug, Clone, Error)]
pub enum NormalFormError {
    #[error("invalid descriptor: {0}")]
    Invalid(String),
    #[error("rationality undecidable numerically for angle {0}")]
    NumericAngle(String),
    #[error("unsupported spectral structure: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Symp(#[from] SympError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Block counts and angles of
/// `N₁(1,1)^{⋄p₋} ⋄ I_{2p₀} ⋄ N₁(1,-1)^{⋄p₊} ⋄ N₁(-1,1)^{⋄q₋} ⋄ -I_{2q₀} ⋄ N₁(-1,-1)^{⋄q₊}
///  ⋄ R(θ_1..θ_r) ⋄ N₂(α_1..α_{r₊}) ⋄ N₂(β_1..β_{r₀}) ⋄ M_k`.
/// `r`, `r₊` and `r₀` are the lengths of the three angle lists.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NormalFormDescriptor {
    pub p_minus: usize,
    pub p_zero: usize,
    pub p_plus: usize,
    pub q_minus: usize,
    pub q_zero: usize,
    pub q_plus: usize,
    pub k: usize,
    /// `M_k = D(-2) ⋄ D(2)^{⋄(k-1)}` when set, `D(2)^{⋄k}` otherwise.
    pub hyperbolic_sign: bool,
    pub theta_list: Vec<Angle>,
    /// Nontrivial `N₂` angles.
    pub alpha_list: Vec<Angle>,
    /// Trivial `N₂` angles.
    pub beta_list: Vec<Angle>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalCounts {
    pub r_tilde: usize,
    pub r_star_tilde: usize,
    pub r_zero_tilde: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Elliptic,
    Hyperbolic,
    IrrationallyElliptic,
    Mixed,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Elliptic => "elliptic",
            Stability::Hyperbolic => "hyperbolic",
            Stability::IrrationallyElliptic => "irrationally_elliptic",
            Stability::Mixed => "mixed",
        })
    }
}

/// Angle equality: exact when both sides are exact, otherwise within 1e-9 mod 2.
pub fn angles_equal(a: &Angle, b: &Angle) -> Result<bool, ScalarError> {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => {
            let d = x - y;
            let half = d.scale(&crate::scalar::Rational::new(1.into(), 2.into()));
            Ok(half.is_integer())
        }
        _ => {
            let d = (a.over_pi_f64() - b.over_pi_f64()).rem_euclid(2.0);
            Ok(d.min(2.0 - d) < 1e-9)
        }
    }
}

impl NormalFormDescriptor {
    pub fn r(&self) -> usize {
        self.theta_list.len()
    }

    pub fn r_star(&self) -> usize {
        self.alpha_list.len()
    }

    pub fn r_zero(&self) -> usize {
        self.beta_list.len()
    }

    /// Half the dimension.
    pub fn n(&self) -> usize {
        self.p_minus + self.p_zero + self.p_plus + self.q_minus + self.q_zero + self.q_plus + self.r() + self.k
            + 2 * (self.r_star() + self.r_zero())
    }

    pub fn validate(&self) -> Result<(), NormalFormError> {
        if self.n() == 0 {
            return Err(NormalFormError::Invalid("empty descriptor".into()));
        }
        if self.hyperbolic_sign && self.k == 0 {
            return Err(NormalFormError::Invalid("hyperbolic_sign set with k = 0".into()));
        }
        for (name, list) in [("theta_list", &self.theta_list), ("alpha_list", &self.alpha_list), ("beta_list", &self.beta_list)] {
            for (i, a) in list.iter().enumerate() {
                if !a.is_admissible()? {
                    return Err(NormalFormError::Invalid(format!("{name}[{i}] = {a} is not in (0,π)∪(π,2π)")));
                }
            }
        }
        Ok(())
    }

    pub fn validate_for(&self, n: usize) -> Result<(), NormalFormError> {
        self.validate()?;
        if self.n() != n {
            return Err(NormalFormError::Invalid(format!("block dimensions sum to 2·{} but 2n = {}", self.n(), 2 * n)));
        }
        Ok(())
    }

    /// The basic forms in the order of the decomposition display.
    pub fn blocks(&self) -> Vec<BasicForm> {
        let mut out = Vec::new();
        let rep = |out: &mut Vec<BasicForm>, f: BasicForm, c: usize| out.extend(std::iter::repeat_n(f, c));
        rep(&mut out, BasicForm::N1(1, 1), self.p_minus);
        rep(&mut out, BasicForm::N1(1, 0), self.p_zero);
        rep(&mut out, BasicForm::N1(1, -1), self.p_plus);
        rep(&mut out, BasicForm::N1(-1, 1), self.q_minus);
        rep(&mut out, BasicForm::N1(-1, 0), self.q_zero);
        rep(&mut out, BasicForm::N1(-1, -1), self.q_plus);
        out.extend(self.theta_list.iter().cloned().map(BasicForm::R));
        out.extend(self.alpha_list.iter().map(|a| BasicForm::N2 { angle: a.clone(), nontrivial: true }));
        out.extend(self.beta_list.iter().map(|a| BasicForm::N2 { angle: a.clone(), nontrivial: false }));
        if self.k > 0 {
            out.push(BasicForm::D(if self.hyperbolic_sign { -2 } else { 2 }));
            rep(&mut out, BasicForm::D(2), self.k - 1);
        }
        out
    }

    /// Direct sum: counts add, lists concatenate, hyperbolic signs multiply.
    pub fn concat(&self, o: &Self) -> Self {
        let cat = |a: &Vec<Angle>, b: &Vec<Angle>| a.iter().chain(b).cloned().collect();
        NormalFormDescriptor {
            p_minus: self.p_minus + o.p_minus,
            p_zero: self.p_zero + o.p_zero,
            p_plus: self.p_plus + o.p_plus,
            q_minus: self.q_minus + o.q_minus,
            q_zero: self.q_zero + o.q_zero,
            q_plus: self.q_plus + o.q_plus,
            k: self.k + o.k,
            hyperbolic_sign: self.hyperbolic_sign ^ o.hyperbolic_sign,
            theta_list: cat(&self.theta_list, &o.theta_list),
            alpha_list: cat(&self.alpha_list, &o.alpha_list),
            beta_list: cat(&self.beta_list, &o.beta_list),
        }
    }

    /// Angle lists sorted by value, for comparisons up to block reordering.
    pub fn canonical(&self) -> Self {
        let sort = |l: &Vec<Angle>| {
            let mut l = l.clone();
            l.sort_by(|a, b| a.over_pi_f64().total_cmp(&b.over_pi_f64()));
            l
        };
        NormalFormDescriptor {
            theta_list: sort(&self.theta_list),
            alpha_list: sort(&self.alpha_list),
            beta_list: sort(&self.beta_list),
            ..self.clone()
        }
    }

    /// Elliptic height `2n - 2k`.
    pub fn elliptic_height(&self) -> usize {
        2 * (self.n() - self.k)
    }

    /// `ν₁ = p₋ + 2p₀ + p₊`.
    pub fn nullity_one(&self) -> usize {
        self.p_minus + 2 * self.p_zero + self.p_plus
    }

    pub fn all_angles(&self) -> impl Iterator<Item = &Angle> {
        self.theta_list.iter().chain(&self.alpha_list).chain(&self.beta_list)
    }

    pub fn is_exact(&self) -> bool {
        self.all_angles().all(Angle::is_exact)
    }

    /// `S⁻` over the spectrum angles in `(0, 2π)`, equal angles merged.
    pub fn minus_spectrum(&self) -> Result<Vec<(Angle, usize)>, ScalarError> {
        let mut out: Vec<(Angle, usize)> = Vec::new();
        let mut push = |a: Angle, c: usize| -> Result<(), ScalarError> {
            if c == 0 {
                return Ok(());
            }
            for (b, k) in out.iter_mut() {
                if angles_equal(b, &a)? {
                    *k += c;
                    return Ok(());
                }
            }
            out.push((a, c));
            Ok(())
        };
        push(Angle::turns_pi(1, 1), self.q_zero + self.q_plus)?;
        for t in &self.theta_list {
            push(t.clone(), 1)?;
        }
        for a in &self.alpha_list {
            push(a.clone(), 1)?;
            push(a.conjugate(), 1)?;
        }
        Ok(out)
    }
}

/// ⋄-product of the blocks; exact unless some rotation needs floating point.
pub fn realize(d: &NormalFormDescriptor) -> Result<SymplecticMatrix, NormalFormError> {
    d.validate()?;
    let mats = d.blocks().iter().map(BasicForm::to_matrix).collect::<Result<Vec<_>, _>>()?;
    let m = diamond_all(&mats)?;
    if m.n() != d.n() {
        return Err(NormalFormError::Invalid("dimension bookkeeping violated".into()));
    }
    Ok(m)
}

/// `(S⁺, S⁻)` at `e^{iθ}` from the splitting table and additivity.
pub fn splitting_numbers(d: &NormalFormDescriptor, angle: &Angle) -> Result<(usize, usize), ScalarError> {
    let angle = angle.reduced()?;
    let (mut sp, mut sm) = (0, 0);
    if angles_equal(&angle, &Angle::turns_pi(0, 1))? {
        // N₁(1,1) and I₂ give (1,1); N₁(1,-1) gives (0,0)
        sp += d.p_minus + d.p_zero;
        sm += d.p_minus + d.p_zero;
    }
    if angles_equal(&angle, &Angle::turns_pi(1, 1))? {
        // N₁(-1,-1) and -I₂ give (1,1); N₁(-1,1) gives (0,0)
        sp += d.q_zero + d.q_plus;
        sm += d.q_zero + d.q_plus;
    }
    for t in &d.theta_list {
        if angles_equal(&angle, t)? {
            sm += 1;
        } else if angles_equal(&angle, &t.conjugate())? {
            sp += 1;
        }
    }
    for a in &d.alpha_list {
        if angles_equal(&angle, a)? || angles_equal(&angle, &a.conjugate())? {
            sp += 1;
            sm += 1;
        }
    }
    Ok((sp, sm))
}

/// `S⁺_M(1) = p₋ + p₀`.
pub fn s_plus_one(d: &NormalFormDescriptor) -> usize {
    d.p_minus + d.p_zero
}

/// `C(M) = q₀ + q₊ + r + 2r₊`.
pub fn capital_c(d: &NormalFormDescriptor) -> usize {
    d.q_zero + d.q_plus + d.r() + 2 * d.r_star()
}

/// `μ = Σ_{θ∈(0,2π)} S⁻(e^{iθ})`, which coincides with `C(M)`.
pub fn mu(d: &NormalFormDescriptor) -> usize {
    capital_c(d)
}

/// `Σ S⁻` over the spectrum, computed from the table; must equal `C(M)`.
pub fn c_from_table(d: &NormalFormDescriptor) -> Result<usize, ScalarError> {
    let mut total = 0;
    for (a, _) in d.minus_spectrum()? {
        total += splitting_numbers(d, &a)?.1;
    }
    Ok(total)
}

fn count_rational(list: &[Angle]) -> Result<usize, NormalFormError> {
    let mut c = 0;
    for a in list {
        match a {
            Angle::Exact(s) => c += usize::from(s.is_rational()),
            Angle::Numeric(_) => return Err(NormalFormError::NumericAngle(a.to_string())),
        }
    }
    Ok(c)
}

pub fn rational_counts(d: &NormalFormDescriptor) -> Result<RationalCounts, NormalFormError> {
    Ok(RationalCounts {
        r_tilde: count_rational(&d.theta_list)?,
        r_star_tilde: count_rational(&d.alpha_list)?,
        r_zero_tilde: count_rational(&d.beta_list)?,
    })
}

pub fn classify_stability(d: &NormalFormDescriptor, n: usize) -> Result<Stability, NormalFormError> {
    d.validate_for(n)?;
    let counts = rational_counts(d)?;
    let only_shear_and_rotations = d.p_minus == 1
        && d.p_zero + d.p_plus + d.q_minus + d.q_zero + d.q_plus + d.k == 0
        && d.r_star() + d.r_zero() == 0
        && d.r() == n - 1;
    if only_shear_and_rotations && counts.r_tilde == 0 {
        return Ok(Stability::IrrationallyElliptic);
    }
    if d.k == 0 {
        return Ok(Stability::Elliptic);
    }
    if d.elliptic_height() == 2 && d.p_minus == 1 {
        return Ok(Stability::Hyperbolic);
    }
    Ok(Stability::Mixed)
}

/// Random descriptor with `1 ≤ n ≤ max_n`; angles are multiples of `π/12`
/// (so the realization stays exact) unless `irrational` allows `√2`/`√3` angles.
pub fn random_descriptor<R: Rng>(rng: &mut R, max_n: usize, irrational: bool) -> NormalFormDescriptor {
    let n = rng.gen_range(1..=max_n);
    let mut d = NormalFormDescriptor::default();
    let mut left = n;
    let angle = |rng: &mut R| -> Angle {
        if irrational && rng.gen_bool(0.3) {
            let g = if rng.gen_bool(0.5) { Scalar::sqrt(2) } else { Scalar::sqrt(3) };
            let base = g.scale_int(rng.gen_range(1..4));
            Angle::Exact(base).reduced().expect("irrational reduction")
        } else {
            let mut k = rng.gen_range(1..24);
            if k == 12 {
                k = 1;
            }
            Angle::turns_pi(k, 12)
        }
    };
    while left > 0 {
        let kind = rng.gen_range(0..10);
        if kind == 9 && left >= 2 {
            let a = angle(rng);
            if rng.gen_bool(0.5) {
                d.alpha_list.push(a);
            } else {
                d.beta_list.push(a);
            }
            left -= 2;
            continue;
        }
        match kind {
            0 => d.p_minus += 1,
            1 => d.p_zero += 1,
            2 => d.p_plus += 1,
            3 => d.q_minus += 1,
            4 => d.q_zero += 1,
            5 => d.q_plus += 1,
            6 => d.k += 1,
            _ => d.theta_list.push(angle(rng)),
        }
        left -= 1;
    }
    if d.k > 0 {
        d.hyperbolic_sign = rng.gen_bool(0.5);
    }
    d
}

#[cfg(test)]
mod tests;
