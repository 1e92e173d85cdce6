use num_traits::{One, Zero};

use super::{build_v, rat, rational_turns, JumpError, JumpProblem, JumpVector};
use crate::iteration::{index_iterate, mean_index, nullity_iterate, PathRecord};
use crate::normal_form::{capital_c, s_plus_one};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub path: Option<usize>,
    pub pass: bool,
    pub detail: String,
    /// Core checks decide whether a certificate is verified; the rest are
    /// the ordering lemmas and informational notes.
    pub core: bool,
}

impl Check {
    fn new(name: &str, path: Option<usize>, pass: bool, detail: String, core: bool) -> Self {
        Check { name: name.to_string(), path, pass, detail, core }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpCertificate {
    pub n: u64,
    pub m: Vec<u64>,
    pub chi: Vec<u8>,
    pub a: Vec<Rational>,
    pub delta_k: Vec<i64>,
    pub i_k: Vec<i64>,
    pub big_m: u64,
    pub m0: u64,
    pub checks: Vec<Check>,
}

impl JumpCertificate {
    pub fn verified(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().filter(|c| c.core).all(|c| c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `Δ = Σ S⁻(e^{iθ})` over spectrum angles with `0 < {mθ/π} < δ`.
pub fn compute_delta(rec: &PathRecord, m: u64, delta: &Rational) -> Result<i64, JumpError> {
    let mut total = 0;
    for (a, sm) in rec.descriptor.minus_spectrum()? {
        let t = a.exact().ok_or_else(|| JumpError::InvalidProblem(format!("{}: numeric angle", rec.label)))?;
        if t.scale_int(m as i64).frac_in_open(delta)? {
            total += sm as i64;
        }
    }
    Ok(total)
}

/// `I = m(i(γ,1) + S⁺ - C) + Σ E(mθ/π) S⁻`, checked against
/// `2I = i(γ, 2m) + S⁺ + C`.
pub fn compute_i(rec: &PathRecord, m: u64) -> Result<i64, JumpError> {
    let d = &rec.descriptor;
    let (sp, c) = (s_plus_one(d) as i64, capital_c(d) as i64);
    let mut val = m as i64 * (rec.i1 + sp - c);
    for (a, sm) in d.minus_spectrum()? {
        let t = a.exact().ok_or_else(|| JumpError::InvalidProblem(format!("{}: numeric angle", rec.label)))?;
        val += t.scale_int(m as i64).ceil_i64()? * sm as i64;
    }
    let twice = index_iterate(rec, 2 * m)? + sp + c;
    if 2 * val != twice {
        return Err(JumpError::Identity(format!(
            "{}: 2·I = {} but i(γ,{}) + S⁺ + C = {twice}",
            rec.label,
            2 * val,
            2 * m
        )));
    }
    Ok(val)
}

/// Same sum with `î` in place of `i(γ,1)`, as the jump theorem is sometimes
/// stated; kept only to report the discrepancy.
fn i_with_mean(rec: &PathRecord, m: u64) -> Result<Scalar, JumpError> {
    let d = &rec.descriptor;
    let (sp, c) = (s_plus_one(d) as i64, capital_c(d) as i64);
    let mut val = (&mean_index(rec)? + &Scalar::from_integer(sp - c)).scale_int(m as i64);
    for (a, sm) in d.minus_spectrum()? {
        let t = a.exact().expect("exact angle");
        val = &val + &Scalar::from_integer(t.scale_int(m as i64).ceil_i64()? * sm as i64);
    }
    Ok(val)
}

/// `⌊N/(M·î)⌋` as an exact scalar.
fn window_quotient(n: u64, big_m: u64, mean: &Scalar) -> Result<Scalar, JumpError> {
    Ok(mean.try_inv()?.scale(&rat(n as i64, big_m as i64)))
}

fn m_of(n: u64, big_m: u64, mean: &Scalar, chi: u8) -> Result<u64, JumpError> {
    let fl = window_quotient(n, big_m, mean)?.floor_i64()?;
    Ok(((fl + chi as i64) * big_m as i64) as u64)
}

/// Fills in `m_k`, `Δ_k`, `I_k` for a scan hit and runs the verifier.
pub fn build_certificate(
    p: &JumpProblem,
    jv: &JumpVector,
    chi: &[u8],
    a: &[Rational],
    n: u64,
) -> Result<JumpCertificate, JumpError> {
    let means = p.mean_indices()?;
    let mut m = Vec::new();
    let mut delta_k = Vec::new();
    let mut i_k = Vec::new();
    for (k, rec) in p.records.iter().enumerate() {
        let mk = m_of(n, p.big_m, &means[k], chi[k])?;
        m.push(mk);
        if mk == 0 {
            delta_k.push(0);
            i_k.push(0);
            continue;
        }
        delta_k.push(compute_delta(rec, mk, &p.delta)?);
        i_k.push(compute_i(rec, mk)?);
    }
    let mut cert = JumpCertificate {
        n,
        m,
        chi: chi.to_vec(),
        a: a.to_vec(),
        delta_k,
        i_k,
        big_m: p.big_m,
        m0: p.m0,
        checks: Vec::new(),
    };
    cert.checks = verify_with(&cert, p, jv)?;
    Ok(cert)
}

pub fn verify_certificate(cert: &JumpCertificate, p: &JumpProblem) -> Result<Vec<Check>, JumpError> {
    verify_with(cert, p, &build_v(p)?)
}

fn verify_with(cert: &JumpCertificate, p: &JumpProblem, jv: &JumpVector) -> Result<Vec<Check>, JumpError> {
    let mut out = Vec::new();
    let n = cert.n;
    let q = p.q();
    if cert.m.len() != q || cert.chi.len() != jv.h() || cert.delta_k.len() != q || cert.i_k.len() != q {
        out.push(Check::new("shape", None, false, "field lengths disagree with the problem".into(), true));
        return Ok(out);
    }
    let means = p.mean_indices()?;

    let eps = &p.epsilon;
    let mut window_ok = true;
    let mut worst = String::new();
    for (k, x) in jv.scan(p.big_m).iter().enumerate() {
        let f = x.scale_int(n as i64).frac()?;
        let ok = if cert.chi[k] == 0 {
            f.cmp_rational(eps)?.is_lt()
        } else {
            f.cmp_rational(&(Rational::one() - eps))?.is_gt()
        };
        if !ok && worst.is_empty() {
            worst = format!("coordinate {k}: fractional part ≈ {:.6} vs χ = {}", f.to_f64(), cert.chi[k]);
        }
        window_ok &= ok;
    }
    out.push(Check::new("scan_window", None, window_ok, worst, true));
    out.push(Check::new("m0_divides_n", None, n % p.m0 == 0, format!("N = {n}, M0 = {}", p.m0), true));

    for (k, rec) in p.records.iter().enumerate() {
        let mk = cert.m[k];
        let want = m_of(n, p.big_m, &means[k], cert.chi[k])?;
        out.push(Check::new(
            "iterate_formula",
            Some(k),
            mk == want && mk >= 1,
            format!("m = {mk}, (⌊N/(M·î)⌋ + χ)·M = {want}"),
            true,
        ));
        if mk == 0 {
            continue;
        }
        let dk = compute_delta(rec, mk, &p.delta)?;
        let ik = compute_i(rec, mk)?;
        out.push(Check::new(
            "stored_values",
            Some(k),
            dk == cert.delta_k[k] && ik == cert.i_k[k],
            format!("recomputed Δ = {dk}, I = {ik}"),
            true,
        ));
        out.push(Check::new(
            "jump_identity",
            Some(k),
            ik == n as i64 + dk,
            format!("I = {ik}, N + Δ = {}", n as i64 + dk),
            true,
        ));
        let alt = i_with_mean(rec, mk)?;
        out.push(Check::new(
            "mean_index_variant",
            Some(k),
            true,
            format!("with î in place of i(γ,1) the sum is {alt}, against N + Δ = {}", n as i64 + dk),
            false,
        ));

        let mut near = true;
        let mut detail = String::new();
        for (a, _) in rec.descriptor.minus_spectrum()? {
            let f = a.exact().expect("exact angle").scale_int(mk as i64).frac()?;
            let ok = f.cmp_rational(&p.delta)?.is_lt() || (&Scalar::one() - &f).cmp_rational(&p.delta)?.is_lt();
            if !ok {
                near = false;
                detail = format!("θ/π = {a}: {{mθ/π}} ≈ {:.6}", f.to_f64());
            }
        }
        out.push(Check::new("near_integer_iterates", Some(k), near, detail, true));

        let bad: Vec<String> = rational_turns(rec)
            .into_iter()
            .filter(|t| !(t * Rational::from_integer(mk.into())).is_integer())
            .map(|t| t.to_string())
            .collect();
        out.push(Check::new("rational_angle_integrality", Some(k), bad.is_empty(), bad.join(", "), true));

        if means[k].is_rational() {
            let w = window_quotient(n, p.big_m, &means[k])?;
            let ok = w.is_integer() && cert.chi[k] == 0;
            out.push(Check::new(
                "rational_mean_divisibility",
                Some(k),
                ok,
                format!("N/(M·î) = {w}, χ = {}", cert.chi[k]),
                true,
            ));
        }
    }
    ordering_checks(cert, &means, &mut out)?;
    Ok(out)
}

/// Pairwise ordering statements for paths sorted by decreasing `m_k·î_k`.
fn ordering_checks(cert: &JumpCertificate, means: &[Scalar], out: &mut Vec<Check>) -> Result<(), JumpError> {
    let q = means.len();
    let x: Vec<Scalar> = (0..q).map(|k| means[k].scale_int(cert.m[k] as i64)).collect();
    let mut order: Vec<usize> = (0..q).collect();
    let mut err = None;
    order.sort_by(|&a, &b| {
        x[b].cmp_exact(&x[a]).unwrap_or_else(|e| {
            err = Some(e);
            std::cmp::Ordering::Equal
        })
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    let n = Scalar::from_integer(cert.n as i64);
    for (i, &k1) in order.iter().enumerate() {
        for &k2 in &order[i + 1..] {
            let upper_ok = x[k2].cmp_exact(&x[k1])?.is_lt() && !means[k1].is_rational() && cert.chi[k1] == 1;
            let pair = Some(k2);
            if means[k2].is_rational() {
                let ok = cert.chi[k2] == 0 && x[k2] == n && upper_ok;
                out.push(Check::new(
                    "ordering_rational_lower",
                    pair,
                    ok,
                    format!("paths {k1} > {k2}: χ = ({}, {}), m·î = ({}, {})", cert.chi[k1], cert.chi[k2], x[k1], x[k2]),
                    false,
                ));
            }
            if cert.chi[k2] == 1 {
                let ok = !means[k2].is_rational() && n.cmp_exact(&x[k2])?.is_lt() && upper_ok;
                out.push(Check::new(
                    "ordering_chi_one",
                    pair,
                    ok,
                    format!("paths {k1} > {k2}: N < m·î chain ({} < {} < {})", cert.n, x[k2], x[k1]),
                    false,
                ));
            }
            out.push(Check::new(
                "chi_monotone",
                pair,
                cert.chi[k2] <= cert.chi[k1],
                format!("paths {k1} > {k2}: χ = ({}, {})", cert.chi[k1], cert.chi[k2]),
                false,
            ));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectionRow {
    pub s: usize,
    pub target: i64,
    /// `(k, i(x_k, 2m_k), ν(x_k, 2m_k))` for every path satisfying the sandwich.
    pub candidates: Vec<(usize, i64, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Injection {
    pub rho: i64,
    /// The minimum before flooring.
    pub rho_value: Rational,
    /// The same minimum with `î` in place of `i(x,1)`.
    pub rho_mean_variant: Scalar,
    pub rows: Vec<InjectionRow>,
    pub flags: Vec<String>,
    /// Injective slot assignments `s ↦ k`, each with its mean-index monotonicity.
    pub assignments: Vec<(Vec<usize>, bool)>,
}

/// Slot count `ρ` and the candidate table of the injection map.
pub fn rho_and_injection(cert: &JumpCertificate, p: &JumpProblem, n: usize) -> Result<Injection, JumpError> {
    let means = p.mean_indices()?;
    let mut rho_value: Option<Rational> = None;
    let mut rho_mean: Option<Scalar> = None;
    for (k, rec) in p.records.iter().enumerate() {
        let sp = s_plus_one(&rec.descriptor) as i64;
        let tail = 2 * sp - rec.nu1 as i64 + n as i64;
        let val = rat(rec.i1 + tail, 2);
        if rho_value.as_ref().is_none_or(|r| &val < r) {
            rho_value = Some(val);
        }
        let alt = (&means[k] + &Scalar::from_integer(tail)).scale(&rat(1, 2));
        if rho_mean.as_ref().map_or(Ok(true), |r| alt.cmp_exact(r).map(|o| o.is_lt()))? {
            rho_mean = Some(alt);
        }
    }
    let rho_value = rho_value.unwrap_or_else(Rational::zero);
    let rho = rho_value.floor().to_integer();
    let rho = i64::try_from(rho).unwrap_or(i64::MAX);
    let mut flags = Vec::new();
    if !rho_value.is_integer() {
        flags.push(format!("slot count {rho_value} is not an integer; floored to {rho}"));
    }
    let mut iters = Vec::new();
    for (k, rec) in p.records.iter().enumerate() {
        let m2 = 2 * cert.m[k];
        iters.push((index_iterate(rec, m2)?, nullity_iterate(rec, m2)?));
    }
    let mut rows = Vec::new();
    for s in 1..=rho.max(0) as usize {
        let target = 2 * cert.n as i64 - 2 * s as i64 + n as i64;
        let candidates: Vec<(usize, i64, usize)> = iters
            .iter()
            .enumerate()
            .filter(|(_, (i, nu))| *i <= target && target <= i + *nu as i64 - 1)
            .map(|(k, (i, nu))| (k, *i, *nu))
            .collect();
        if candidates.is_empty() {
            return Err(JumpError::EmptyRow(s));
        }
        if candidates.len() > 1 {
            flags.push(format!("slot {s} admits {} candidate paths", candidates.len()));
        }
        rows.push(InjectionRow { s, target, candidates });
    }
    let mut assignments = Vec::new();
    let mut cur = Vec::new();
    assign(&rows, &mut cur, &mut assignments);
    let mut scored = Vec::new();
    for a in assignments {
        let mut mono = true;
        for w in a.windows(2) {
            let hi = means[w[0]].scale_int(2 * cert.m[w[0]] as i64);
            let lo = means[w[1]].scale_int(2 * cert.m[w[1]] as i64);
            mono &= lo.cmp_exact(&hi)?.is_lt();
        }
        scored.push((a, mono));
    }
    if scored.is_empty() && !rows.is_empty() {
        flags.push("no injective slot assignment".into());
    }
    Ok(Injection {
        rho,
        rho_value,
        rho_mean_variant: rho_mean.unwrap_or_else(Scalar::zero),
        rows,
        flags,
        assignments: scored,
    })
}

fn assign(rows: &[InjectionRow], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == rows.len() {
        out.push(cur.clone());
        return;
    }
    for &(k, _, _) in &rows[cur.len()].candidates {
        if !cur.contains(&k) {
            cur.push(k);
            assign(rows, cur, out);
            cur.pop();
        }
    }
}
