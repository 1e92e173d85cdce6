//! Scenario checks: slot inequalities, `Δ` bounds, the forced shape at slot 1
//! and the two end-to-end pipelines (two elliptic orbits; three in `ℝ⁶`).


use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::iteration::{check_convex_constraints, mean_index, nullity_iterate, IterError, PathRecord};
use crate::jump::{
    build_v, choose_a, compute_delta, psi, rho_and_injection, search_n, Injection, JumpCertificate, JumpError,
    JumpProblem, JumpVector,
};
use crate::normal_form::{
    capital_c, classify_stability, rational_counts, s_plus_one, NormalFormDescriptor, NormalFormError, Stability,
};
use crate::scalar::{Rational, ScalarError};
use crate::symplectic::BasicForm;

#[derive(Debug, Clone, Error)]
pub enum TheoremError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("scenario inconsistent at `{check}`: {detail}")]
    Inconsistent { check: String, detail: String, report: Box<TheoremReport> },
    #[error(transparent)]
    Jump(#[from] JumpError),
    #[error(transparent)]
    Iter(#[from] IterError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A hypothetical family of closed characteristics together with the
/// hypotheses it is supposed to satisfy.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub n: usize,
    pub records: Vec<PathRecord>,
    pub non_degenerate: bool,
    /// The first slot is assumed irrationally elliptic.
    pub assumption_a: bool,
    /// Only finitely many geometrically distinct closed characteristics.
    pub finite_family: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), TheoremError> {
        if self.records.is_empty() {
            return Err(TheoremError::InvalidScenario("no records".into()));
        }
        for rec in &self.records {
            if rec.n != self.n {
                return Err(TheoremError::InvalidScenario(format!("{}: dimension {} ≠ {}", rec.label, rec.n, self.n)));
            }
            rec.validate()?;
            let conv = check_convex_constraints(rec)?;
            if !conv.pass {
                return Err(TheoremError::InvalidScenario(format!("{}: {}", rec.label, conv.reasons.join("; "))));
            }
            if self.non_degenerate {
                let d = &rec.descriptor;
                let c = rational_counts(d)?;
                if d.p_zero + d.p_plus + d.q_minus + d.q_zero + d.q_plus + d.r_zero() > 0
                    || c.r_tilde + c.r_star_tilde > 0
                {
                    return Err(TheoremError::InvalidScenario(format!(
                        "{}: degenerate blocks or rational angles in a non-degenerate scenario",
                        rec.label
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub check: String,
    /// Which record / slot the step is about, e.g. `x2, s=1`.
    pub scope: String,
    pub pass: bool,
    pub detail: String,
}

fn step(check: &str, scope: &str, pass: bool, detail: String) -> Step {
    Step { check: check.into(), scope: scope.into(), pass, detail }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TheoremReport {
    pub steps: Vec<Step>,
    pub conclusions: Vec<String>,
    pub elliptic: Vec<usize>,
    pub irrationally_elliptic: Vec<usize>,
    pub certificates: Vec<JumpCertificate>,
    pub injections: Vec<Injection>,
    /// `j(1)` of each certificate run, in order.
    pub first_slots: Vec<usize>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.pass)
    }

    pub fn first_failure(&self) -> Option<&Step> {
        self.steps.iter().find(|s| !s.pass)
    }

    /// Fails with the first violated step, if any.
    fn gate(self) -> Result<Self, TheoremError> {
        match self.first_failure() {
            Some(s) => Err(TheoremError::Inconsistent {
                check: s.check.clone(),
                detail: format!("{} ({})", s.detail, s.scope),
                report: Box::new(self.clone()),
            }),
            None => Ok(self),
        }
    }

    fn reject(self, check: &str, detail: String) -> TheoremError {
        TheoremError::Inconsistent { check: check.into(), detail, report: Box::new(self) }
    }

    pub fn trace_table(&self) -> String {
        let mut out = String::new();
        let w = self.steps.iter().map(|s| s.check.len()).max().unwrap_or(5).max(5);
        let ws = self.steps.iter().map(|s| s.scope.len()).max().unwrap_or(5).max(5);
        out.push_str(&format!("{:<w$}  {:<ws$}  {:<4}  detail\n", "check", "scope", "ok"));
        for s in &self.steps {
            let ok = if s.pass { "pass" } else { "FAIL" };
            out.push_str(&format!("{:<w$}  {:<ws$}  {ok:<4}  {}\n", s.check, s.scope, s.detail));
        }
        for c in &self.conclusions {
            out.push_str(&format!("=> {c}\n"));
        }
        out
    }
}

fn scope(rec: &PathRecord, s: usize) -> String {
    format!("{}, s={s}", rec.label)
}

fn block_label(b: &BasicForm) -> String {
    match b {
        BasicForm::D(l) => format!("D({l})"),
        BasicForm::N1(l, a) => format!("N₁({l},{a})"),
        BasicForm::R(t) => format!("R({t})"),
        BasicForm::N2 { angle, nontrivial } => {
            format!("N₂({angle},{})", if *nontrivial { "nontrivial" } else { "trivial" })
        }
    }
}

/// `N₁(1,1) ⋄ R(θ) ⋄ …` for the report.
pub fn describe_form(d: &NormalFormDescriptor) -> String {
    d.blocks().iter().map(block_label).collect::<Vec<_>>().join(" ⋄ ")
}

/// The two slot inequalities for path `k` in slot `s`, plus `Δ ≤ C`, plus the
/// equality `2s = 4 + r + 2r₊ − 2Δ` for non-degenerate `ℝ⁶` scenarios.
pub fn check_jump_bounds(
    cert: &JumpCertificate,
    scenario: &Scenario,
    s: usize,
    k: usize,
) -> Result<Vec<Step>, TheoremError> {
    let rec = &scenario.records[k];
    let d = &rec.descriptor;
    let sc = scope(rec, s);
    let n = scenario.n as i64;
    let sp = s_plus_one(d) as i64;
    let c = capital_c(d) as i64;
    let delta = cert.delta_k[k];
    let nu = nullity_iterate(rec, 2 * cert.m[k])? as i64;
    let two_s = 2 * s as i64;
    let mut out = vec![step("delta_at_most_c", &sc, delta <= c, format!("Δ = {delta} ≤ C = {c}"))];
    let lower = n + sp + c - 2 * delta - nu + 1;
    out.push(step(
        "slot_lower_bound",
        &sc,
        two_s >= lower,
        format!("2s = {two_s} ≥ n + S⁺ + C − 2Δ − ν(x,2m) + 1 = {n}+{sp}+{c}−{}−{nu}+1 = {lower}", 2 * delta),
    ));
    let upper = n + sp + c - 2 * delta;
    out.push(step(
        "slot_upper_bound",
        &sc,
        two_s <= upper,
        format!("2s = {two_s} ≤ n + S⁺ + C − 2Δ = {upper}"),
    ));
    if scenario.non_degenerate && scenario.n == 3 {
        let rhs = 4 + d.r() as i64 + 2 * d.r_star() as i64 - 2 * delta;
        out.push(step(
            "slot_equality",
            &sc,
            two_s == rhs,
            format!("2s = {two_s} vs 4 + r + 2r₊ − 2Δ = 4+{}+{}−{} = {rhs}", d.r(), 2 * d.r_star(), 2 * delta),
        ));
    }
    Ok(out)
}

/// `Δ ≤ r − r̃ + r₊ − r̃₊`, and one less when `χ_k = 0` with irrational `î`.
pub fn delta_bounds(rec: &PathRecord, chi_k: u8, m_k: u64, delta: &Rational) -> Result<Vec<Step>, TheoremError> {
    let d = &rec.descriptor;
    let c = rational_counts(d)?;
    let got = compute_delta(rec, m_k, delta)?;
    let free = (d.r() - c.r_tilde + d.r_star() - c.r_star_tilde) as i64;
    let sc = format!("{}, m={m_k}", rec.label);
    let mut out =
        vec![step("delta_bound", &sc, got <= free, format!("Δ = {got} ≤ r − r̃ + r₊ − r̃₊ = {free}"))];
    if chi_k == 0 && !mean_index(rec)?.is_rational() {
        out.push(step(
            "delta_bound_strict",
            &sc,
            got < free,
            format!("χ = 0 with irrational î: Δ = {got} ≤ r − r̃ − 1 + r₊ − r̃₊ = {}", free - 1),
        ));
    }
    Ok(out)
}

/// `ν(x, 2m)` in the form valid at a jump iterate: rational angles close up,
/// irrational ones do not.
pub fn rewritten_nullity(d: &NormalFormDescriptor) -> Result<usize, TheoremError> {
    let c = rational_counts(d)?;
    Ok(d.p_minus
        + 2 * d.p_zero
        + d.p_plus
        + d.q_minus
        + 2 * d.q_zero
        + d.q_plus
        + 2 * (c.r_tilde + c.r_star_tilde + c.r_zero_tilde))
}

/// Lower bounds on `2s` after eliminating `Δ` and `ν`.
pub fn corollary_bounds(rec: &PathRecord, s: usize, chi_k: u8) -> Result<Vec<Step>, TheoremError> {
    let d = &rec.descriptor;
    let c = rational_counts(d)?;
    let sc = scope(rec, s);
    let two_s = 2 * s;
    let rhs = d.p_minus + d.q_plus + 2 * d.r_star() + 2 * (d.r_zero() - c.r_zero_tilde) + d.k + 1;
    let mut out = vec![step(
        "corollary_lower",
        &sc,
        two_s >= rhs,
        format!(
            "2s = {two_s} ≥ p₋ + q₊ + 2r₊ + 2(r₀ − r̃₀) + k + 1 = {rhs} (ν at the jump = {})",
            rewritten_nullity(d)?
        ),
    )];
    if chi_k == 0 && !mean_index(rec)?.is_rational() {
        out.push(step(
            "corollary_lower_strict",
            &sc,
            two_s >= rhs + 2,
            format!("χ = 0 with irrational î: 2s = {two_s} ≥ {}", rhs + 2),
        ));
    }
    Ok(out)
}

/// Shape forced on the record occupying slot 1.
pub fn classify_s1(rec: &PathRecord, scenario: &Scenario) -> Result<Vec<Step>, TheoremError> {
    let d = &rec.descriptor;
    let c = rational_counts(d)?;
    let sc = scope(rec, 1);
    let mut out = vec![step(
        "s1_shape",
        &sc,
        d.p_minus == 1 && d.q_plus == 0 && d.r_star() == 0 && d.k == 0 && d.r_zero() == c.r_zero_tilde,
        format!(
            "need p₋=1, q₊=r₊=k=0, r₀=r̃₀; have p₋={}, q₊={}, r₊={}, k={}, r₀={}, r̃₀={}",
            d.p_minus,
            d.q_plus,
            d.r_star(),
            d.k,
            d.r_zero(),
            c.r_zero_tilde
        ),
    )];
    if scenario.non_degenerate {
        let stab = classify_stability(d, rec.n)?;
        out.push(step(
            "s1_irrationally_elliptic",
            &sc,
            d.p_zero + d.p_plus + d.q_minus + d.q_zero + c.r_tilde + d.r_zero() == 0
                && stab == Stability::IrrationallyElliptic,
            format!("non-degenerate slot 1 must be irrationally elliptic; classified {stab}"),
        ));
    }
    Ok(out)
}

fn is_elliptic(rec: &PathRecord) -> Result<bool, TheoremError> {
    Ok(matches!(classify_stability(&rec.descriptor, rec.n)?, Stability::Elliptic | Stability::IrrationallyElliptic))
}

/// One certificate run under a fixed sign pattern.
struct Run {
    cert: JumpCertificate,
    inj: Injection,
    /// Distinct `j(1)` over the consistent assignments.
    first: Vec<usize>,
}

fn run_once(scenario: &Scenario, p: &JumpProblem, jv: &JumpVector, a: &[Rational], chi: &[u8]) -> Result<Run, TheoremError> {
    let cert = search_n(p, jv, chi, a, Some(1))?.remove(0);
    let inj = rho_and_injection(&cert, p, scenario.n)?;
    let first: BTreeSet<usize> = if inj.assignments.is_empty() {
        inj.rows.first().map(|r| r.candidates.iter().map(|c| c.0).collect()).unwrap_or_default()
    } else {
        inj.assignments.iter().filter_map(|(a, _)| a.first().copied()).collect()
    };
    Ok(Run { cert, inj, first: first.into_iter().collect() })
}

fn problem_for(scenario: &Scenario, problem: &JumpProblem) -> JumpProblem {
    JumpProblem { records: scenario.records.clone(), ..problem.clone() }
}

/// Candidate directions: the default one, its negation, then one constrained
/// to `χ_k = 1` for every path with irrational mean index.
fn directions(jv: &JumpVector, irrational: &[usize]) -> Vec<(Vec<Rational>, Vec<u8>)> {
    let mut out: Vec<(Vec<Rational>, Vec<u8>)> = Vec::new();
    let mut push = |a: Vec<Rational>| {
        let chi: Vec<u8> = a.iter().map(psi).collect();
        if !out.iter().any(|(b, _)| *b == a) {
            out.push((a, chi));
        }
    };
    if let Ok((a, _)) = choose_a(jv, &BTreeMap::new()) {
        let neg = a.iter().map(|x| -x.clone()).collect();
        push(a);
        push(neg);
    }
    for &k in irrational {
        if let Ok((a, _)) = choose_a(jv, &BTreeMap::from([(k, 1u8)])) {
            push(a);
        }
    }
    out
}

/// Slot-1 checks common to both pipelines.
fn slot_one_steps(
    scenario: &Scenario,
    p: &JumpProblem,
    cert: &JumpCertificate,
    k: usize,
) -> Result<Vec<Step>, TheoremError> {
    let rec = &scenario.records[k];
    let chi = cert.chi[k];
    let irr = !mean_index(rec)?.is_rational();
    let mut out = classify_s1(rec, scenario)?;
    out.push(step(
        "s1_elliptic",
        &scope(rec, 1),
        is_elliptic(rec)?,
        format!("forced form {}", describe_form(&rec.descriptor)),
    ));
    out.push(step(
        "irrational_mean_iff_chi",
        &scope(rec, 1),
        irr == (chi == 1),
        format!("î irrational: {irr}, χ = {chi}"),
    ));
    out.extend(corollary_bounds(rec, 1, chi)?);
    out.extend(check_jump_bounds(cert, scenario, 1, k)?);
    out.extend(delta_bounds(rec, chi, cert.m[k], &p.delta)?);
    out.push(nullity_step(rec, 1, cert.m[k])?);
    Ok(out)
}

fn nullity_step(rec: &PathRecord, s: usize, m: u64) -> Result<Step, TheoremError> {
    let nu = nullity_iterate(rec, 2 * m)?;
    let rw = rewritten_nullity(&rec.descriptor)?;
    Ok(step("rewritten_nullity", &scope(rec, s), nu == rw, format!("ν(x,2m) = {nu}, rewritten form = {rw}")))
}

fn irrational_paths(scenario: &Scenario) -> Result<Vec<usize>, TheoremError> {
    let mut out = Vec::new();
    for (k, rec) in scenario.records.iter().enumerate() {
        if !mean_index(rec)?.is_rational() {
            out.push(k);
        }
    }
    Ok(out)
}

/// Finds a direction `â` whose slot-1 path has `χ_{j(1)}(â) = 1`.
fn first_slot_irrational(
    scenario: &Scenario,
    p: &JumpProblem,
    jv: &JumpVector,
    report: &mut TheoremReport,
) -> Result<(Vec<Rational>, Run), TheoremError> {
    let irr = irrational_paths(scenario)?;
    if irr.is_empty() {
        let detail = "cannot realize χ_{j(1)}=1: every mean index is rational, but at least one must be irrational"
            .to_string();
        report.steps.push(step("irrational_mean_index_count", "all", false, detail.clone()));
        return Err(report.clone().reject("irrational_mean_index_count", detail));
    }
    for (a, chi) in directions(jv, &irr) {
        let run = run_once(scenario, p, jv, &a, &chi)?;
        if !run.first.is_empty() && run.first.iter().all(|&k| run.cert.chi[k] == 1) {
            return Ok((a, run));
        }
    }
    let detail = "cannot realize χ_{j(1)}=1 with any admissible direction".to_string();
    report.steps.push(step("slot_one_sign", "all", false, detail.clone()));
    Err(report.clone().reject("slot_one_sign", detail))
}

/// Two distinct elliptic closed characteristics: slot 1 under `â` and under `−â`.
pub fn run_two_elliptic(scenario: &Scenario, problem: &JumpProblem) -> Result<TheoremReport, TheoremError> {
    scenario.validate()?;
    let p = problem_for(scenario, problem);
    p.validate()?;
    let jv = build_v(&p)?;
    let mut report = TheoremReport::default();
    let (a_hat, run) = first_slot_irrational(scenario, &p, &jv, &mut report)?;
    let neg: Vec<Rational> = a_hat.iter().map(|x| -x.clone()).collect();
    let chi_neg: Vec<u8> = neg.iter().map(psi).collect();
    let run_neg = run_once(scenario, &p, &jv, &neg, &chi_neg)?;

    for r in [&run, &run_neg] {
        for &k in &r.first {
            report.steps.extend(slot_one_steps(scenario, &p, &r.cert, k)?);
        }
    }
    for &j in &run.first {
        for &jt in &run_neg.first {
            report.steps.push(step(
                "distinct_first_slots",
                "s=1",
                j != jt,
                format!(
                    "j(1) = {} under â, {} under −â",
                    scenario.records[j].label, scenario.records[jt].label
                ),
            ));
        }
    }
    report.first_slots = vec![run.first[0], run_neg.first[0]];
    let mut report = finish_runs(report, [run, run_neg]).gate()?;

    let pair: BTreeSet<usize> = report.first_slots.iter().copied().collect();
    for &k in &pair {
        let rec = &scenario.records[k];
        report.elliptic.push(k);
        report.conclusions.push(format!("{} is elliptic: {}", rec.label, describe_form(&rec.descriptor)));
        if scenario.assumption_a || classify_stability(&rec.descriptor, rec.n)? == Stability::IrrationallyElliptic {
            report.irrationally_elliptic.push(k);
            report.conclusions.push(format!("{} is irrationally elliptic", rec.label));
        }
    }
    Ok(report)
}

fn finish_runs<const K: usize>(mut report: TheoremReport, runs: [Run; K]) -> TheoremReport {
    for r in runs {
        report.certificates.push(r.cert);
        report.injections.push(r.inj);
    }
    report
}

/// Whether some slot `s ∈ {1,2,3}` and `0 ≤ Δ ≤ r + r₊` satisfy the `ℝ⁶` equality.
fn fits_some_slot(d: &NormalFormDescriptor) -> bool {
    let base = 4 + d.r() as i64 + 2 * d.r_star() as i64;
    (1..=3).any(|s| (0..=(d.r() + d.r_star()) as i64).any(|delta| 2 * s == base - 2 * delta))
}

/// ℝ⁶ pipeline for a finite non-degenerate family: each orbit fills one slot, all elliptic.
pub fn run_r6_pipeline(scenario: &Scenario, problem: &JumpProblem) -> Result<TheoremReport, TheoremError> {
    scenario.validate()?;
    if scenario.n != 3 || !scenario.non_degenerate || !scenario.finite_family {
        return Err(TheoremError::InvalidScenario(
            "the ℝ⁶ pipeline needs n = 3, non_degenerate and finite_family".into(),
        ));
    }
    let mut report = TheoremReport::default();
    for rec in &scenario.records {
        let stab = classify_stability(&rec.descriptor, rec.n)?;
        let ok = stab != Stability::Hyperbolic;
        report.steps.push(step(
            "hyperbolic_exclusion",
            &rec.label,
            ok,
            if ok {
                format!("classified {stab}")
            } else {
                "a hyperbolic closed characteristic forces infinitely many closed characteristics, contradicting the finite family".into()
            },
        ));
    }
    report = report.gate()?;

    let p = problem_for(scenario, problem);
    p.validate()?;
    let jv = build_v(&p)?;
    let (_, run) = match first_slot_irrational(scenario, &p, &jv, &mut report) {
        Err(TheoremError::Jump(JumpError::EmptyRow(s))) => return Err(empty_slot(scenario, report, s)),
        other => other?,
    };
    report.first_slots = run.first.clone();
    let ok = run.inj.rho == 3;
    report.steps.push(step("slot_count", "all", ok, format!("ρ = {} (needs 3)", run.inj.rho)));
    if run.inj.assignments.is_empty() {
        let s = run.inj.rows.iter().find(|r| r.candidates.len() == 1).map_or(1, |r| r.s);
        return Err(empty_slot(scenario, report, s));
    }

    for (asg, _) in &run.inj.assignments {
        report.steps.extend(slot_one_steps(scenario, &p, &run.cert, asg[0])?);
        for (idx, &k) in asg.iter().enumerate().skip(1) {
            let s = idx + 1;
            let rec = &scenario.records[k];
            let d = &rec.descriptor;
            report.steps.extend(check_jump_bounds(&run.cert, scenario, s, k)?);
            report.steps.extend(delta_bounds(rec, run.cert.chi[k], run.cert.m[k], &p.delta)?);
            report.steps.push(nullity_step(rec, s, run.cert.m[k])?);
            if s == 3 {
                report.steps.push(step(
                    "s3_rotation_count",
                    &scope(rec, s),
                    d.r() == 2 || d.r_star() == 1,
                    format!("2 = r + 2r₊ − 2Δ forces r = 2 or r₊ = 1; have r = {}, r₊ = {}", d.r(), d.r_star()),
                ));
            }
            report.steps.push(step(
                "slot_elliptic",
                &scope(rec, s),
                is_elliptic(rec)?,
                format!("forced form {}", describe_form(d)),
            ));
        }
        let irr: Vec<usize> = asg.iter().copied().filter(|&k| !mean_index(&scenario.records[k]).map_or(true, |x| x.is_rational())).collect();
        report.steps.push(step(
            "irrational_mean_count",
            "s=1..3",
            irr.len() >= 2,
            format!("{} of the three slots have irrational mean index (needs ρ − 1 = 2)", irr.len()),
        ));
        for &k in asg.iter().skip(1).filter(|k| irr.contains(k)) {
            let rec = &scenario.records[k];
            let stab = classify_stability(&rec.descriptor, rec.n)?;
            report.steps.push(step(
                "irrational_mean_irrationally_elliptic",
                &rec.label,
                stab == Stability::IrrationallyElliptic,
                format!("elliptic with irrational î in a non-degenerate family; classified {stab}"),
            ));
        }
    }
    let mut report = finish_runs(report, [run]).gate()?;

    let mut ell = BTreeSet::new();
    let mut irr = BTreeSet::new();
    for (asg, _) in &report.injections[0].assignments {
        for &k in asg {
            ell.insert(k);
            if classify_stability(&scenario.records[k].descriptor, 3)? == Stability::IrrationallyElliptic {
                irr.insert(k);
            }
        }
    }
    report.elliptic = ell.into_iter().collect();
    report.irrationally_elliptic = irr.into_iter().collect();
    for &k in &report.elliptic {
        let rec = &scenario.records[k];
        report.conclusions.push(format!("{} is elliptic: {}", rec.label, describe_form(&rec.descriptor)));
    }
    report.conclusions.push(format!(
        "{} elliptic, {} irrationally elliptic",
        report.elliptic.len(),
        report.irrationally_elliptic.len()
    ));
    Ok(report)
}

/// A slot nobody can fill: name the records the equality rules out.
fn empty_slot(scenario: &Scenario, mut report: TheoremReport, s: usize) -> TheoremError {
    let misfits: Vec<String> = scenario
        .records
        .iter()
        .filter(|r| !fits_some_slot(&r.descriptor))
        .map(|r| {
            format!(
                "{} ({}, r = {}, r₊ = {}) makes 4 + r + 2r₊ − 2Δ odd",
                r.label,
                describe_form(&r.descriptor),
                r.descriptor.r(),
                r.descriptor.r_star()
            )
        })
        .collect();
    let detail = if misfits.is_empty() {
        format!("slot s={s} has no admissible path")
    } else {
        format!("slot s={s} cannot be filled: 2s = 4 + r + 2r₊ − 2Δ has no solution: {}", misfits.join(", "))
    };
    report.steps.push(step("slot_equality", &format!("s={s}"), false, detail.clone()));
    report.reject("slot_equality", detail)
}
