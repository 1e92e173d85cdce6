use std::collections::BTreeMap;

use super::*;
use crate::normal_form::NormalFormDescriptor;
use crate::symplectic::Angle;

fn worked_record() -> PathRecord {
    let d = NormalFormDescriptor { p_minus: 1, theta_list: vec![Angle::turns_pi(1, 2)], ..Default::default() };
    PathRecord::new("x", 2, 2, d, Scalar::from_integer(2)).unwrap()
}

fn worked_problem(n_bound: u64) -> JumpProblem {
    JumpProblem {
        records: vec![worked_record()],
        delta: rat(1, 100),
        epsilon: rat(1, 100),
        big_m: 4,
        m0: 10,
        n_bound,
    }
}

fn sqrt2_record() -> PathRecord {
    // θ/π = √2 (already in (0,2)), î = 2 + √2.
    let d = NormalFormDescriptor { p_minus: 1, theta_list: vec![Angle::Exact(Scalar::sqrt(2))], ..Default::default() };
    PathRecord::new("s", 2, 2, d, Scalar::one()).unwrap()
}

#[test]
fn defaults() {
    let recs = vec![worked_record()];
    assert_eq!(default_m(&recs), 4);
    assert_eq!(default_m0(&recs, 4).unwrap(), 20);
    assert_eq!(default_epsilon(&rat(1, 100)), rat(1, 200));
    assert_eq!(default_epsilon(&rat(2, 5)), rat(1, 6));
    let p = JumpProblem::with_defaults(recs, rat(1, 100), 100).unwrap();
    assert_eq!((p.big_m, p.m0), (4, 20));
}

#[test]
fn problem_validation() {
    let mut p = worked_problem(100);
    p.delta = rat(1, 2);
    assert!(p.validate().is_err());
    let d = NormalFormDescriptor { p_minus: 1, theta_list: vec![Angle::turns_pi(1, 2)], ..Default::default() };
    let low = PathRecord::new("low", 2, -2, d, Scalar::one()).unwrap();
    let p = JumpProblem { records: vec![low], ..worked_problem(100) };
    assert!(p.validate().is_err());
}

#[test]
fn build_v_examples() {
    let jv = build_v(&worked_problem(100)).unwrap();
    assert_eq!(jv.v, vec![Scalar::ratio(2, 5), Scalar::ratio(1, 5)]);
    let plain = |i1| {
        let d = NormalFormDescriptor { p_minus: 1, ..Default::default() };
        PathRecord::new("p", 1, i1, d, Scalar::one()).unwrap()
    };
    let p = JumpProblem { records: vec![plain(2), plain(4)], ..worked_problem(100) };
    assert_eq!(build_v(&p).unwrap().v, vec![Scalar::ratio(1, 3), Scalar::ratio(1, 5)]);

    let p = JumpProblem { records: vec![sqrt2_record()], ..worked_problem(100) };
    let jv = build_v(&p).unwrap();
    // 1/(2+√2) = 1 - √2/2 and √2/(2+√2) = √2 - 1
    assert_eq!(jv.v[0], &Scalar::one() - &Scalar::sqrt(2).scale(&rat(1, 2)));
    assert_eq!(jv.v[1], &Scalar::sqrt(2) - &Scalar::one());
}

fn single(v: Scalar) -> JumpVector {
    JumpVector { v: vec![v], coords: vec![(0, None)] }
}

#[test]
fn choose_a_examples() {
    let jv = build_v(&worked_problem(100)).unwrap();
    let (a, chi) = choose_a(&jv, &BTreeMap::new()).unwrap();
    assert!(a.iter().all(|x| x.is_zero()));
    assert_eq!(chi, vec![0, 0]);

    let jv = single(Scalar::sqrt(2).scale(&rat(1, 2)));
    let (a, chi) = choose_a(&jv, &BTreeMap::new()).unwrap();
    assert!(a[0].is_negative());
    assert_eq!(chi, vec![1]);
    let (a, chi) = choose_a(&jv, &BTreeMap::from([(0, 0)])).unwrap();
    assert!(a[0].is_positive());
    assert_eq!(chi, vec![0]);

    let jv = single(Scalar::ratio(1, 2));
    assert!(matches!(
        choose_a(&jv, &BTreeMap::from([(0, 1)])),
        Err(JumpError::ConstraintUnsatisfiable { index: 0 })
    ));
}

#[test]
fn choose_a_respects_relations() {
    // v = (√2, 2√2): the tangent space is spanned by (1, 2), so χ agrees on both.
    let jv = JumpVector { v: vec![Scalar::sqrt(2), Scalar::sqrt(2).scale_int(2)], coords: vec![(0, None), (1, None)] };
    let (a, chi) = choose_a(&jv, &BTreeMap::new()).unwrap();
    assert_eq!(&a[1], &(&a[0] * rat(2, 1)));
    assert_eq!(chi, vec![1, 1]);
    assert!(choose_a(&jv, &BTreeMap::from([(0, 0), (1, 1)])).is_err());
}

#[test]
fn worked_search() {
    let p = worked_problem(100);
    let jv = build_v(&p).unwrap();
    let (a, chi) = choose_a(&jv, &BTreeMap::new()).unwrap();
    let certs = search_n(&p, &jv, &chi, &a, Some(1)).unwrap();
    let c = &certs[0];
    assert_eq!((c.n, c.m.clone(), c.delta_k.clone(), c.i_k.clone()), (10, vec![4], vec![0], vec![10]));
    assert!(c.all_pass(), "{:?}", c.failed().collect::<Vec<_>>());

    let inj = rho_and_injection(c, &p, 2).unwrap();
    assert_eq!(inj.rho, 2);
    assert_eq!(inj.rho_value, rat(5, 2));
    assert_eq!(inj.rho_mean_variant, Scalar::ratio(11, 4));
    assert_eq!(inj.rows[0].target, 20);
    assert_eq!(inj.rows[0].candidates, vec![(0, 18, 3)]);

    let p = worked_problem(9);
    assert!(matches!(search_n(&p, &jv, &chi, &a, None), Err(JumpError::NoHit { .. })));
}

#[test]
fn half_mean_index() {
    let d = NormalFormDescriptor { p_minus: 1, ..Default::default() };
    let rec = PathRecord::new("h", 1, 1, d, Scalar::one()).unwrap();
    let p = JumpProblem { records: vec![rec], delta: rat(1, 10), epsilon: rat(1, 20), big_m: 2, m0: 2, n_bound: 10 };
    let jv = build_v(&p).unwrap();
    assert_eq!(jv.v, vec![Scalar::ratio(1, 2)]);
    // N = 2 sits in the window but gives m = 0; the first verified hit is N = 4.
    let certs = search_n(&p, &jv, &[0], &[Rational::zero()], Some(1)).unwrap();
    assert_eq!((certs[0].n, certs[0].m[0], certs[0].i_k[0]), (4, 2, 4));
}

#[test]
fn delta_examples() {
    assert_eq!(compute_delta(&worked_record(), 4, &rat(1, 100)).unwrap(), 0);
    assert_eq!(compute_delta(&sqrt2_record(), 169, &rat(1, 100)).unwrap(), 1);
    let d = NormalFormDescriptor { p_minus: 1, beta_list: vec![Angle::turns_pi(1, 3)], ..Default::default() };
    let rec = PathRecord::new("b", 3, 2, d, Scalar::one()).unwrap();
    for m in 1..20 {
        assert_eq!(compute_delta(&rec, m, &rat(1, 100)).unwrap(), 0);
    }
}

#[test]
fn i_examples() {
    assert_eq!(compute_i(&worked_record(), 4).unwrap(), 10);
    assert_eq!(compute_i(&worked_record(), 1).unwrap(), 3);
    let d = NormalFormDescriptor { p_minus: 1, ..Default::default() };
    let rec = PathRecord::new("p", 1, 2, d, Scalar::one()).unwrap();
    assert_eq!(compute_i(&rec, 3).unwrap(), 9);
}

#[test]
fn tampered_certificate_fails() {
    let p = worked_problem(100);
    let jv = build_v(&p).unwrap();
    let mut c = search_n(&p, &jv, &[0, 0], &[Rational::zero(), Rational::zero()], Some(1)).unwrap().remove(0);
    c.n += 1;
    let checks = verify_certificate(&c, &p).unwrap();
    assert!(checks.iter().any(|k| k.name == "jump_identity" && !k.pass));
}

#[test]
fn ordering_violation_reported() {
    let sq = sqrt2_record();
    let d = NormalFormDescriptor { p_minus: 1, ..Default::default() };
    let rat_rec = PathRecord::new("r", 1, 1, d, Scalar::one()).unwrap();
    let p = JumpProblem {
        records: vec![sq, rat_rec],
        delta: rat(1, 10),
        epsilon: rat(1, 20),
        big_m: 1,
        m0: 1,
        n_bound: 100,
    };
    // m·î: path 0 ≈ 3.41·m₀, path 1 = 2·m₁; χ = 1 on the rational, smaller one.
    let cert = JumpCertificate {
        n: 20,
        m: vec![7, 10],
        chi: vec![1, 1, 0],
        a: vec![Rational::zero(); 3],
        delta_k: vec![0, 0],
        i_k: vec![0, 0],
        big_m: 1,
        m0: 1,
        checks: vec![],
    };
    let checks = verify_certificate(&cert, &p).unwrap();
    assert!(checks.iter().any(|k| k.name == "ordering_rational_lower" && !k.pass));
}

#[test]
fn pell_iterate_search() {
    // Single irrational rotation: hits exist, every certificate verifies, Δ ≤ r − r̃.
    let p = JumpProblem::with_defaults(vec![sqrt2_record()], rat(1, 10), 100_000).unwrap();
    let jv = build_v(&p).unwrap();
    let (a, chi) = choose_a(&jv, &BTreeMap::new()).unwrap();
    let certs = search_n(&p, &jv, &chi, &a, Some(5)).unwrap();
    for c in &certs {
        assert!(c.verified());
        assert!(c.delta_k[0] <= 1);
    }
    let Ok(certs2) = search_n(&p, &jv, &chi, &a, Some(5)) else { panic!() };
    assert_eq!(certs, certs2);
}
