use super::*;
use crate::iteration::index_iterate;
use crate::normal_form::{classify_stability, Stability};

fn e2() -> Ellipsoid {
    Ellipsoid::new(vec![Scalar::one(), Scalar::sqrt(2)]).unwrap()
}

#[test]
fn validation() {
    assert!(Ellipsoid::new(vec![Scalar::one(), Scalar::from_integer(-1)]).is_err());
    assert!(e2().non_resonant().unwrap());
    assert!(!Ellipsoid::new(vec![Scalar::one(), Scalar::from_integer(2)]).unwrap().non_resonant().unwrap());
}

#[test]
fn plane_angles_exact() {
    let e = e2();
    let a = plane_angle(&e, 0, 1).unwrap();
    assert_eq!(a.exact().unwrap(), &(&Scalar::sqrt(2).scale_int(2) - &Scalar::from_integer(2)));
    assert_eq!(plane_angle(&e, 1, 0).unwrap().exact().unwrap(), &Scalar::sqrt(2));
}

#[test]
fn records_r4() {
    let recs = ellipsoid_characteristics(&e2(), 20_000).unwrap();
    let i1: Vec<i64> = recs.records.iter().map(|r| r.i1).collect();
    assert_eq!(i1, vec![4, 2]);
    let ratio = mean_index(&recs.records[0]).unwrap().try_div(&mean_index(&recs.records[1]).unwrap()).unwrap();
    assert_eq!(ratio, Scalar::sqrt(2));
    assert!(recs.warnings.is_empty());
}

#[test]
fn records_r6() {
    let e = Ellipsoid::new(vec![Scalar::one(), Scalar::sqrt(2), Scalar::sqrt(3)]).unwrap();
    let recs = ellipsoid_characteristics(&e, 20_000).unwrap();
    let i1: Vec<i64> = recs.records.iter().map(|r| r.i1).collect();
    assert_eq!(i1, vec![7, 5, 3]);
    for r in &recs.records {
        assert_eq!(classify_stability(&r.descriptor, 3).unwrap(), Stability::IrrationallyElliptic);
    }
}

#[test]
fn monodromy_matches_closed_form() {
    let e = e2();
    for i in 0..2 {
        let num = linearized_monodromy(&e, i, 100_000).unwrap().to_f64();
        let ana = analytic_monodromy(&e, i).unwrap().to_f64();
        assert!((num - ana).amax() < 1e-8);
    }
}

#[test]
fn sphere_monodromy() {
    let e = Ellipsoid::new(vec![Scalar::one(); 3]).unwrap();
    let m = linearized_monodromy(&e, 0, 10_000).unwrap();
    assert_eq!(m.elliptic_height().unwrap(), 6);
    assert_eq!(m.nullity_omega(&Angle::turns_pi(0, 1)).unwrap(), 5);
}

#[test]
fn coarse_steps_rejected() {
    assert!(matches!(linearized_monodromy(&e2(), 0, 10), Err(DynError::Drift(_))));
}

#[test]
fn oracle_self_consistency() {
    let e = e2();
    let recs = ellipsoid_characteristics(&e, 20_000).unwrap();
    for (i, rec) in recs.records.iter().enumerate() {
        let path = linearized_path(&e, i, 20_000, 1).unwrap();
        for m in 2..=6 {
            let got = crossing_oracle_i1(&path.iterate(m)).unwrap().i1;
            assert_eq!(got, index_iterate(rec, m as u64).unwrap(), "orbit {i}, m = {m}");
        }
    }
}

#[test]
fn resonant_sphere_flagged() {
    let e = Ellipsoid::new(vec![Scalar::one(), Scalar::one()]).unwrap();
    let recs = ellipsoid_characteristics(&e, 20_000).unwrap();
    assert!(recs.reports[0].endpoint_degenerate);
    assert!(recs.warnings.iter().any(|w| w.contains("resonant")));
    assert_eq!(recs.records[0].descriptor.p_zero, 1);
}
