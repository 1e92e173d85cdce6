use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::symplectic::{diamond, random_symplectic_exact, NUMERIC_TOL};

fn quarter() -> Angle {
    Angle::turns_pi(1, 2)
}

fn shear_rot() -> NormalFormDescriptor {
    NormalFormDescriptor { p_minus: 1, theta_list: vec![quarter()], ..Default::default() }
}

/// Maps N₂ angles into (0, π), where decomposition reports them.
fn fold_n2(d: &NormalFormDescriptor) -> NormalFormDescriptor {
    let fold = |l: &Vec<Angle>| {
        l.iter()
            .map(|a| if a.over_pi_f64() > 1.0 { a.conjugate() } else { a.clone() })
            .collect()
    };
    NormalFormDescriptor { alpha_list: fold(&d.alpha_list), beta_list: fold(&d.beta_list), ..d.clone() }
        .canonical()
}

#[test]
fn realize_examples() {
    let d = NormalFormDescriptor { p_minus: 1, ..Default::default() };
    assert_eq!(realize(&d).unwrap(), BasicForm::N1(1, 1).to_matrix().unwrap());
    let d = NormalFormDescriptor { theta_list: vec![quarter()], ..Default::default() };
    assert_eq!(realize(&d).unwrap(), BasicForm::R(quarter()).to_matrix().unwrap());
    let expect = diamond(&BasicForm::N1(1, 1).to_matrix().unwrap(), &BasicForm::R(quarter()).to_matrix().unwrap());
    assert_eq!(realize(&shear_rot()).unwrap(), expect.unwrap());
}

#[test]
fn splitting_examples() {
    let d = NormalFormDescriptor { p_minus: 1, ..Default::default() };
    assert_eq!(splitting_numbers(&d, &Angle::turns_pi(0, 1)).unwrap(), (1, 1));
    let d = NormalFormDescriptor { theta_list: vec![quarter()], ..Default::default() };
    assert_eq!(splitting_numbers(&d, &quarter()).unwrap(), (0, 1));
    assert_eq!(splitting_numbers(&d, &Angle::turns_pi(3, 2)).unwrap(), (1, 0));
    let d = NormalFormDescriptor { beta_list: vec![Angle::turns_pi(1, 3)], ..Default::default() };
    assert_eq!(splitting_numbers(&d, &Angle::turns_pi(1, 3)).unwrap(), (0, 0));
}

#[test]
fn derived_counts() {
    let d = shear_rot();
    assert_eq!((s_plus_one(&d), capital_c(&d), mu(&d)), (1, 1, 1));
    assert_eq!(c_from_table(&d).unwrap(), 1);
    let d = NormalFormDescriptor { q_zero: 1, alpha_list: vec![Angle::turns_pi(2, 3)], ..Default::default() };
    assert_eq!(capital_c(&d), 3);
    assert_eq!(c_from_table(&d).unwrap(), 3);
    let d = NormalFormDescriptor { k: 2, ..Default::default() };
    assert_eq!((s_plus_one(&d), capital_c(&d)), (0, 0));
}

#[test]
fn rational_count_examples() {
    let irr = Angle::Exact(Scalar::sqrt(2)).reduced().unwrap();
    let d = NormalFormDescriptor { theta_list: vec![quarter(), irr], alpha_list: vec![Angle::turns_pi(2, 3)], ..Default::default() };
    let c = rational_counts(&d).unwrap();
    assert_eq!((c.r_tilde, c.r_star_tilde, c.r_zero_tilde), (1, 1, 0));
    let d = NormalFormDescriptor { theta_list: vec![Angle::Numeric(0.3)], ..Default::default() };
    assert!(matches!(rational_counts(&d), Err(NormalFormError::NumericAngle(_))));
}

#[test]
fn stability_examples() {
    let s2 = Angle::Exact(Scalar::sqrt(2)).reduced().unwrap();
    let s3 = Angle::Exact(Scalar::sqrt(3)).reduced().unwrap();
    let d = NormalFormDescriptor { p_minus: 1, theta_list: vec![s2, s3], ..Default::default() };
    assert_eq!(classify_stability(&d, 3).unwrap(), Stability::IrrationallyElliptic);
    let d = NormalFormDescriptor { p_minus: 1, k: 2, ..Default::default() };
    assert_eq!(classify_stability(&d, 3).unwrap(), Stability::Hyperbolic);
    let d = NormalFormDescriptor { p_minus: 1, k: 1, theta_list: vec![quarter()], ..Default::default() };
    assert_eq!(classify_stability(&d, 3).unwrap(), Stability::Mixed);
    let d = NormalFormDescriptor { p_minus: 1, theta_list: vec![quarter()], ..Default::default() };
    assert_eq!(classify_stability(&d, 2).unwrap(), Stability::Elliptic);
}

#[test]
fn decompose_examples() {
    let (d, c) = decompose(&BasicForm::N1(1, 1).to_matrix().unwrap(), NUMERIC_TOL).unwrap();
    assert_eq!(d, NormalFormDescriptor { p_minus: 1, ..Default::default() });
    assert!(c.certain);
    let (d, _) = decompose(&SymplecticMatrix::identity(2), NUMERIC_TOL).unwrap();
    assert_eq!(d, NormalFormDescriptor { p_zero: 2, ..Default::default() });

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let target = NormalFormDescriptor { p_minus: 1, theta_list: vec![Angle::turns_pi(1, 3)], ..Default::default() };
    let p = random_symplectic_exact(&mut rng, 2, 4);
    let m = realize(&target).unwrap().conjugate_by(&p).unwrap();
    let (d, c) = decompose(&m, NUMERIC_TOL).unwrap();
    assert_eq!(d, target);
    assert!(c.certain, "{:?}", c.notes);
}

#[test]
fn decompose_round_trip_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let d = random_descriptor(&mut rng, 4, false);
        let p = random_symplectic_exact(&mut rng, d.n(), 2);
        let m = realize(&d).unwrap().conjugate_by(&p).unwrap();
        let (back, _) = decompose(&m, NUMERIC_TOL).unwrap_or_else(|e| panic!("{d:?}: {e}"));
        assert_eq!(fold_n2(&back), fold_n2(&d), "descriptor {d:?}");
        let re = realize(&back).unwrap();
        assert_eq!(re.elliptic_height().unwrap(), m.elliptic_height().unwrap());
        for (a, _) in d.minus_spectrum().unwrap() {
            assert_eq!(re.nullity_omega(&a).unwrap(), m.nullity_omega(&a).unwrap());
        }
    }
}

#[test]
fn decompose_numeric_irrational_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let d = random_descriptor(&mut rng, 4, true);
        let m = realize(&d).unwrap().to_numeric();
        let (back, _) = decompose(&m, NUMERIC_TOL).unwrap_or_else(|e| panic!("{d:?}: {e}"));
        let (a, b) = (fold_n2(&back), fold_n2(&d));
        assert_eq!(
            (a.p_minus, a.p_zero, a.p_plus, a.q_minus, a.q_zero, a.q_plus, a.k, a.hyperbolic_sign),
            (b.p_minus, b.p_zero, b.p_plus, b.q_minus, b.q_zero, b.q_plus, b.k, b.hyperbolic_sign)
        );
        for (x, y) in [(&a.theta_list, &b.theta_list), (&a.alpha_list, &b.alpha_list), (&a.beta_list, &b.beta_list)] {
            assert_eq!(x.len(), y.len(), "{d:?}");
            for (u, v) in x.iter().zip(y) {
                assert!((u.over_pi_f64() - v.over_pi_f64()).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn splitting_bounded_by_nullity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let d = random_descriptor(&mut rng, 4, false);
        let m = realize(&d).unwrap();
        for k in 0..24 {
            let a = Angle::turns_pi(k, 12);
            let (sp, sm) = splitting_numbers(&d, &a).unwrap();
            let nu = m.nullity_omega(&a).unwrap();
            assert!(sp <= nu && sm <= nu, "{d:?} at {a}");
            assert_eq!(splitting_numbers(&d, &a.conjugate()).unwrap(), (sm, sp));
        }
    }
}
