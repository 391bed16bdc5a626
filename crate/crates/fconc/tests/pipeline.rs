use fconc::checker::{concavity_at, SweepPolicy, Verdict};
use fconc::classify::{classify, Scenario};
use fconc::fconcavity::{make_power_concavity, make_power_log_concavity};
use fconc::initialdata::{check_condition_a, default_condition_a_k_grid, default_supporting_pairs, make_ball};
use fconc::{Datum, Ext, Field, Function, Transform};

#[test]
fn ball_datum_end_to_end() {
    let phi: Datum = make_ball(&[0.0, 0.0], 1.0, 0.5).unwrap();
    let rep = check_condition_a(&phi, &default_condition_a_k_grid(), &default_supporting_pairs(&phi), 64).unwrap();
    assert!(rep.pass);

    let f: Function = make_power_log_concavity(0.75).unwrap();
    assert_eq!(Transform::new(f.clone()).kappa(10.0).unwrap(), Ext::Finite(0.25));
    assert!(classify(&Scenario::new(f.clone(), 2, 0.0)).unwrap().is_yes());

    let field = Field::new(phi, 0.0, f.a(), 64).unwrap();
    let r = concavity_at(&field, &f, 100.0, &SweepPolicy::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn log_concavity_of_gaussian_smoothed_ball() {
    let f = make_power_concavity(0.0);
    let phi = make_ball(&[0.3, -0.2], 0.7, 1.0).unwrap();
    let field = Field::new(phi, 0.0, Ext::PosInf, 64).unwrap();
    for t in [0.05, 1.0, 20.0] {
        assert_eq!(concavity_at(&field, &f, t, &SweepPolicy::default()).unwrap().verdict, Verdict::Pass);
    }
}
