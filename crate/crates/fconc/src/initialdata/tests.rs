use super::*;
use proptest::prelude::*;
use std::f64::consts::PI;

const ORDER: usize = 64;

fn e1(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

/// k^2 int_{-1}^0 s^2 e^{ks} ds / int_{-1}^0 e^{ks} ds in closed form.
fn unit_face_ratio(k: f64) -> f64 {
    let num = 2.0 / k.powi(3) - (-k).exp() * (1.0 / k + 2.0 / (k * k) + 2.0 / k.powi(3));
    let den = (1.0 - (-k).exp()) / k;
    k * k * num / den
}

#[test]
fn thin_box_has_half_mass() {
    for n in 1..=3 {
        for ell in [0.1f64, 1.0, 7.5, 100.0] {
            let phi = make_thin_box(ell, n).unwrap();
            assert!((phi.mass() - 0.5).abs() < 1e-14, "n={n} ell={ell}");
            assert!((phi.quadrature_mass(ORDER) - 0.5).abs() < 1e-12);
            assert_eq!(phi.sup_norm(), ell);
            let (lo, hi) = phi.support_box();
            assert!((lo[0] + 0.5 / ell).abs() < 1e-15);
            assert!(hi.iter().all(|&h| h == 0.0));
        }
    }
}

#[test]
fn thin_box_rejects_bad_ell() {
    assert!(make_thin_box(0.0, 2).is_err());
    assert!(make_thin_box(-1.0, 2).is_err());
    assert!(make_thin_box(1.0, 0).is_err());
}

#[test]
fn box_eval_and_validation() {
    let phi = make_box(&[0.0, 0.0], &[1.0, 2.0], 3.0).unwrap();
    assert_eq!(phi.eval(&[0.5, 1.0]), 3.0);
    assert_eq!(phi.eval(&[1.5, 1.0]), 0.0);
    assert_eq!(phi.mass(), 6.0);
    assert!(make_box(&[0.0], &[0.0], 1.0).is_err());
    assert!(make_box(&[0.0], &[1.0], 0.0).is_err());
    assert!(make_box(&[0.0, 0.0], &[1.0], 1.0).is_err());
}

#[test]
fn ball_mass_matches_quadrature() {
    for (n, vol) in [(1, 2.0), (2, PI), (3, 4.0 * PI / 3.0)] {
        let c = vec![0.3; n];
        let phi = make_ball(&c, 1.5, 2.0).unwrap();
        let exact = 2.0 * vol * 1.5f64.powi(n as i32);
        assert!((phi.mass() - exact).abs() < 1e-12 * exact);
        let q = phi.quadrature_mass(ORDER);
        assert!((q - exact).abs() < 1e-10 * exact, "n={n}: {q} vs {exact}");
    }
}

#[test]
fn bump_mass_matches_quadrature() {
    // alpha = 1/2 gives (1 - rho^2)^2, alpha = 3 gives a cube-root rim
    for alpha in [0.5f64, 1.0, 3.0] {
        for n in 1..=3 {
            let phi = make_alpha_bump(&vec![0.0; n], 1.0, alpha, 1.0).unwrap();
            let q = phi.quadrature_mass(ORDER);
            let m = phi.mass();
            assert!((q - m).abs() < 1e-8 * m, "alpha={alpha} n={n}: {q} vs {m}");
        }
    }
    // 1-D, alpha = 1: int_{-1}^1 (1 - x^2) dx = 4/3
    let phi = make_alpha_bump(&[0.0f64], 1.0, 1.0, 1.0).unwrap();
    assert!((phi.mass() - 4.0 / 3.0).abs() < 1e-14);
    assert_eq!(phi.sup_norm(), 1.0);
}

#[test]
fn composites_keep_membership() {
    let a = make_box(&[0.0f64, 0.0], &[1.0, 1.0], 1.0).unwrap();
    let b = make_alpha_bump(&[2.0, 0.0], 0.5, 0.5, 2.0).unwrap();
    let s = sum(&scaled(&a, 3.0).unwrap(), &b).unwrap();
    assert!(s.flags().in_la && s.flags().in_l);
    assert!((s.mass() - (3.0 + b.mass())).abs() < 1e-13);
    assert_eq!(s.family().to_string(), "sum(3*box,alpha_bump(0.5))");
    assert!(scaled(&a, 0.0).is_err());
    assert!(sum(&a, &make_box(&[0.0], &[1.0], 1.0).unwrap()).is_err());
}

#[test]
fn overlapping_sum_sup_norm() {
    let a = make_box(&[0.0], &[2.0], 1.0).unwrap();
    let b = make_box(&[1.0], &[3.0], 1.0).unwrap();
    let s = sum(&a, &b).unwrap();
    assert_eq!(s.sup_norm(), 2.0);
}

#[test]
fn center_zeroes_first_moments_and_is_idempotent() {
    let a = make_box(&[0.0f64, 1.0], &[2.0, 4.0], 1.0).unwrap();
    let b = make_ball(&[5.0, -1.0], 1.0, 3.0).unwrap();
    let s = sum(&a, &b).unwrap();
    let c = center(&s);
    for m in c.quadrature_centroid(ORDER) {
        assert!(m.abs() < 1e-10, "{m}");
    }
    assert!((c.mass() - s.mass()).abs() < 1e-13);
    let cc = center(&c);
    for (p, q) in cc.pieces().iter().zip(c.pieces()) {
        assert_eq!(p, q);
    }
}

#[test]
fn box_face_ratio_near_two() {
    let phi = make_box(&[-1.0, -1.0], &[0.0, 0.0], 1.0).unwrap();
    let pairs = vec![(e1(2), vec![0.0, 0.0])];
    let rep = check_condition_a(&phi, &[100.0], &pairs, ORDER).unwrap();
    let r = rep.samples[0].ratio;
    assert!((r - unit_face_ratio(100.0)).abs() < 1e-10, "{r}");
    assert!((r - 2.0).abs() < 1e-3);
    // oracle agrees at moderate k where the exponential tail matters
    for k in [1.0, 3.0, 20.0, 1000.0] {
        let rep = check_condition_a(&phi, &[k], &pairs, ORDER).unwrap();
        let want = unit_face_ratio(k);
        assert!((rep.samples[0].ratio - want).abs() < 1e-9 * want, "k={k}");
    }
}

#[test]
fn default_pairs_pass_for_library_data() {
    let data = vec![
        make_box(&[-1.0, -2.0], &[1.0, 0.5], 1.0).unwrap(),
        make_thin_box(4.0, 2).unwrap(),
        make_ball(&[0.0, 0.0], 1.0, 1.0).unwrap(),
        make_alpha_bump(&[0.0, 0.0], 1.0, 0.5, 1.0).unwrap(),
        make_alpha_bump(&[0.0], 2.0, 2.0, 1.0).unwrap(),
    ];
    for phi in &data {
        let pairs = default_supporting_pairs(phi);
        let rep = check_condition_a(phi, &default_condition_a_k_grid(), &pairs, ORDER).unwrap();
        assert!(rep.pass, "{}: worst {:?}", phi.family(), rep.worst);
        assert!(rep.fitted_c.is_finite() && rep.fitted_c > 0.0);
    }
}

#[test]
fn ball_ratio_limit() {
    // near a smooth rim in 2-D the face is locally y1 ~ -|y2|^2/2: ratio -> 2 * 5/4 * ... bounded
    let phi = make_ball(&[0.0, 0.0], 1.0, 1.0).unwrap();
    let pairs = vec![(e1(2), vec![1.0, 0.0])];
    let rep = check_condition_a(&phi, &[1e3], &pairs, ORDER).unwrap();
    // the rim density of s is ~ sqrt(-s), so k^2 E[s^2] -> Gamma(7/2)/Gamma(3/2) = 15/4
    assert!((rep.samples[0].ratio - 3.75).abs() < 0.05, "{}", rep.samples[0].ratio);
}

#[test]
fn non_supporting_pair_rejected() {
    let phi = make_box(&[-1.0], &[0.0], 1.0).unwrap();
    let err = check_condition_a(&phi, &[10.0], &[(vec![1.0], vec![-0.5])], ORDER).unwrap_err();
    assert!(matches!(err, Error::NonSupporting(_)));
    assert!(check_condition_a(&phi, &[0.5], &[(vec![1.0], vec![0.0])], ORDER).is_err());
}

#[test]
fn touch_origin_normalization() {
    let phi = make_ball(&[3.0, 1.0], 0.5, 1.0).unwrap().touch_origin_along_e1();
    assert!(phi.support_value(&e1(2)).abs() < 1e-15);
}

#[test]
fn f32_datum() {
    let phi = make_thin_box(2.0f32, 2).unwrap();
    assert!((phi.quadrature_mass(32) - 0.5).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn scaling_is_linear_in_mass(c in 0.01f64..100.0, ell in 0.05f64..20.0) {
        let phi = make_thin_box(ell, 2).unwrap();
        let s = scaled(&phi, c).unwrap();
        prop_assert!((s.mass() - c * 0.5).abs() < 1e-12 * c);
    }

    #[test]
    fn ratio_is_translation_invariant(v0 in -5.0f64..5.0, v1 in -5.0f64..5.0, k in 1.0f64..300.0) {
        let phi = make_box(&[-1.0, -0.5], &[0.5, 0.5], 2.0).unwrap();
        let moved = phi.translated(&[v0, v1]);
        let pair = |d: &InitialDatum<f64>| {
            let xi = vec![1.0, 0.0];
            let s = d.support_value(&xi);
            vec![(xi, vec![s, 0.0])]
        };
        let a = check_condition_a(&phi, &[k], &pair(&phi), ORDER).unwrap();
        let b = check_condition_a(&moved, &[k], &pair(&moved), ORDER).unwrap();
        prop_assert!((a.samples[0].ratio - b.samples[0].ratio).abs() < 1e-8 * a.samples[0].ratio);
    }

    #[test]
    fn ratio_is_scale_free_in_amplitude(c in 0.01f64..100.0, k in 1.0f64..300.0) {
        let phi = make_alpha_bump(&[0.0, 0.0], 1.0, 0.7, 1.0).unwrap();
        let s = scaled(&phi, c).unwrap();
        let pairs = vec![(vec![0.0, 1.0], vec![0.0, 1.0])];
        let a = check_condition_a(&phi, &[k], &pairs, 32).unwrap();
        let b = check_condition_a(&s, &[k], &pairs, 32).unwrap();
        prop_assert!((a.samples[0].ratio - b.samples[0].ratio).abs() < 1e-10 * a.samples[0].ratio);
    }
}

#[test]
fn spec_box_examples() {
    assert_eq!(make_box(&[0.0f64, 0.0], &[1.0, 1.0], 1.0).unwrap().mass(), 1.0);
    assert_eq!(make_box(&[0.0f64], &[1.0], 3.0).unwrap().sup_norm(), 3.0);
    assert_eq!(make_box(&[-1.0f64, -1.0], &[0.0, 0.0], 2.0).unwrap().mass(), 2.0);
    let t = make_thin_box(8.0f64, 1).unwrap();
    let (lo, hi) = t.support_box();
    assert!((hi[0] - lo[0] - 1.0 / 16.0).abs() < 1e-15);
    let t = make_thin_box(0.5f64, 1).unwrap();
    assert_eq!(t.support_box().0, &[-1.0]);
    assert_eq!(t.sup_norm(), 0.5);
}

#[test]
fn spec_center_examples() {
    let c = center(&make_box(&[0.0f64], &[1.0], 1.0).unwrap());
    assert_eq!(c.support_box(), (&[-0.5][..], &[0.5][..]));
    let c = center(&make_thin_box(1.0f64, 1).unwrap());
    let (lo, hi) = c.support_box();
    assert!((lo[0] + 0.25).abs() < 1e-15 && (hi[0] - 0.25).abs() < 1e-15);
    for m in c.quadrature_centroid(ORDER) {
        assert!(m.abs() <= 1e-9);
    }
}

#[test]
fn thin_box_passes_condition_a() {
    let phi = make_thin_box(8.0f64, 2).unwrap();
    let xi = e1(2);
    let z = vec![phi.support_value(&xi), 0.0];
    let rep = check_condition_a(&phi, &default_condition_a_k_grid(), &[(xi, z)], ORDER).unwrap();
    assert!(rep.pass);
    let at_one = rep.samples.iter().find(|s| s.k == 1.0).unwrap();
    assert!(at_one.ratio <= rep.fitted_c);
}

#[test]
fn property_a2_and_a3() {
    let grid = default_condition_a_k_grid();
    let base = make_thin_box(8.0f64, 2).unwrap();
    for c in [2.0, 10.0] {
        let s = scaled(&base, c).unwrap();
        let rep = check_condition_a(&s, &grid, &default_supporting_pairs(&s), ORDER).unwrap();
        assert!(rep.pass);
    }
    let a = make_box(&[-1.0f64, -1.0], &[0.0, 0.0], 1.0).unwrap();
    let b = make_box(&[-0.5f64, -2.0], &[0.5, -0.5], 3.0).unwrap();
    let s = sum(&a, &b).unwrap();
    let rep = check_condition_a(&s, &grid, &default_supporting_pairs(&s), ORDER).unwrap();
    assert!(rep.pass, "{:?}", rep.worst);
}
