use super::*;
use crate::initialdata::{center, make_alpha_bump, make_ball, make_box, sum};
use crate::quadrature::rule;
use crate::special::erf;
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit_box_2d() -> InitialDatum<f64> {
    make_box(&[-0.5, -0.5], &[0.5, 0.5], 1.0).unwrap()
}

fn field(phi: InitialDatum<f64>, d: f64, a: Ext<f64>) -> HeatFlowField<f64> {
    HeatFlowField::new(phi, d, a, DEFAULT_ORDER).unwrap()
}

/// Composite Gauss-Legendre integral of f over [lo, hi].
fn integrate(lo: f64, hi: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let gl = rule(32);
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|k| gl.integrate(lo + h * k as f64, lo + h * (k + 1) as f64, &f))
        .sum()
}

#[test]
fn construction_rules() {
    let phi = unit_box_2d();
    assert!(HeatFlowField::new(phi.clone(), 1.0, Ext::Finite(1.0), 64).is_err());
    assert!(HeatFlowField::new(phi.clone(), 1.0, Ext::Finite(1.5), 64).is_ok());
    assert!(HeatFlowField::new(phi.clone(), 0.5, Ext::Finite(1.0), 64).is_ok());
    assert!(HeatFlowField::new(phi.clone(), 0.5, Ext::Finite(-1.0), 64).is_err());
    assert!(HeatFlowField::new(phi, 0.5, Ext::PosInf, 1).is_err());
}

#[test]
fn w_tends_to_mass_over_a() {
    let phi = center(&make_box(&[0.0, 0.0], &[2.0, 1.0], 1.5).unwrap());
    for a in [Ext::PosInf, Ext::Finite(4.0)] {
        let f = field(phi.clone(), 0.5, a);
        let a_val = match a {
            Ext::Finite(v) => v,
            _ => 1.0,
        };
        let w = f.eval_w(&[0.3, -0.2], 1e6).unwrap();
        assert!((w - 3.0 / a_val).abs() < 1e-3 * 3.0 / a_val, "{w}");
    }
}

#[test]
fn w_at_origin_gaussian_integral() {
    let phi = make_box(&[-1.0], &[1.0], 1.0).unwrap();
    let f = field(phi, 0.0, Ext::Finite(1.0));
    for t in [1e-3, 0.01, 0.5, 1.0, 30.0, 1e4] {
        let want = 2.0 * (PI * t).sqrt() * erf(1.0 / (2.0 * t.sqrt()));
        let got = f.eval_w(&[0.0], t).unwrap();
        assert!((got - want).abs() < 1e-10 * want, "t={t}: {got} vs {want}");
    }
}

#[test]
fn log_w_upper_bound() {
    let phi = make_box(&[-1.0, -0.5], &[0.5, 1.0], 2.0).unwrap();
    let f = field(phi.clone(), 0.5, Ext::Finite(3.0));
    let c1 = (phi.mass() / 3.0).ln();
    for t in [1.5, 10.0, 100.0] {
        for &x0 in &[-20.0, -3.0, 0.0, 2.0, 50.0] {
            for &x1 in &[-7.0, 0.0, 4.0] {
                let x = [x0, x1];
                let sup = phi.support_value(&x);
                let lw = f.eval_log_w(&x, t).unwrap();
                assert!(lw <= sup / (2.0 * t) + c1 + 1e-12, "x={x:?} t={t}");
            }
        }
    }
}

#[test]
fn critical_d_bounded_by_mass() {
    let phi = unit_box_2d();
    let f = field(phi, 1.0, Ext::Finite(2.0));
    for t in [0.01, 0.1, 1.0, 10.0] {
        for x0 in [-2.0, 0.0, 0.3, 1.0] {
            let u = f.eval_u(&[x0, 0.1], t).unwrap();
            assert!(u <= 1.0 + 1e-12, "{u}");
        }
    }
}

#[test]
fn gaussian_profile_at_parabolic_scale() {
    let phi = center(&make_box(&[0.0], &[1.0], 1.0).unwrap());
    let f = field(phi, 0.5, Ext::PosInf);
    let t: f64 = 1e4;
    let u = f.eval_u(&[2.0 * t.sqrt()], t).unwrap();
    assert!((u - (-1.0f64).exp()).abs() < 0.01 * (-1.0f64).exp(), "{u}");
    // oracle: (4 pi t)^{1/2 - 1/2} e^{t Lap} chi = oracle itself times (4 pi t)^{1/2}... d = 1/2 = n/2
    let want = heat_1d_box_oracle(2.0 * t.sqrt(), t, -0.5, 0.5) * (4.0 * PI * t).sqrt();
    assert!((u - want).abs() < 1e-9 * want);
}

#[test]
fn subcritical_sup_decays() {
    let phi = unit_box_2d();
    let f = field(phi, 0.5, Ext::PosInf);
    let sup = |t: f64| {
        let mut m = 0.0f64;
        for i in -4..=4 {
            for j in -4..=4 {
                let x = [i as f64 * 0.25, j as f64 * 0.25];
                m = m.max(f.eval_u(&x, t).unwrap());
            }
        }
        m
    };
    let values: Vec<f64> = [1.0, 3.0, 10.0, 30.0].iter().map(|&t| sup(t)).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn moments_at_large_time() {
    let phi = unit_box_2d();
    let f = field(phi.clone(), 0.5, Ext::Finite(2.0));
    let xi = [1.0, 0.0];
    let m0 = f.moment(&[0.0, 0.0], 1e6, &xi, 0).unwrap();
    assert_eq!(m0, f.eval_w(&[0.0, 0.0], 1e6).unwrap());
    let m1 = f.moment(&[0.0, 0.0], 1e6, &xi, 1).unwrap();
    assert!(m1.abs() <= 1e-6 * phi.mass());
    let m2 = f.moment(&[0.0, 0.0], 1e6, &xi, 2).unwrap();
    assert!((m2 - 1.0 / 24.0).abs() < 1e-6, "{m2}");
    assert!(f.moment(&[0.0, 0.0], 1.0, &xi, 3).is_err());
}

#[test]
fn t_times_dlogw_bounded() {
    let phi = make_box(&[-1.0, 0.0], &[0.5, 1.0], 1.0).unwrap();
    let f = field(phi, 0.0, Ext::PosInf);
    let xi = [0.6, 0.8];
    let mut per_t = Vec::new();
    for t in [1.0, 10.0, 100.0, 1000.0] {
        let mut m = 0.0f64;
        for x0 in [-5.0, 0.0, 5.0] {
            for x1 in [-5.0, 0.0, 5.0] {
                m = m.max(t * f.dlogw(&[x0, x1], t, &xi).unwrap().abs());
            }
        }
        per_t.push(m);
    }
    // |<xi, y>| <= 1 on the support, so t |dlogw| <= 1/2
    assert!(per_t.iter().all(|&m| m <= 0.5 + 1e-12), "{per_t:?}");
}

#[test]
fn derivatives_match_finite_differences() {
    let phi = sum(
        &unit_box_2d(),
        &make_ball(&[1.0, 0.5], 0.7, 2.0).unwrap(),
    )
    .unwrap();
    let f = field(phi, 0.5, Ext::PosInf);
    let t = 2.0;
    for xi in [[1.0, 0.0], [0.6, -0.8]] {
        let x = [1.0, 0.0];
        let at = |s: f64| f.eval_log_w(&[x[0] + s * xi[0], x[1] + s * xi[1]], t).unwrap();
        let h = 1e-4;
        let fd1 = (at(h) - at(-h)) / (2.0 * h);
        let d1 = f.dlogw(&x, t, &xi).unwrap();
        assert!((d1 - fd1).abs() < 1e-6, "{d1} vs {fd1}");
        let h = 1e-3;
        let fd2 = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
        let d2 = f.d2logw(&x, t, &xi).unwrap();
        assert!((d2 - fd2).abs() < 1e-6, "{d2} vs {fd2}");
        let j = f.jet(&x, t, &xi).unwrap();
        let v = |s: f64| f.eval_v(&[x[0] + s * xi[0], x[1] + s * xi[1]], t).unwrap();
        assert!((j.dv - (v(1e-4) - v(-1e-4)) / 2e-4).abs() < 1e-6);
        assert!((j.d2v - (v(h) - 2.0 * v(0.0) + v(-h)) / (h * h)).abs() < 1e-5);
    }
}

#[test]
fn face_normal_ray_second_derivative() {
    let phi = unit_box_2d();
    let f = field(phi, 0.5, Ext::PosInf);
    let xi = [1.0, 0.0];
    for t in [1.0, 10.0, 100.0, 1e3] {
        for c in [2.0, 4.0, 10.0] {
            let x_big = c * t;
            let d2 = f.d2logw(&[x_big, 0.0], t, &xi).unwrap();
            let scaled = x_big * x_big * d2;
            assert!((-1e-9..=1.5).contains(&scaled), "t={t} X={x_big}: {scaled}");
        }
    }
}

#[test]
fn oracle_examples() {
    assert!((heat_1d_box_oracle(0.5, 1e-8, 0.0, 1.0) - 1.0).abs() < 1e-12);
    for t in [0.01f64, 1.0, 100.0] {
        let s = 14.0 * t.sqrt() + 1.0;
        let total = integrate(-s, 1.0 + s, 64, |x| heat_1d_box_oracle(x, t, 0.0, 1.0));
        assert!((total - 1.0).abs() < 1e-8, "t={t}: {total}");
    }
}

#[test]
fn oracle_matches_field() {
    let phi = make_box(&[-0.3], &[1.2], 1.0).unwrap();
    let f = field(phi, 0.0, Ext::PosInf);
    for t in [0.01, 0.3, 1.0, 10.0, 1e3] {
        for x in [-6.0, -1.0, -0.3, 0.0, 0.45, 1.0, 1.2, 2.5, 8.0] {
            let want = heat_1d_box_oracle(x, t, -0.3, 1.2);
            let got = f.eval_u(&[x], t).unwrap();
            assert!((got - want).abs() <= 1e-8 * want, "x={x} t={t}: {got} vs {want}");
        }
    }
}

#[test]
fn two_forms_agree() {
    let data = vec![
        unit_box_2d(),
        make_ball(&[0.2, -0.1], 0.8, 1.3).unwrap(),
        make_alpha_bump(&[0.0, 0.0], 1.0, 0.5, 1.0).unwrap(),
        make_alpha_bump(&[0.0], 1.0, 2.0, 1.0).unwrap(),
        make_box(&[-1.0, -1.0, -1.0], &[0.0, 0.5, 1.0], 1.0).unwrap(),
    ];
    for phi in data {
        let n = phi.n();
        let f = field(phi, 0.25, Ext::PosInf);
        for t in [0.05, 1.0, 20.0] {
            for s in [-3.0, 0.0, 0.4, 2.0] {
                let x: Vec<f64> = (0..n).map(|i| s * (1.0 - 0.3 * i as f64)).collect();
                let a = f.eval_u(&x, t).unwrap();
                let b = f.eval_u_direct(&x, t).unwrap();
                assert!((a - b).abs() < 1e-9 * a, "n={n} x={x:?} t={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn mass_conservation() {
    let one = make_box(&[-0.5], &[1.0], 2.0).unwrap();
    let two = make_box(&[-0.5, 0.0], &[0.5, 2.0], 1.0).unwrap();
    let f1 = field(one.clone(), 0.0, Ext::PosInf);
    let f2 = field(two.clone(), 0.0, Ext::PosInf);
    let gl = rule(24);
    for t in [0.1f64, 1.0, 10.0, 100.0] {
        let s = 12.0 * t.sqrt() + 1.0;
        let m1 = integrate(-0.5 - s, 1.0 + s, 32, |x| f1.eval_u(&[x], t).unwrap());
        assert!((m1 - one.mass()).abs() < 1e-6 * one.mass(), "t={t}: {m1}");
        // 2-D by a tensor rule on 8 panels per axis
        let panels = 8;
        let axis = |lo: f64, hi: f64| {
            let h = (hi - lo) / panels as f64;
            let mut ys = Vec::new();
            let mut ws = Vec::new();
            for k in 0..panels {
                let (y, w) = gl.mapped(lo + h * k as f64, lo + h * (k + 1) as f64);
                ys.extend(y);
                ws.extend(w);
            }
            (ys, ws)
        };
        let (xs, wx) = axis(-0.5 - s, 0.5 + s);
        let (ys, wy) = axis(-s, 2.0 + s);
        let mut m2 = 0.0;
        for (x, a) in xs.iter().zip(&wx) {
            for (y, b) in ys.iter().zip(&wy) {
                m2 += a * b * f2.eval_u(&[*x, *y], t).unwrap();
            }
        }
        assert!((m2 - two.mass()).abs() < 1e-6 * two.mass(), "t={t}: {m2}");
    }
}

#[test]
fn oracle_semigroup() {
    for (s, t) in [(0.5, 1.0), (2.0, 0.1), (10.0, 3.0)] {
        for x in [-2.0, 0.3, 1.0, 4.0] {
            let width = 14.0 * f64::sqrt(s + t) + 2.0;
            let conv = integrate(x - width, x + width, 64, |y| {
                (-(x - y) * (x - y) / (4.0 * s)).exp() / (4.0 * PI * s).sqrt()
                    * heat_1d_box_oracle(y, t, 0.0, 1.0)
            });
            let want = heat_1d_box_oracle(x, s + t, 0.0, 1.0);
            assert!((conv - want).abs() < 1e-7, "s={s} t={t} x={x}");
        }
    }
}

#[test]
fn coercive_along_rays() {
    let phi = make_ball(&[0.0, 0.0], 1.0, 1.0).unwrap();
    let f = field(phi, 0.5, Ext::PosInf);
    for dir in [[1.0, 0.0], [0.6, 0.8], [-1.0, 0.0]] {
        let vs: Vec<f64> = (2..40)
            .map(|k| {
                let r = k as f64;
                f.eval_v(&[r * dir[0], r * dir[1]], 1.0).unwrap()
            })
            .collect();
        assert!(vs.windows(2).all(|w| w[1] > w[0]));
        assert!(*vs.last().unwrap() > 100.0);
    }
}

#[test]
fn critical_floor() {
    let phi = unit_box_2d();
    let f = field(phi, 1.0, Ext::Finite(2.0));
    let floor = -(0.5f64).ln();
    for t in [0.01, 0.1, 1.0, 100.0, 1e5] {
        for x in [[0.0, 0.0], [0.4, -0.4], [3.0, 1.0]] {
            let v = f.eval_v(&x, t).unwrap();
            assert!(v >= floor - 1e-12, "{v}");
        }
    }
}

#[test]
fn above_cap_signalled() {
    let f = field(unit_box_2d(), 0.0, Ext::Finite(0.5));
    let err = f.eval_v(&[0.0, 0.0], 0.01).unwrap_err();
    assert!(matches!(err, Error::AboveCap { .. }));
    assert!(f.eval_u_direct(&[0.0, 0.0], 0.01).is_err());
    // far away the value is small and allowed
    assert!(f.eval_v(&[5.0, 0.0], 0.01).unwrap() > 0.0);
    // jet() itself does not check
    assert!(f.jet(&[0.0, 0.0], 0.01, &[1.0, 0.0]).is_ok());
    assert!(f.jet_checked(&[0.0, 0.0], 0.01, &[1.0, 0.0]).is_err());
}

#[test]
fn overflow_only_without_shift() {
    let f = field(unit_box_2d(), 0.5, Ext::PosInf);
    let x = [4000.0, 0.0];
    assert!(f.eval_log_w(&x, 1.0).unwrap().is_finite());
    let raw = f.clone().without_max_shift();
    assert!(matches!(raw.eval_log_w(&x, 1.0), Err(Error::Overflow)));
    let small = [0.3, 0.1];
    let a = f.eval_log_w(&small, 1.0).unwrap();
    let b = raw.eval_log_w(&small, 1.0).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn order_doubling_is_stable() {
    let phi = sum(&unit_box_2d(), &make_alpha_bump(&[1.5, 0.0], 0.5, 0.7, 1.0).unwrap()).unwrap();
    let f = field(phi, 0.5, Ext::PosInf);
    let g = f.with_order(128);
    for t in [0.01, 1.0, 100.0] {
        for x in [[0.0, 0.0], [30.0, 1.0], [-2.0, 5.0]] {
            let a = f.jet(&x, t, &[1.0, 0.0]).unwrap();
            let b = g.jet(&x, t, &[1.0, 0.0]).unwrap();
            assert!((a.log_w - b.log_w).abs() < 1e-10 * (1.0 + a.log_w.abs()));
            assert!((a.d2v - b.d2v).abs() < 1e-8 * (1.0 + a.d2v.abs()));
        }
    }
}

#[test]
fn bad_arguments() {
    let f = field(unit_box_2d(), 0.5, Ext::PosInf);
    assert!(f.eval_w(&[0.0], 1.0).is_err());
    assert!(f.eval_w(&[0.0, 0.0], 0.0).is_err());
    assert!(f.eval_w(&[0.0, 0.0], -1.0).is_err());
}

#[test]
fn f32_field() {
    let phi = make_box(&[-1.0f32], &[1.0], 1.0).unwrap();
    let f = HeatFlowField::new(phi, 0.0f32, Ext::PosInf, 32).unwrap();
    let got = f.eval_w(&[0.0], 1.0).unwrap() as f64;
    let want = 2.0 * PI.sqrt() * erf(0.5);
    assert!((got - want).abs() < 1e-5 * want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_w_is_convex_and_dlogw_bounded(x0 in -20.0f64..20.0, x1 in -20.0f64..20.0,
                                          t in 0.01f64..100.0, th in 0.0f64..6.3) {
        let phi = make_box(&[-1.0, 0.0], &[0.5, 2.0], 1.0).unwrap();
        let f = field(phi.clone(), 0.5, Ext::PosInf);
        let xi = [th.cos(), th.sin()];
        let j = f.jet(&[x0, x1], t, &xi).unwrap();
        prop_assert!(j.d2logw >= 0.0);
        let hi = phi.support_value(&xi);
        let lo = -phi.support_value(&[-xi[0], -xi[1]]);
        let mean = 2.0 * t * j.dlogw;
        prop_assert!(mean >= lo - 1e-9 && mean <= hi + 1e-9);
    }

    #[test]
    fn shift_covariance(s in -5.0f64..5.0, x0 in -3.0f64..3.0, t in 0.05f64..20.0) {
        // translating phi and x together leaves U unchanged
        let phi = make_box(&[-1.0], &[0.5], 1.0).unwrap();
        let moved = phi.translated(&[s]);
        let f = field(phi, 0.0, Ext::PosInf);
        let g = field(moved, 0.0, Ext::PosInf);
        let a = f.eval_u(&[x0], t).unwrap();
        let b = g.eval_u(&[x0 + s], t).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * a);
    }
}

#[test]
fn full_moments_match_directional_jets() {
    let phi = sum(
        &make_box(&[-1.0, 0.0], &[0.5, 1.0], 1.0).unwrap(),
        &make_alpha_bump(&[1.0, -0.5], 0.8, 0.6, 2.0).unwrap(),
    )
    .unwrap();
    let f = field(phi, 0.5, Ext::PosInf);
    for t in [0.05, 1.0, 40.0] {
        for x in [[0.0, 0.0], [3.0, -2.0], [-0.5, 8.0]] {
            let full = f.full_moments(&x, t).unwrap();
            for th in [0.0f64, 0.7, 2.0, 3.0] {
                let xi = [th.cos(), th.sin()];
                let a = f.jet(&x, t, &xi).unwrap();
                let b = f.jet_from(&full, &x, t, &xi);
                assert!((a.log_w - b.log_w).abs() < 1e-12 * (1.0 + a.log_w.abs()));
                assert!((a.dv - b.dv).abs() < 1e-10 * (1.0 + a.dv.abs()));
                assert!((a.d2v - b.d2v).abs() < 1e-9 * (1.0 + a.d2v.abs()), "{a:?} {b:?}");
            }
        }
    }
}
