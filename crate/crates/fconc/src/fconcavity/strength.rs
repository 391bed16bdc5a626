use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;

use super::function::AdmissibleFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strength {
    F1Stronger,
    F2Stronger,
    Equivalent,
    Incomparable,
}

impl std::fmt::Display for Strength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strength::F1Stronger => "F1_stronger",
            Strength::F2Stronger => "F2_stronger",
            Strength::Equivalent => "equivalent",
            Strength::Incomparable => "incomparable",
        })
    }
}

const REL_TOL: f64 = 1e-8;
/// |r| cap on the mirrored grid used for functions on [0, inf).
const R_CAP_INFINITE: f64 = 50.0;

fn verdict(f1_ge: bool, f2_ge: bool) -> Strength {
    match (f1_ge, f2_ge) {
        (true, true) => Strength::Equivalent,
        (true, false) => Strength::F1Stronger,
        (false, true) => Strength::F2Stronger,
        (false, false) => Strength::Incomparable,
    }
}

fn sample_points<S: Scalar>(
    f1: &AdmissibleFunction<S>,
    f2: &AdmissibleFunction<S>,
    grid: &[f64],
) -> Result<Vec<f64>> {
    match (f1.a(), f2.a()) {
        (Ext::Finite(_), Ext::Finite(_)) => {
            let mut pts: Vec<f64> = grid.iter().copied().filter(|&r| r > 0.0).collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            Ok(pts)
        }
        (Ext::PosInf, Ext::PosInf) => {
            let mut pts: Vec<f64> = grid
                .iter()
                .copied()
                .filter(|&r| r > 0.0 && r <= R_CAP_INFINITE)
                .flat_map(|r| [r, -r])
                .chain(std::iter::once(0.0))
                .collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            Ok(pts)
        }
        (a1, a2) => Err(Error::IncompatibleIntervals(format!(
            "{} on [0,{a1}) vs {} on [0,{a2})",
            f1.name(),
            f2.name()
        ))),
    }
}

/// Chord slopes of the curve (s_i, g_i) are nonincreasing in s within a relative tolerance.
fn chords_concave(points: &mut [(f64, f64)]) -> bool {
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let slopes: Vec<f64> = points
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    slopes
        .windows(2)
        .all(|m| m[1] - m[0] <= REL_TOL * (m[0].abs() + m[1].abs()))
}

/// Composition route: F2 is stronger iff F1 o f_{F2} is concave on J_{F2}.
/// Sampled along r, the curve is (F2(r), F1(r)).
pub fn composition_route<S: Scalar>(
    f1: &AdmissibleFunction<S>,
    f2: &AdmissibleFunction<S>,
    grid: &[f64],
) -> Result<Strength> {
    let pts = sample_points(f1, f2, grid)?;
    let mut pairs = Vec::with_capacity(pts.len());
    for &r in &pts {
        let p1 = f1.profile(S::lit(r))?.0.as_f64();
        let p2 = f2.profile(S::lit(r))?.0.as_f64();
        if p1.is_finite() && p2.is_finite() {
            pairs.push((p1, p2));
        }
    }
    let mut one_of_two: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
    let mut two_of_one = pairs.clone();
    let f2_ge = chords_concave(&mut one_of_two);
    let f1_ge = chords_concave(&mut two_of_one);
    Ok(verdict(f1_ge, f2_ge))
}

/// Curvature route, stated for every anchor through rho = -F''/F' = kappa/r,
/// which is monotone in F''/F' for any sign of r.
pub fn kappa_route<S: Scalar>(
    f1: &AdmissibleFunction<S>,
    f2: &AdmissibleFunction<S>,
    grid: &[f64],
) -> Result<Strength> {
    let pts = sample_points(f1, f2, grid)?;
    let mut f1_ge = true;
    let mut f2_ge = true;
    for &r in &pts {
        let (_, a1, b1) = f1.profile(S::lit(r))?;
        let (_, a2, b2) = f2.profile(S::lit(r))?;
        let rho1 = rho(f1, S::lit(r), a1, b1);
        let rho2 = rho(f2, S::lit(r), a2, b2);
        if !(rho1.is_finite() && rho2.is_finite()) {
            continue;
        }
        let tol = REL_TOL * (rho1.abs() + rho2.abs()) + 1e-14;
        if rho1 < rho2 - tol {
            f1_ge = false;
        }
        if rho2 < rho1 - tol {
            f2_ge = false;
        }
    }
    Ok(verdict(f1_ge, f2_ge))
}

fn rho<S: Scalar>(f: &AdmissibleFunction<S>, r: S, d1: S, d2: S) -> f64 {
    // the closed-form kappa avoids cancellation in F'' for the families
    if r > S::zero() {
        if let Some(k) = f.kappa_direct(r) {
            return (k / r).as_f64();
        }
    }
    (-d2 / d1).as_f64()
}

pub fn compare_strength<S: Scalar>(
    f1: &AdmissibleFunction<S>,
    f2: &AdmissibleFunction<S>,
    grid: &[f64],
) -> Result<Strength> {
    let composition = composition_route(f1, f2, grid)?;
    if f1.is_c2() && f2.is_c2() {
        let kappa = kappa_route(f1, f2, grid)?;
        if kappa != composition {
            return Err(Error::RouteDisagreement {
                composition: composition.to_string(),
                kappa: kappa.to_string(),
            });
        }
    }
    Ok(composition)
}

/// Default k grid: fractions of a, or powers of ten around 1 when a = inf.
pub fn default_k_grid<S: Scalar>(f: &AdmissibleFunction<S>) -> Vec<f64> {
    match f.a() {
        Ext::Finite(a) => [0.01, 0.1, 0.5, 0.9, 0.99]
            .iter()
            .map(|c| c * a.as_f64())
            .collect(),
        _ => vec![0.01, 0.1, 1.0, 10.0, 100.0],
    }
}

pub fn default_preservation_r_grid() -> Vec<f64> {
    crate::grid::uniform(0.0, 8.0, 401)
}

/// First point where r -> F(k e^{-r^2}) fails the chord-slope concavity test:
/// (k, r, slope increase).
pub fn preservation_witness<S: Scalar>(
    f: &AdmissibleFunction<S>,
    k_grid: &[f64],
    r_grid: &[f64],
) -> Result<Option<(f64, f64, f64)>> {
    let anchor = f.anchor().as_f64();
    for &k in k_grid {
        if let Ext::Finite(a) = f.a() {
            if !(k > 0.0 && k < a.as_f64()) {
                return Err(Error::InvalidParameter(format!("k={k} outside (0,a)")));
            }
        }
        let shift = (anchor / k).ln();
        let vals: Vec<(f64, f64)> = r_grid
            .iter()
            .map(|&r| Ok((r, f.profile(S::lit(r * r + shift))?.0.as_f64())))
            .collect::<Result<_>>()?;
        let slopes: Vec<(f64, f64)> = vals
            .windows(2)
            .map(|w| (w[0].0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
            .collect();
        let scale = slopes.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
        for w in slopes.windows(2) {
            let rise = w[1].1 - w[0].1;
            if rise > 1e-9 * scale + 1e-13 {
                return Ok(Some((k, w[1].0, rise)));
            }
        }
    }
    Ok(None)
}

/// Necessary condition for preservation by the heat flow (concavity of r -> F(k e^{-r^2})).
pub fn preservation_necessary<S: Scalar>(
    f: &AdmissibleFunction<S>,
    k_grid: &[f64],
    r_grid: &[f64],
) -> Result<bool> {
    Ok(preservation_witness(f, k_grid, r_grid)?.is_none())
}
