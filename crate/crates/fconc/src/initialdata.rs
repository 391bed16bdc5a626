//! Compactly supported initial data built from boxes, balls and alpha-concave bumps.

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{self, rule, Tilted};
use crate::scalar::Scalar;
use crate::special::{ln_gamma, unit_ball_volume};

/// Log mass, mean vector and covariance matrix of a tilted measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FullTilted<S> {
    pub log_mass: S,
    pub mean: Vec<S>,
    pub cov: Vec<Vec<S>>,
}

impl<S: Scalar> FullTilted<S> {
    /// Reduce to the statistic <xi, y>.
    pub fn along(&self, xi: &[S]) -> Tilted<S> {
        let mean = dot(&self.mean, xi);
        let mut var = S::zero();
        for (i, row) in self.cov.iter().enumerate() {
            var = var + xi[i] * dot(row, xi);
        }
        Tilted {
            log_mass: self.log_mass,
            mean,
            var: var.max(S::zero()),
        }
    }

    fn mixture(parts: &[FullTilted<S>]) -> FullTilted<S> {
        if parts.len() == 1 {
            return parts[0].clone();
        }
        let n = parts[0].mean.len();
        let shift = parts.iter().map(|p| p.log_mass).fold(S::neg_infinity(), S::max);
        let ps: Vec<S> = parts.iter().map(|p| (p.log_mass - shift).exp()).collect();
        let total = ps.iter().fold(S::zero(), |a, b| a + *b);
        let mut mean = vec![S::zero(); n];
        for (p, w) in parts.iter().zip(&ps) {
            for i in 0..n {
                mean[i] = mean[i] + *w * p.mean[i] / total;
            }
        }
        let mut cov = vec![vec![S::zero(); n]; n];
        for (p, w) in parts.iter().zip(&ps) {
            let f = *w / total;
            for i in 0..n {
                for j in 0..n {
                    let c = (p.mean[i] - mean[i]) * (p.mean[j] - mean[j]);
                    cov[i][j] = cov[i][j] + f * (p.cov[i][j] + c);
                }
            }
        }
        FullTilted {
            log_mass: shift + total.ln(),
            mean,
            cov,
        }
    }
}

/// Exponent spread handled by one Gauss-Legendre panel before subdividing.
pub const PANEL_SPREAD: f64 = 40.0;
const MAX_PANELS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Piece<S> {
    Box { lo: Vec<S>, hi: Vec<S>, amp: S },
    Ball { center: Vec<S>, radius: S, amp: S },
    /// amp * (1 - |x - c|^2/R^2)_+^{1/alpha}, which is alpha-concave.
    Bump { center: Vec<S>, radius: S, alpha: S, amp: S },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatumFamily {
    Box,
    ThinBox { ell: f64 },
    Ball,
    AlphaBump { alpha: f64 },
    Scaled { factor: f64, inner: Box<DatumFamily> },
    Sum(Vec<DatumFamily>),
    Translated(Box<DatumFamily>),
}

impl fmt::Display for DatumFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatumFamily::Box => write!(f, "box"),
            DatumFamily::ThinBox { ell } => write!(f, "thin_box({ell})"),
            DatumFamily::Ball => write!(f, "ball"),
            DatumFamily::AlphaBump { alpha } => write!(f, "alpha_bump({alpha})"),
            DatumFamily::Scaled { factor, inner } => write!(f, "{factor}*{inner}"),
            DatumFamily::Sum(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "sum({})", names.join(","))
            }
            DatumFamily::Translated(inner) => write!(f, "translated({inner})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassFlags {
    pub in_l: bool,
    pub in_la: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialDatum<S> {
    n: usize,
    pieces: Vec<Piece<S>>,
    family: DatumFamily,
    flags: ClassFlags,
    mass: S,
    sup_norm: S,
    support_lo: Vec<S>,
    support_hi: Vec<S>,
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {n}")))
    }
}

pub fn make_box<S: Scalar>(lo: &[S], hi: &[S], amplitude: S) -> Result<InitialDatum<S>> {
    check_dim(lo.len())?;
    if lo.len() != hi.len() {
        return Err(Error::InvalidParameter("lo and hi differ in dimension".into()));
    }
    if lo.iter().zip(hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
        return Err(Error::InvalidParameter("degenerate box: need lo < hi componentwise".into()));
    }
    if !(amplitude > S::zero()) || !amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!("amplitude must be positive, got {amplitude}")));
    }
    Ok(InitialDatum::assemble(
        vec![Piece::Box {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            amp: amplitude,
        }],
        DatumFamily::Box,
        true,
    ))
}

/// phi_ell = ell * indicator of (-1/(2 ell), 0) x (-1, 0)^{n-1}; mass 1/2.
pub fn make_thin_box<S: Scalar>(ell: S, n: usize) -> Result<InitialDatum<S>> {
    check_dim(n)?;
    if !(ell > S::zero()) || !ell.is_finite() {
        return Err(Error::InvalidParameter(format!("ell must be positive, got {ell}")));
    }
    let mut lo = vec![-S::one(); n];
    lo[0] = -S::one() / (S::lit(2.0) * ell);
    let hi = vec![S::zero(); n];
    let mut d = make_box(&lo, &hi, ell)?;
    d.family = DatumFamily::ThinBox { ell: ell.as_f64() };
    Ok(d)
}

pub fn make_ball<S: Scalar>(center: &[S], radius: S, amplitude: S) -> Result<InitialDatum<S>> {
    check_dim(center.len())?;
    if !(radius > S::zero()) || !(amplitude > S::zero()) {
        return Err(Error::InvalidParameter("radius and amplitude must be positive".into()));
    }
    Ok(InitialDatum::assemble(
        vec![Piece::Ball {
            center: center.to_vec(),
            radius,
            amp: amplitude,
        }],
        DatumFamily::Ball,
        true,
    ))
}

pub fn make_alpha_bump<S: Scalar>(
    center: &[S],
    radius: S,
    alpha: S,
    amplitude: S,
) -> Result<InitialDatum<S>> {
    check_dim(center.len())?;
    if !(radius > S::zero()) || !(amplitude > S::zero()) || !(alpha > S::zero()) {
        return Err(Error::InvalidParameter(
            "radius, alpha and amplitude must be positive".into(),
        ));
    }
    Ok(InitialDatum::assemble(
        vec![Piece::Bump {
            center: center.to_vec(),
            radius,
            alpha,
            amp: amplitude,
        }],
        DatumFamily::AlphaBump {
            alpha: alpha.as_f64(),
        },
        true,
    ))
}

/// c * phi, c > 0. Membership in L_A is kept (property (A2)).
pub fn scaled<S: Scalar>(phi: &InitialDatum<S>, c: S) -> Result<InitialDatum<S>> {
    if !(c > S::zero()) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {c}")));
    }
    let pieces = phi
        .pieces
        .iter()
        .map(|p| match p {
            Piece::Box { lo, hi, amp } => Piece::Box {
                lo: lo.clone(),
                hi: hi.clone(),
                amp: *amp * c,
            },
            Piece::Ball { center, radius, amp } => Piece::Ball {
                center: center.clone(),
                radius: *radius,
                amp: *amp * c,
            },
            Piece::Bump {
                center,
                radius,
                alpha,
                amp,
            } => Piece::Bump {
                center: center.clone(),
                radius: *radius,
                alpha: *alpha,
                amp: *amp * c,
            },
        })
        .collect();
    Ok(InitialDatum::assemble(
        pieces,
        DatumFamily::Scaled {
            factor: c.as_f64(),
            inner: Box::new(phi.family.clone()),
        },
        phi.flags.in_la,
    ))
}

/// phi1 + phi2. Membership in L_A is kept when both are members (property (A3)).
pub fn sum<S: Scalar>(a: &InitialDatum<S>, b: &InitialDatum<S>) -> Result<InitialDatum<S>> {
    if a.n != b.n {
        return Err(Error::InvalidParameter("summands differ in dimension".into()));
    }
    let mut pieces = a.pieces.clone();
    pieces.extend(b.pieces.iter().cloned());
    Ok(InitialDatum::assemble(
        pieces,
        DatumFamily::Sum(vec![a.family.clone(), b.family.clone()]),
        a.flags.in_la && b.flags.in_la,
    ))
}

impl<S: Scalar> Piece<S> {
    fn translate(&self, v: &[S]) -> Self {
        let add = |p: &Vec<S>| p.iter().zip(v).map(|(a, b)| *a + *b).collect::<Vec<S>>();
        match self {
            Piece::Box { lo, hi, amp } => Piece::Box {
                lo: add(lo),
                hi: add(hi),
                amp: *amp,
            },
            Piece::Ball { center, radius, amp } => Piece::Ball {
                center: add(center),
                radius: *radius,
                amp: *amp,
            },
            Piece::Bump {
                center,
                radius,
                alpha,
                amp,
            } => Piece::Bump {
                center: add(center),
                radius: *radius,
                alpha: *alpha,
                amp: *amp,
            },
        }
    }

    fn bounds(&self) -> (Vec<S>, Vec<S>) {
        match self {
            Piece::Box { lo, hi, .. } => (lo.clone(), hi.clone()),
            Piece::Ball { center, radius, .. } | Piece::Bump { center, radius, .. } => (
                center.iter().map(|c| *c - *radius).collect(),
                center.iter().map(|c| *c + *radius).collect(),
            ),
        }
    }

    fn centroid(&self) -> Vec<S> {
        match self {
            Piece::Box { lo, hi, .. } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| (*l + *h) * S::lit(0.5))
                .collect(),
            Piece::Ball { center, .. } | Piece::Bump { center, .. } => center.clone(),
        }
    }

    fn mass(&self) -> S {
        match self {
            Piece::Box { lo, hi, amp } => {
                lo.iter().zip(hi).fold(*amp, |acc, (l, h)| acc * (*h - *l))
            }
            Piece::Ball { center, radius, amp } => {
                let n = center.len();
                *amp * S::lit(unit_ball_volume(n)) * radius.powi(n as i32)
            }
            Piece::Bump {
                center,
                radius,
                alpha,
                amp,
            } => {
                let n = center.len();
                let nf = n as f64;
                let p = 1.0 / alpha.as_f64();
                // n w_n int_0^1 (1 - s^2)^p s^{n-1} ds = n w_n B(n/2, p+1)/2
                let beta = (ln_gamma(0.5 * nf) + ln_gamma(p + 1.0) - ln_gamma(0.5 * nf + p + 1.0)).exp();
                *amp * S::lit(nf * unit_ball_volume(n) * 0.5 * beta) * radius.powi(n as i32)
            }
        }
    }

    fn eval(&self, x: &[S]) -> S {
        match self {
            Piece::Box { lo, hi, amp } => {
                // half-open boxes so that adjacent boxes tile without double counting
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(xi, (l, h))| xi >= l && xi < h);
                if inside {
                    *amp
                } else {
                    S::zero()
                }
            }
            Piece::Ball { center, radius, amp } => {
                if dist2(x, center) < *radius * *radius {
                    *amp
                } else {
                    S::zero()
                }
            }
            Piece::Bump {
                center,
                radius,
                alpha,
                amp,
            } => {
                let s = S::one() - dist2(x, center) / (*radius * *radius);
                if s > S::zero() {
                    *amp * s.powf(S::one() / *alpha)
                } else {
                    S::zero()
                }
            }
        }
    }

    /// sup over the positive set of <y, xi>.
    fn support_value(&self, xi: &[S]) -> S {
        match self {
            Piece::Box { lo, hi, .. } => lo
                .iter()
                .zip(hi)
                .zip(xi)
                .fold(S::zero(), |acc, ((l, h), e)| acc + (*l * *e).max(*h * *e)),
            Piece::Ball { center, radius, .. } | Piece::Bump { center, radius, .. } => {
                dot(center, xi) + *radius * dot(xi, xi).sqrt()
            }
        }
    }

    /// Summary of the measure exp(<b,y> - q|y|^2) phi(y) dy and the statistic <xi, y>.
    fn tilted(&self, b: &[S], q: S, xi: &[S], order: usize) -> Tilted<S> {
        match self {
            Piece::Box { lo, hi, amp } => {
                let mut parts = Vec::with_capacity(lo.len());
                for i in 0..lo.len() {
                    let (ys, ws) = axis_nodes(lo[i], hi[i], b[i], q, order);
                    let es: Vec<S> = ys.iter().map(|&y| b[i] * y - q * y * y).collect();
                    let stats: Vec<S> = ys.iter().map(|&y| xi[i] * y).collect();
                    parts.push(quadrature::tilted_sum(&ws, &es, &stats));
                }
                let mut t = quadrature::product(&parts);
                t.log_mass = t.log_mass + amp.ln();
                t
            }
            _ => {
                let (mut ws, mut es, mut stats) = (Vec::new(), Vec::new(), Vec::new());
                self.visit_round(b, q, order, |y, w| {
                    ws.push(w);
                    es.push(dot(b, y) - q * dot(y, y));
                    stats.push(dot(xi, y));
                });
                quadrature::tilted_sum(&ws, &es, &stats)
            }
        }
    }

    fn tilted_full(&self, b: &[S], q: S, order: usize) -> FullTilted<S> {
        let n = b.len();
        match self {
            Piece::Box { lo, hi, amp } => {
                let mut log_mass = amp.ln();
                let mut mean = vec![S::zero(); n];
                let mut cov = vec![vec![S::zero(); n]; n];
                for i in 0..n {
                    let (ys, ws) = axis_nodes(lo[i], hi[i], b[i], q, order);
                    let es: Vec<S> = ys.iter().map(|&y| b[i] * y - q * y * y).collect();
                    let t = quadrature::tilted_sum(&ws, &es, &ys);
                    log_mass = log_mass + t.log_mass;
                    mean[i] = t.mean;
                    cov[i][i] = t.var;
                }
                FullTilted { log_mass, mean, cov }
            }
            _ => {
                let (mut ws, mut es, mut pts) = (Vec::new(), Vec::new(), Vec::new());
                self.visit_round(b, q, order, |y, w| {
                    ws.push(w);
                    es.push(dot(b, y) - q * dot(y, y));
                    pts.extend_from_slice(y);
                });
                let shift = es
                    .iter()
                    .zip(&ws)
                    .filter(|(_, w)| **w > S::zero())
                    .map(|(e, _)| *e)
                    .fold(S::neg_infinity(), S::max);
                let ms: Vec<S> = ws.iter().zip(&es).map(|(w, e)| *w * (*e - shift).exp()).collect();
                let total = ms.iter().fold(S::zero(), |a, b| a + *b);
                let mut mean = vec![S::zero(); n];
                for (k, m) in ms.iter().enumerate() {
                    for i in 0..n {
                        mean[i] = mean[i] + *m * pts[k * n + i];
                    }
                }
                for v in mean.iter_mut() {
                    *v = *v / total;
                }
                let mut cov = vec![vec![S::zero(); n]; n];
                for (k, m) in ms.iter().enumerate() {
                    for i in 0..n {
                        let ci = pts[k * n + i] - mean[i];
                        for j in 0..n {
                            cov[i][j] = cov[i][j] + *m * ci * (pts[k * n + j] - mean[j]);
                        }
                    }
                }
                for row in cov.iter_mut() {
                    for v in row.iter_mut() {
                        *v = *v / total;
                    }
                }
                FullTilted {
                    log_mass: shift + total.ln(),
                    mean,
                    cov,
                }
            }
        }
    }

    /// Quadrature nodes (point, weight * phi) resolving the exponent <b,y> - q|y|^2.
    pub fn nodes(&self, b: &[S], q: S, order: usize) -> Vec<(Vec<S>, S)> {
        match self {
            Piece::Box { lo, hi, amp } => {
                let axes: Vec<(Vec<S>, Vec<S>)> = (0..lo.len())
                    .map(|i| axis_nodes(lo[i], hi[i], b[i], q, order))
                    .collect();
                let mut out = vec![(Vec::new(), *amp)];
                for (ys, ws) in &axes {
                    let mut next = Vec::with_capacity(out.len() * ys.len());
                    for (p, w) in &out {
                        for (y, wy) in ys.iter().zip(ws) {
                            let mut q = p.clone();
                            q.push(*y);
                            next.push((q, *w * *wy));
                        }
                    }
                    out = next;
                }
                out
            }
            _ => {
                let mut out = Vec::new();
                self.visit_round(b, q, order, |y, w| out.push((y.to_vec(), w)));
                out
            }
        }
    }

    fn visit_round(&self, b: &[S], q: S, order: usize, visit: impl FnMut(&[S], S)) {
        match self {
            Piece::Box { .. } => unreachable!("boxes use the per-axis rule"),
            Piece::Ball { center, radius, amp } => {
                radial_nodes(center, *radius, b, q, order, |_| *amp, false, visit)
            }
            Piece::Bump {
                center,
                radius,
                alpha,
                amp,
            } => {
                let p = S::one() / *alpha;
                let density = |rho: S| {
                    let s = S::one() - rho * rho;
                    if s > S::zero() {
                        *amp * s.powf(p)
                    } else {
                        S::zero()
                    }
                };
                radial_nodes(center, *radius, b, q, order, density, true, visit)
            }
        }
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + *x * *y)
}

fn dist2<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
}

/// max of lin*x - quad*x^2 over [a, b], quad >= 0.
fn concave_max(lin: f64, quad: f64, a: f64, b: f64) -> f64 {
    let e = |x: f64| lin * x - quad * x * x;
    let mut m = e(a).max(e(b));
    if quad > 0.0 {
        let peak = lin / (2.0 * quad);
        if peak > a && peak < b {
            m = m.max(e(peak));
        }
    }
    m
}

fn concave_min(lin: f64, quad: f64, a: f64, b: f64) -> f64 {
    // a concave function attains its minimum at an endpoint
    (lin * a - quad * a * a).min(lin * b - quad * b * b)
}

/// Number of panels so that each panel sees at most PANEL_SPREAD of exponent range.
fn panel_count(spread: f64) -> usize {
    let mut m = 1;
    while spread / m as f64 > PANEL_SPREAD && m < MAX_PANELS {
        m *= 2;
    }
    m
}

/// Panel weight below exp(-PRUNE) of the peak is dropped.
const PRUNE: f64 = 80.0;

/// Composite Gauss-Legendre nodes on [lo, hi] refined for the exponent b y - q y^2.
fn axis_nodes<S: Scalar>(lo: S, hi: S, b: S, q: S, order: usize) -> (Vec<S>, Vec<S>) {
    let (l, h, bf, qf) = (lo.as_f64(), hi.as_f64(), b.as_f64(), q.as_f64());
    let top = concave_max(bf, qf, l, h);
    let m = panel_count(top - concave_min(bf, qf, l, h));
    let keep = |a: f64, c: f64| concave_max(bf, qf, a, c) >= top - PRUNE;
    composite_pruned(lo, hi, m, order, keep)
}


fn panel_edges<S: Scalar>(lo: S, hi: S, panels: usize) -> Vec<S> {
    let width = (hi - lo) / S::from_usize_lossy(panels);
    (0..=panels)
        .map(|k| if k == panels { hi } else { lo + width * S::from_usize_lossy(k) })
        .collect()
}

fn composite_pruned<S: Scalar>(
    lo: S,
    hi: S,
    panels: usize,
    order: usize,
    keep: impl Fn(f64, f64) -> bool,
) -> (Vec<S>, Vec<S>) {
    let gl = rule(order);
    let edges = panel_edges(lo, hi, panels);
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for e in edges.windows(2) {
        if !keep(e[0].as_f64(), e[1].as_f64()) {
            continue;
        }
        let (y, w) = gl.mapped(e[0], e[1]);
        ys.extend(y);
        ws.extend(w);
    }
    (ys, ws)
}

/// Orthonormal frame whose first vector is along v (or e_1 when v = 0).
fn frame<S: Scalar>(v: &[S]) -> Vec<Vec<S>> {
    let n = v.len();
    let norm = dot(v, v).sqrt();
    let first: Vec<S> = if norm > S::zero() {
        v.iter().map(|x| *x / norm).collect()
    } else {
        let mut e = vec![S::zero(); n];
        e[0] = S::one();
        e
    };
    let mut out = vec![first];
    for i in 0..n {
        if out.len() == n {
            break;
        }
        let mut e = vec![S::zero(); n];
        e[i] = S::one();
        for f in &out {
            let c = dot(&e, f);
            for (ej, fj) in e.iter_mut().zip(f) {
                *ej = *ej - c * *fj;
            }
        }
        let len = dot(&e, &e).sqrt();
        if len > S::lit(0.1) {
            out.push(e.iter().map(|x| *x / len).collect());
        }
    }
    out
}

/// Polar/spherical product rule over B(center, radius) with density(rho), rho = |y-c|/R.
///
/// The polar axis follows the tilt so that the exponent depends on (rho, cos theta)
/// only; panels are refined by exponent spread and pruned far below the peak. With
/// `graded`, the outermost radial panel is mapped so nodes cluster at the rim.
fn radial_nodes<S: Scalar>(
    center: &[S],
    radius: S,
    b: &[S],
    q: S,
    order: usize,
    density: impl Fn(S) -> S,
    graded: bool,
    mut visit: impl FnMut(&[S], S),
) {
    let n = center.len();
    // exponent relative to the center: <b', w> - q|w|^2 with w = y - c
    let shifted: Vec<S> = b
        .iter()
        .zip(center)
        .map(|(bi, ci)| *bi - S::lit(2.0) * q * *ci)
        .collect();
    let axes = frame(&shifted);
    let big_b = dot(&shifted, &shifted).sqrt().as_f64();
    let rf = radius.as_f64();
    let qf = q.as_f64();
    // exponent as a function of rho for a given cosine c: rho R B c - q R^2 rho^2
    let bound = |ra: f64, rb: f64, cmax: f64| concave_max(rf * big_b * cmax, qf * rf * rf, ra, rb);
    let top = bound(0.0, 1.0, 1.0);
    let spread = top - concave_min(rf * big_b, qf * rf * rf, 0.0, 1.0).min(-rf * big_b - qf * rf * rf);
    let m = panel_count(spread);
    let sub = (order / 2).max(16);
    let radial_panels = panel_edges(0.0, 1.0, m);
    let mut y = [S::zero(); 3];
    let mut at = |coef: &[S], weight: S| {
        y[..n].copy_from_slice(center);
        for (c, ax) in coef.iter().zip(&axes) {
            for (yi, ai) in y.iter_mut().zip(ax) {
                *yi = *yi + *c * *ai;
            }
        }
        visit(&y[..n], weight);
    };
    let gl = rule(if m > 1 { sub } else { order });
    for (idx, e) in radial_panels.windows(2).enumerate() {
        let (ra, rb) = (e[0], e[1]);
        if bound(ra, rb, 1.0) < top - PRUNE {
            continue;
        }
        let radial: Vec<(S, S)> = if graded && idx + 1 == m {
            // rho = 1 - (1 - ra)(1 - s)^4 on the rim panel
            let (ss, sw) = gl.mapped(S::zero(), S::one());
            let h = S::lit(1.0 - ra);
            ss.iter()
                .zip(&sw)
                .map(|(&s, &w)| {
                    let t = S::one() - s;
                    (S::one() - h * t.powi(4), w * h * S::lit(4.0) * t.powi(3))
                })
                .collect()
        } else {
            let (ss, sw) = gl.mapped(S::lit(ra), S::lit(rb));
            ss.into_iter().zip(sw).collect()
        };
        match n {
            1 => {
                for (sign, c) in [(-S::one(), -1.0), (S::one(), 1.0)] {
                    if bound(ra, rb, c) < top - PRUNE {
                        continue;
                    }
                    for &(rho, w) in &radial {
                        at(&[sign * rho * radius], density(rho) * w * radius);
                    }
                }
            }
            2 => {
                let keep = |a: f64, c: f64| {
                    let cmax = if a <= 0.0 && c >= 0.0 { 1.0 } else { a.cos().max(c.cos()) };
                    bound(ra, rb, cmax) >= top - PRUNE
                };
                let pi = S::lit(std::f64::consts::PI);
                let (ths, tws) = composite_pruned(-pi, pi, m.max(2), sub, keep);
                let trig: Vec<(S, S)> = ths.iter().map(|t| (t.cos(), t.sin())).collect();
                for &(rho, w) in &radial {
                    let r = rho * radius;
                    let d = density(rho) * w * radius * r;
                    for (&(c, sn), &tw) in trig.iter().zip(&tws) {
                        at(&[r * c, r * sn], d * tw);
                    }
                }
            }
            _ => {
                let keep = |_: f64, c: f64| bound(ra, rb, c) >= top - PRUNE;
                let (mus, mws) = composite_pruned(-S::one(), S::one(), m, sub, keep);
                let na = sub;
                let dph = S::lit(2.0 * std::f64::consts::PI) / S::from_usize_lossy(na);
                for &(rho, w) in &radial {
                    let r = rho * radius;
                    for (&mu, &mw) in mus.iter().zip(&mws) {
                        let st = (S::one() - mu * mu).max(S::zero()).sqrt();
                        let d = density(rho) * w * radius * r * r * mw * dph;
                        for k in 0..na {
                            let ph = dph * S::from_usize_lossy(k);
                            at(&[r * mu, r * st * ph.cos(), r * st * ph.sin()], d);
                        }
                    }
                }
            }
        }
    }
}

impl<S: Scalar> InitialDatum<S> {
    fn assemble(pieces: Vec<Piece<S>>, family: DatumFamily, in_la: bool) -> Self {
        let n = match &pieces[0] {
            Piece::Box { lo, .. } => lo.len(),
            Piece::Ball { center, .. } | Piece::Bump { center, .. } => center.len(),
        };
        let mass = pieces.iter().fold(S::zero(), |acc, p| acc + p.mass());
        let mut support_lo = vec![S::infinity(); n];
        let mut support_hi = vec![S::neg_infinity(); n];
        for p in &pieces {
            let (l, h) = p.bounds();
            for i in 0..n {
                support_lo[i] = support_lo[i].min(l[i]);
                support_hi[i] = support_hi[i].max(h[i]);
            }
        }
        let mut d = InitialDatum {
            n,
            pieces,
            family,
            flags: ClassFlags { in_l: true, in_la },
            mass,
            sup_norm: S::zero(),
            support_lo,
            support_hi,
        };
        d.sup_norm = d.compute_sup_norm();
        d
    }

    /// Maximum over piece centroids and centers of pairwise box overlaps.
    fn compute_sup_norm(&self) -> S {
        let mut candidates: Vec<Vec<S>> = self.pieces.iter().map(|p| p.centroid()).collect();
        for (i, a) in self.pieces.iter().enumerate() {
            for b in &self.pieces[i + 1..] {
                let (la, ha) = a.bounds();
                let (lb, hb) = b.bounds();
                let c: Vec<S> = (0..self.n)
                    .map(|k| (la[k].max(lb[k]) + ha[k].min(hb[k])) * S::lit(0.5))
                    .collect();
                candidates.push(c);
            }
        }
        candidates
            .iter()
            .map(|x| self.eval(x))
            .fold(S::zero(), S::max)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Piece<S>] {
        &self.pieces
    }

    pub fn family(&self) -> &DatumFamily {
        &self.family
    }

    pub fn flags(&self) -> ClassFlags {
        self.flags
    }

    pub fn mass(&self) -> S {
        self.mass
    }

    pub fn sup_norm(&self) -> S {
        self.sup_norm
    }

    pub fn support_box(&self) -> (&[S], &[S]) {
        (&self.support_lo, &self.support_hi)
    }

    pub fn eval(&self, x: &[S]) -> S {
        self.pieces.iter().fold(S::zero(), |acc, p| acc + p.eval(x))
    }

    /// sup_{y in P_phi} <y, xi>.
    pub fn support_value(&self, xi: &[S]) -> S {
        self.pieces
            .iter()
            .map(|p| p.support_value(xi))
            .fold(S::neg_infinity(), S::max)
    }

    /// Summary of exp(<b,y> - q|y|^2) phi(y) dy with the statistic <xi,y>.
    pub fn tilted(&self, b: &[S], q: S, xi: &[S], order: usize) -> Tilted<S> {
        let parts: Vec<Tilted<S>> = self.pieces.iter().map(|p| p.tilted(b, q, xi, order)).collect();
        if parts.len() == 1 {
            parts[0]
        } else {
            quadrature::mixture(&parts)
        }
    }

    /// Summary of exp(<b,y> - q|y|^2) phi(y) dy with the full mean and covariance of y.
    pub fn tilted_full(&self, b: &[S], q: S, order: usize) -> FullTilted<S> {
        let parts: Vec<FullTilted<S>> = self
            .pieces
            .iter()
            .map(|p| p.tilted_full(b, q, order))
            .collect();
        FullTilted::mixture(&parts)
    }

    /// Mass by quadrature, for checking the stored value.
    pub fn quadrature_mass(&self, order: usize) -> S {
        let zero = vec![S::zero(); self.n];
        self.tilted(&zero, S::zero(), &zero, order).log_mass.exp()
    }

    /// First moments int y_i phi / M by quadrature.
    pub fn quadrature_centroid(&self, order: usize) -> Vec<S> {
        let zero = vec![S::zero(); self.n];
        (0..self.n)
            .map(|i| {
                let mut e = vec![S::zero(); self.n];
                e[i] = S::one();
                self.tilted(&zero, S::zero(), &e, order).mean
            })
            .collect()
    }

    fn exact_centroid(&self) -> Vec<S> {
        let mut c = vec![S::zero(); self.n];
        for p in &self.pieces {
            let m = p.mass();
            for (ci, pi) in c.iter_mut().zip(p.centroid()) {
                *ci = *ci + m * pi;
            }
        }
        c.iter().map(|v| *v / self.mass).collect()
    }

    pub fn translated(&self, v: &[S]) -> Self {
        let pieces = self.pieces.iter().map(|p| p.translate(v)).collect();
        let family = match &self.family {
            DatumFamily::Translated(_) => self.family.clone(),
            f => DatumFamily::Translated(Box::new(f.clone())),
        };
        InitialDatum::assemble(pieces, family, self.flags.in_la)
    }

    /// Shift so that all first moments vanish.
    pub fn center(&self) -> Self {
        let c = self.exact_centroid();
        if c.iter().all(|v| v.abs() <= S::lit(1e-15) * (S::one() + self.extent())) {
            return self.clone();
        }
        let shift: Vec<S> = c.iter().map(|v| -*v).collect();
        self.translated(&shift)
    }

    /// Shift so that sup_{P_phi} <y, e_1> = 0 (the supporting-hyperplane normalization).
    pub fn touch_origin_along_e1(&self) -> Self {
        let mut e1 = vec![S::zero(); self.n];
        e1[0] = S::one();
        let s = self.support_value(&e1);
        let mut shift = vec![S::zero(); self.n];
        shift[0] = -s;
        self.translated(&shift)
    }

    fn extent(&self) -> S {
        self.support_lo
            .iter()
            .zip(&self.support_hi)
            .fold(S::zero(), |acc, (l, h)| acc.max(l.abs()).max(h.abs()))
    }
}

pub fn center<S: Scalar>(phi: &InitialDatum<S>) -> InitialDatum<S> {
    phi.center()
}

/// One (k, xi, z) ratio k^2 * int <y-z,xi>^2 e^{k<y-z,xi>} phi / int e^{k<y-z,xi>} phi.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    pub k: f64,
    pub xi: Vec<f64>,
    pub z: Vec<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionAReport {
    pub fitted_c: f64,
    pub worst: RatioSample,
    pub pass: bool,
    pub samples: Vec<RatioSample>,
}

/// Supporting pairs: face normals for box-only data, otherwise 32 directions in
/// each coordinate plane. z sits on the supporting hyperplane along xi.
pub fn default_supporting_pairs<S: Scalar>(phi: &InitialDatum<S>) -> Vec<(Vec<S>, Vec<S>)> {
    let n = phi.n;
    let mut dirs: Vec<Vec<S>> = Vec::new();
    let boxy = phi.pieces.iter().all(|p| matches!(p, Piece::Box { .. }));
    if boxy || n == 1 {
        for i in 0..n {
            for sign in [S::one(), -S::one()] {
                let mut e = vec![S::zero(); n];
                e[i] = sign;
                dirs.push(e);
            }
        }
    } else {
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..32 {
                    let th = S::lit(2.0 * std::f64::consts::PI * k as f64 / 32.0);
                    let mut e = vec![S::zero(); n];
                    e[i] = th.cos();
                    e[j] = th.sin();
                    dirs.push(e);
                }
            }
        }
    }
    dirs.into_iter()
        .map(|xi| {
            let s = phi.support_value(&xi);
            let z = xi.iter().map(|e| *e * s).collect();
            (xi, z)
        })
        .collect()
}

pub fn default_condition_a_k_grid() -> Vec<f64> {
    crate::grid::geometric(1.0, 1e3, 31)
}

/// Evidence for condition (A): the ratios must stay bounded across the grid.
///
/// Passing means the largest ratio in the top decade of k is at most twice the
/// largest ratio in the decade below it for every pair.
pub fn check_condition_a<S: Scalar>(
    phi: &InitialDatum<S>,
    k_grid: &[f64],
    pairs: &[(Vec<S>, Vec<S>)],
    order: usize,
) -> Result<ConditionAReport> {
    if k_grid.is_empty() || k_grid.iter().any(|&k| k < 1.0) {
        return Err(Error::InvalidParameter("k grid must be nonempty and in [1, inf)".into()));
    }
    let k_max = k_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = S::one() + phi.extent();
    let mut samples = Vec::new();
    let mut pass = true;
    for (xi, z) in pairs {
        let sup = phi.support_value(xi) - dot(z, xi);
        if sup.abs() > S::lit(1e-9) * scale {
            return Err(Error::NonSupporting(sup.as_f64()));
        }
        let zx = dot(z, xi);
        let mut top = 0.0f64;
        let mut below = 0.0f64;
        for &k in k_grid {
            let ks = S::lit(k);
            let b: Vec<S> = xi.iter().map(|e| *e * ks).collect();
            let t = phi.tilted(&b, S::zero(), xi, order);
            if !t.log_mass.is_finite() {
                return Err(Error::VanishingDenominator);
            }
            // statistic <y - z, xi> = <y, xi> - <z, xi>
            let m = t.mean - zx;
            let second = (t.var + m * m).as_f64();
            let ratio = k * k * second;
            if k >= k_max / 10.0 {
                top = top.max(ratio);
            } else if k >= k_max / 100.0 {
                below = below.max(ratio);
            }
            samples.push(RatioSample {
                k,
                xi: xi.iter().map(|v| v.as_f64()).collect(),
                z: z.iter().map(|v| v.as_f64()).collect(),
                ratio,
            });
        }
        if below > 0.0 && top > 2.0 * below {
            pass = false;
        }
    }
    let worst = samples
        .iter()
        .cloned()
        .max_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap())
        .ok_or(Error::VanishingDenominator)?;
    if phi.flags.in_la && !pass {
        // evidence can refute a declared membership, never establish one
        return Err(Error::InvalidParameter(format!(
            "declared L_A membership refuted: ratio grows to {} at k={}",
            worst.ratio, worst.k
        )));
    }
    Ok(ConditionAReport {
        fitted_c: worst.ratio,
        worst,
        pass,
        samples,
    })
}

#[cfg(test)]
mod tests;
