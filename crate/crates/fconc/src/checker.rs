//! Numerical F-concavity tests for the rescaled heat flow: midpoint tests, the
//! second-derivative sign functionals I and J, proof probes and time sweeps.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::fconcavity::{AdmissibleFunction, DerivedTransform};
use crate::grid;
use crate::heatflow::{HeatFlowField, Jet};

pub type Field = HeatFlowField<f64>;
pub type Function = AdmissibleFunction<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Violated,
    UndefinedDomain,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Violated => "violated",
            Verdict::UndefinedDomain => "undefined_domain",
        })
    }
}

/// Which inequality produced a report. `Raw` is the second-derivative test
/// F''(v)(dv)^2 + F'(v) d2v <= 0 used when a is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Midpoint,
    I,
    J,
    Raw,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Midpoint => "midpoint",
            TestKind::I => "I",
            TestKind::J => "J",
            TestKind::Raw => "raw",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Pair { x: Vec<f64>, y: Vec<f64>, mu: f64 },
    Direction { x: Vec<f64>, xi: Vec<f64> },
}

impl Witness {
    pub fn x(&self) -> &[f64] {
        match self {
            Witness::Pair { x, .. } | Witness::Direction { x, .. } => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridDescriptor {
    pub radius: f64,
    pub points_per_axis: usize,
    pub extra_points: usize,
    pub directions: usize,
    pub pairs: usize,
    pub mu_grid: Vec<f64>,
    pub quadrature_order: usize,
}

impl fmt::Display for GridDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mus: Vec<String> = self.mu_grid.iter().map(|m| m.to_string()).collect();
        write!(
            f,
            "radius={} points_per_axis={} extra_points={} directions={} pairs={} mu=[{}] order={}",
            self.radius,
            self.points_per_axis,
            self.extra_points,
            self.directions,
            self.pairs,
            mus.join(";"),
            self.quadrature_order
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub t: f64,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Most negative slack: absolute on F-values for midpoint tests, relative
    /// (value over the sum of term magnitudes) for second-derivative tests.
    pub margin: f64,
    pub test_kind: TestKind,
    pub grid: GridDescriptor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPolicy {
    /// R(t) = max(radius_sqrt * sqrt(t), radius_lin * t).
    pub radius_sqrt: f64,
    pub radius_lin: f64,
    pub points_per_axis: usize,
    pub directions_per_plane: usize,
    pub pair_budget: usize,
    pub mu_grid: Vec<f64>,
    /// Absolute tolerance on F-values in the midpoint test.
    pub eps_conc: f64,
    /// Relative tolerance of the second-derivative tests.
    pub rel_tol: f64,
    pub seed: u64,
    pub midpoint: bool,
}

impl Default for SweepPolicy {
    fn default() -> Self {
        SweepPolicy {
            radius_sqrt: 8.0,
            radius_lin: 4.0,
            points_per_axis: 33,
            directions_per_plane: 16,
            pair_budget: 512,
            mu_grid: vec![0.25, 0.5, 0.75],
            eps_conc: 1e-9,
            rel_tol: 1e-8,
            seed: 0,
            midpoint: true,
        }
    }
}

impl SweepPolicy {
    pub fn radius(&self, t: f64) -> f64 {
        (self.radius_sqrt * t.sqrt()).max(self.radius_lin * t)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.radius_sqrt > 0.0 && self.radius_lin >= 0.0) {
            return bad("radius factors must be positive");
        }
        if self.points_per_axis < 2 {
            return bad("need at least 2 points per axis");
        }
        if self.directions_per_plane == 0 {
            return bad("need at least one direction per plane");
        }
        if self.mu_grid.iter().any(|m| !(*m > 0.0 && *m < 1.0)) {
            return bad("mu values must lie in (0, 1)");
        }
        if !(self.eps_conc >= 0.0 && self.rel_tol >= 0.0) {
            return bad("tolerances must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub t_grid: Vec<f64>,
    pub reports: Vec<ConcavityReport>,
    pub t_eventual: Option<f64>,
    pub horizon: f64,
    /// Every sampled t in the last decade violated (a finite-horizon statement).
    pub no_eventual: bool,
    pub policy: SweepPolicy,
}

impl SweepResult {
    pub fn summary(&self) -> String {
        if let Some(t) = self.t_eventual {
            format!("T_eventual={t} (all later sampled t pass up to horizon {})", self.horizon)
        } else if self.no_eventual {
            format!("no-eventual (finite horizon {})", self.horizon)
        } else if self.reports.iter().all(|r| r.verdict == Verdict::UndefinedDomain) {
            "undefined_domain at every t".to_string()
        } else {
            format!("inconclusive (finite horizon {})", self.horizon)
        }
    }
}

fn check_compatible(field: &Field, f: &Function) -> Result<()> {
    let same = match (field.a(), f.a()) {
        (Ext::PosInf, Ext::PosInf) => true,
        (Ext::Finite(x), Ext::Finite(y)) => (x - y).abs() <= 1e-12 * x.abs().max(1.0),
        _ => false,
    };
    if same {
        Ok(())
    } else {
        Err(Error::IncompatibleIntervals(format!(
            "field uses a={}, F is defined on [0,{})",
            field.a(),
            f.a()
        )))
    }
}

fn unit(xi: &[f64]) -> Result<()> {
    let n2: f64 = xi.iter().map(|v| v * v).sum();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("direction must be a unit vector, |xi|^2={n2}")));
    }
    Ok(())
}

/// One second-derivative sample: value >= 0 means F(U) is concave along xi at the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdSample {
    pub value: f64,
    pub scale: f64,
    pub kind: TestKind,
}

impl SdSample {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value / self.scale
        } else {
            self.value
        }
    }

    pub fn violates(&self, rel_tol: f64) -> bool {
        self.value < -rel_tol * self.scale
    }
}

fn kappa_at(tr: &DerivedTransform<f64>, v: f64) -> Result<f64> {
    match tr.kappa(v)? {
        Ext::Finite(k) => Ok(k),
        other => Err(Error::InvalidParameter(format!("kappa({v}) = {other}"))),
    }
}

/// I for finite a, the raw second derivative otherwise.
pub fn second_derivative_sample(
    tr: &DerivedTransform<f64>,
    finite_a: bool,
    jet: &Jet<f64>,
    x: &[f64],
    t: f64,
) -> Result<SdSample> {
    if finite_a {
        if !(jet.v > 0.0) {
            return Err(Error::AboveCap { x: x.to_vec(), t });
        }
        let k = kappa_at(tr, jet.v)?;
        let a = k * jet.dv * jet.dv;
        let b = jet.v * jet.d2v;
        Ok(SdSample {
            value: b - a,
            scale: a.abs() + b.abs(),
            kind: TestKind::I,
        })
    } else {
        let (_, d1, d2) = tr.base.profile(jet.v)?;
        let a = d2 * jet.dv * jet.dv;
        let b = d1 * jet.d2v;
        Ok(SdSample {
            value: -(a + b),
            scale: a.abs() + b.abs(),
            kind: TestKind::Raw,
        })
    }
}

/// I_F[v](x,t;xi) = -kappa_F(v)(d_xi v)^2 + v d_xi^2 v; needs finite a and v > 0.
pub fn compute_i(field: &Field, f: &Function, x: &[f64], t: f64, xi: &[f64]) -> Result<f64> {
    check_compatible(field, f)?;
    unit(xi)?;
    if !f.a().is_finite() {
        return Err(Error::InvalidParameter("the I test needs F with finite a".into()));
    }
    let jet = field.jet_checked(x, t, xi)?;
    let tr = DerivedTransform::new(f.clone());
    let k = kappa_at(&tr, jet.v)?;
    Ok(-k * jet.dv * jet.dv + jet.v * jet.d2v)
}

/// J_F[v](x,t;xi) = -(d_xi v)^2/2 + (v - nu_F(v)) d_xi^2 v; needs kappa_F(v) > 0.
pub fn compute_j(field: &Field, f: &Function, x: &[f64], t: f64, xi: &[f64]) -> Result<f64> {
    check_compatible(field, f)?;
    unit(xi)?;
    if !f.a().is_finite() {
        return Err(Error::InvalidParameter("the J test needs F with finite a".into()));
    }
    let jet = field.jet_checked(x, t, xi)?;
    let tr = DerivedTransform::new(f.clone());
    let nu = match tr.nu(jet.v)? {
        Ext::Finite(nu) => nu,
        _ => return Err(Error::NonPositiveKappa(jet.v)),
    };
    Ok(-0.5 * jet.dv * jet.dv + (jet.v - nu) * jet.d2v)
}

/// psi_d = ((n-1)/2 - d) log t when d < (n-1)/2, else -nu_F(v_d(x,t)).
pub fn compute_psi_d(field: &Field, x: &[f64], t: f64, f: &Function) -> Result<Ext<f64>> {
    let n = field.n() as f64;
    let d = field.d();
    if d < 0.5 * (n - 1.0) {
        if !(t > 0.0) {
            return Err(Error::OutsideDomain {
                value: t,
                domain: "t > 0".into(),
            });
        }
        return Ok(Ext::Finite((0.5 * (n - 1.0) - d) * t.ln()));
    }
    check_compatible(field, f)?;
    let v = field.eval_v(x, t)?;
    let tr = DerivedTransform::new(f.clone());
    Ok(tr.nu(v)?.neg())
}

/// How the datum sits relative to the ray probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// sup over the support of <y, e_1> is 0.
    Touching,
    /// all first moments vanish.
    Centered,
    AsGiven,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Touching => "touching",
            Normalization::Centered => "centered",
            Normalization::AsGiven => "as_given",
        })
    }
}

fn normalization(field: &Field) -> Normalization {
    let n = field.n();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let phi = field.phi();
    let scale = 1.0 + phi.support_box().1.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if phi.support_value(&e1).abs() <= 1e-12 * scale {
        return Normalization::Touching;
    }
    let c = phi.center();
    if c.pieces() == phi.pieces() {
        Normalization::Centered
    } else {
        Normalization::AsGiven
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayProbe {
    pub normalization: Normalization,
    pub kind: TestKind,
    pub points: Vec<ProbePoint>,
}

/// The second-derivative test at x = t e_1 in direction e_1 for each t.
pub fn probe_ray_i(field: &Field, f: &Function, t_grid: &[f64]) -> Result<RayProbe> {
    check_compatible(field, f)?;
    let n = field.n();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let tr = DerivedTransform::new(f.clone());
    let finite = f.a().is_finite();
    let points = t_grid
        .par_iter()
        .map(|&t| {
            let mut x = vec![0.0; n];
            x[0] = t;
            let jet = field.jet(&x, t, &e1)?;
            let s = second_derivative_sample(&tr, finite, &jet, &x, t)?;
            Ok(ProbePoint { t, x, value: s.value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RayProbe {
        normalization: normalization(field),
        kind: if finite { TestKind::I } else { TestKind::Raw },
        points,
    })
}

/// J along the positive e_1 axis at the given abscissae.
pub fn probe_j_axis(field: &Field, f: &Function, t: f64, xs: &[f64]) -> Result<Vec<ProbePoint>> {
    let n = field.n();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    xs.par_iter()
        .map(|&x1| {
            let mut x = vec![0.0; n];
            x[0] = x1;
            let value = compute_j(field, f, &x, t, &e1)?;
            Ok(ProbePoint { t, x, value })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicProbe {
    pub t: f64,
    pub r: f64,
    pub eta: f64,
    pub x: Vec<f64>,
    pub u: f64,
    pub target: f64,
    pub f_value: f64,
}

/// U at x(t:r) = 2 sqrt(t) sqrt(eta(t) + r^2) e_1 with
/// eta(t) = (d - n/2) log(4 pi t) - log(k/M); the limit of U there is k e^{-r^2}.
pub fn probe_parabolic(
    field: &Field,
    f: &Function,
    t: f64,
    r: f64,
    k: Option<f64>,
) -> Result<ParabolicProbe> {
    check_compatible(field, f)?;
    let n = field.n();
    let half_n = 0.5 * n as f64;
    let d = field.d();
    if d < half_n {
        return Err(Error::InvalidParameter("the parabolic probe needs d >= n/2".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("r must be nonnegative, got {r}")));
    }
    let mass = field.phi().mass();
    let k = k.unwrap_or(mass);
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let eta = if d == half_n {
        0.0
    } else {
        (d - half_n) * (4.0 * std::f64::consts::PI * t).ln() - (k / mass).ln()
    };
    let rad = eta + r * r;
    if rad < 0.0 {
        return Err(Error::NegativeRadicand(rad));
    }
    let mut x = vec![0.0; n];
    x[0] = 2.0 * t.sqrt() * rad.sqrt();
    let v = field.eval_v(&x, t)?;
    let u = (field.log_anchor() - v).exp();
    let f_value = DerivedTransform::new(f.clone()).big_f(v)?;
    Ok(ParabolicProbe {
        t,
        r,
        eta,
        x,
        u,
        target: k * (-r * r).exp(),
        f_value,
    })
}

/// Axes, plus `per_plane` equispaced directions in [0, pi) in each coordinate plane.
pub fn directions(n: usize, per_plane: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        out.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in 1..per_plane {
                let th = std::f64::consts::PI * k as f64 / per_plane as f64;
                if k * 2 == per_plane {
                    continue; // the axis e_j, already listed
                }
                let mut e = vec![0.0; n];
                e[i] = th.cos();
                e[j] = th.sin();
                out.push(e);
            }
        }
    }
    out
}

/// Tensor grid on [-R, R]^n plus the ray points +-t e_1 and parabolic points +-2 sqrt(t) e_1.
pub fn spatial_points(n: usize, t: f64, policy: &SweepPolicy) -> (Vec<Vec<f64>>, usize) {
    let r = policy.radius(t);
    let axis = grid::uniform(-r, r, policy.points_per_axis);
    let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(pts.len() * axis.len());
        for p in &pts {
            for &a in &axis {
                let mut q = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        pts = next;
    }
    let mut extra = 0;
    for s in [t, -t, 2.0 * t.sqrt(), -2.0 * t.sqrt()] {
        let mut x = vec![0.0; n];
        x[0] = s;
        pts.push(x);
        extra += 1;
    }
    (pts, extra)
}

fn halton_pairs(n: usize, radius: f64, budget: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    (1..=budget as u64)
        .map(|i| {
            let h = grid::halton(i, 2 * n, seed);
            let map = |u: f64| -radius + 2.0 * radius * u;
            (
                h[..n].iter().map(|&u| map(u)).collect(),
                h[n..].iter().map(|&u| map(u)).collect(),
            )
        })
        .collect()
}

fn f_of_v(field: &Field, tr: &DerivedTransform<f64>, x: &[f64], t: f64) -> Result<f64> {
    let v = field.eval_v(x, t)?;
    tr.big_f(v)
}

/// F(U(mid)) - (1-mu) F(U(x)) - mu F(U(y)).
pub fn midpoint_slack(field: &Field, f: &Function, t: f64, x: &[f64], y: &[f64], mu: f64) -> Result<f64> {
    let tr = DerivedTransform::new(f.clone());
    midpoint_slack_with(field, &tr, t, x, y, mu)
}

fn midpoint_slack_with(
    field: &Field,
    tr: &DerivedTransform<f64>,
    t: f64,
    x: &[f64],
    y: &[f64],
    mu: f64,
) -> Result<f64> {
    let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| (1.0 - mu) * a + mu * b).collect();
    let fm = f_of_v(field, tr, &m, t)?;
    let fx = f_of_v(field, tr, x, t)?;
    let fy = f_of_v(field, tr, y, t)?;
    Ok(fm - ((1.0 - mu) * fx + mu * fy))
}

/// Options of a stand-alone midpoint test.
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointOptions {
    pub radius: f64,
    pub pair_budget: usize,
    pub mu_grid: Vec<f64>,
    pub eps_conc: f64,
    pub seed: u64,
}

impl MidpointOptions {
    pub fn from_policy(policy: &SweepPolicy, t: f64) -> Self {
        MidpointOptions {
            radius: policy.radius(t),
            pair_budget: policy.pair_budget,
            mu_grid: policy.mu_grid.clone(),
            eps_conc: policy.eps_conc,
            seed: policy.seed,
        }
    }
}

/// Evaluates the defining inequality of F-concavity on low-discrepancy pairs.
pub fn midpoint_test(field: &Field, f: &Function, t: f64, opts: &MidpointOptions) -> Result<ConcavityReport> {
    check_compatible(field, f)?;
    let tr = DerivedTransform::new(f.clone());
    let n = field.n();
    let pairs = halton_pairs(n, opts.radius, opts.pair_budget, opts.seed);
    let grid = GridDescriptor {
        radius: opts.radius,
        points_per_axis: 0,
        extra_points: 0,
        directions: 0,
        pairs: pairs.len(),
        mu_grid: opts.mu_grid.clone(),
        quadrature_order: field.order(),
    };
    let tasks: Vec<(usize, f64)> = (0..pairs.len())
        .flat_map(|i| opts.mu_grid.iter().map(move |&m| (i, m)))
        .collect();
    let slacks: Vec<Result<f64>> = tasks
        .par_iter()
        .map(|&(i, mu)| midpoint_slack_with(field, &tr, t, &pairs[i].0, &pairs[i].1, mu))
        .collect();
    let mut worst: Option<(f64, usize)> = None;
    for (k, s) in slacks.into_iter().enumerate() {
        match s {
            Ok(s) => {
                if worst.map_or(true, |(w, _)| s < w) {
                    worst = Some((s, k));
                }
            }
            Err(Error::AboveCap { .. }) => {
                return Ok(ConcavityReport {
                    t,
                    verdict: Verdict::UndefinedDomain,
                    witness: None,
                    margin: f64::NAN,
                    test_kind: TestKind::Midpoint,
                    grid,
                })
            }
            Err(e) => return Err(e),
        }
    }
    let (margin, k) = worst.unwrap_or((0.0, 0));
    let violated = margin < -opts.eps_conc;
    let witness = violated.then(|| {
        let (i, mu) = tasks[k];
        Witness::Pair {
            x: pairs[i].0.clone(),
            y: pairs[i].1.clone(),
            mu,
        }
    });
    Ok(ConcavityReport {
        t,
        verdict: if violated { Verdict::Violated } else { Verdict::Pass },
        witness,
        margin,
        test_kind: TestKind::Midpoint,
        grid,
    })
}

/// The second-derivative test over the spatial grid and directions, then the
/// midpoint test as a safety net when the former finds nothing.
pub fn concavity_at(field: &Field, f: &Function, t: f64, policy: &SweepPolicy) -> Result<ConcavityReport> {
    check_compatible(field, f)?;
    policy.validate()?;
    let n = field.n();
    let tr = DerivedTransform::new(f.clone());
    let finite = f.a().is_finite();
    let (points, extra) = spatial_points(n, t, policy);
    let dirs = directions(n, policy.directions_per_plane);
    let grid = GridDescriptor {
        radius: policy.radius(t),
        points_per_axis: policy.points_per_axis,
        extra_points: extra,
        directions: dirs.len(),
        pairs: if policy.midpoint { policy.pair_budget } else { 0 },
        mu_grid: policy.mu_grid.clone(),
        quadrature_order: field.order(),
    };
    let kind = if finite { TestKind::I } else { TestKind::Raw };
    let per_point: Vec<Result<Vec<SdSample>>> = points
        .par_iter()
        .map(|x| {
            let full = field.full_moments(x, t)?;
            dirs.iter()
                .map(|xi| {
                    let jet = field.jet_from(&full, x, t, xi);
                    second_derivative_sample(&tr, finite, &jet, x, t)
                })
                .collect()
        })
        .collect();
    let mut worst: Option<(f64, usize, usize)> = None;
    let mut worst_violation: Option<(f64, usize, usize)> = None;
    for (i, r) in per_point.into_iter().enumerate() {
        let samples = match r {
            Ok(s) => s,
            Err(Error::AboveCap { .. }) => {
                return Ok(ConcavityReport {
                    t,
                    verdict: Verdict::UndefinedDomain,
                    witness: None,
                    margin: f64::NAN,
                    test_kind: kind,
                    grid,
                })
            }
            Err(e) => return Err(e),
        };
        for (j, s) in samples.iter().enumerate() {
            let rel = s.relative();
            if worst.map_or(true, |(w, _, _)| rel < w) {
                worst = Some((rel, i, j));
            }
            if s.violates(policy.rel_tol) && worst_violation.map_or(true, |(w, _, _)| rel < w) {
                worst_violation = Some((rel, i, j));
            }
        }
    }
    if let Some((rel, i, j)) = worst_violation {
        return Ok(ConcavityReport {
            t,
            verdict: Verdict::Violated,
            witness: Some(Witness::Direction {
                x: points[i].clone(),
                xi: dirs[j].clone(),
            }),
            margin: rel,
            test_kind: kind,
            grid,
        });
    }
    if policy.midpoint {
        let mut mid = midpoint_test(field, f, t, &MidpointOptions::from_policy(policy, t))?;
        if mid.verdict != Verdict::Pass {
            mid.grid = grid;
            return Ok(mid);
        }
    }
    Ok(ConcavityReport {
        t,
        verdict: Verdict::Pass,
        witness: None,
        margin: worst.map_or(0.0, |w| w.0),
        test_kind: kind,
        grid,
    })
}

/// Recomputes a witness's slack from scratch at the given quadrature order.
/// Returns the raw value for direction witnesses and the F-value slack for pairs.
pub fn witness_slack(field: &Field, f: &Function, t: f64, witness: &Witness, order: usize) -> Result<f64> {
    let fresh = field.with_order(order);
    match witness {
        Witness::Pair { x, y, mu } => midpoint_slack(&fresh, f, t, x, y, *mu),
        Witness::Direction { x, xi } => {
            let tr = DerivedTransform::new(f.clone());
            let jet = fresh.jet(x, t, xi)?;
            Ok(second_derivative_sample(&tr, f.a().is_finite(), &jet, x, t)?.relative())
        }
    }
}

/// Checks that a t grid is geometric with at least 20 points over at least 4 decades.
pub fn check_sweep_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 20 {
        return Err(Error::InvalidParameter(format!(
            "sweep grid needs at least 20 points, got {}",
            t_grid.len()
        )));
    }
    if t_grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sweep grid must be positive and increasing".into()));
    }
    let lo = t_grid[0];
    let hi = t_grid[t_grid.len() - 1];
    if hi / lo < 1e4 * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "sweep grid spans {:.3} decades, need 4",
            (hi / lo).log10()
        )));
    }
    let ratio = t_grid[1] / t_grid[0];
    if t_grid.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-6) {
        return Err(Error::InvalidParameter("sweep grid must be geometric".into()));
    }
    Ok(())
}

/// Runs concavity_at over a geometric t grid.
pub fn eventual_sweep(field: &Field, f: &Function, t_grid: &[f64], policy: &SweepPolicy) -> Result<SweepResult> {
    check_sweep_grid(t_grid)?;
    check_compatible(field, f)?;
    let reports = t_grid
        .iter()
        .map(|&t| concavity_at(field, f, t, policy))
        .collect::<Result<Vec<_>>>()?;
    let horizon = t_grid[t_grid.len() - 1];
    let mut first_pass = None;
    for (i, r) in reports.iter().enumerate().rev() {
        if r.verdict == Verdict::Pass {
            first_pass = Some(i);
        } else {
            break;
        }
    }
    let no_eventual = reports
        .iter()
        .filter(|r| r.t >= horizon / 10.0 * (1.0 - 1e-12))
        .all(|r| r.verdict == Verdict::Violated);
    Ok(SweepResult {
        t_grid: t_grid.to_vec(),
        t_eventual: first_pass.map(|i| t_grid[i]),
        reports,
        horizon,
        no_eventual,
        policy: policy.clone(),
    })
}
