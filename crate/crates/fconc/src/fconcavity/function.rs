use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;
use crate::special;

use super::floored::{self, FlooredHotTable};

/// User-supplied F evaluated in f64. Derivatives come from central differences.
pub struct CustomFn {
    pub eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomFn")
    }
}

#[derive(Debug, Clone)]
pub enum Family<S> {
    /// Phi_alpha: (tau^alpha - 1)/alpha, log tau at alpha = 0.
    Power { alpha: S },
    /// Psi_beta: -(-log tau)^beta on [0, 1).
    PowerLog { beta: S },
    /// H = h^{-1} on [0, 1).
    Hot,
    /// The logarithmically floored hot construction.
    FlooredHot { k: f64, table: Arc<FlooredHotTable> },
    Custom(Arc<CustomFn>),
}

/// Growth class of sigma_F(r) as r -> inf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    /// tends to -inf at least linearly in r
    NegInf,
    /// identically zero
    Zero,
    /// tends to +inf at least linearly in r
    PosInf,
}

/// Exact asymptotics carried by the closed-form families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactProfile<S> {
    pub kappa_star: Ext<S>,
    pub sigma_growth: Growth,
    pub nu_growth: Growth,
    /// kappa_F(r) <= 1/2 for every r > 0
    pub kappa_le_half: bool,
}

/// Admissible F on [0, a): strictly increasing with F(0) = -inf.
///
/// `scale` implements F_k(tau) = F(k tau) on [0, a/k); the r-profile is unchanged by it.
#[derive(Debug, Clone)]
pub struct AdmissibleFunction<S> {
    name: String,
    family: Family<S>,
    base_a: Ext<S>,
    scale: S,
}

pub fn make_power_concavity<S: Scalar>(alpha: S) -> AdmissibleFunction<S> {
    AdmissibleFunction {
        name: format!("power({alpha})"),
        family: Family::Power { alpha },
        base_a: Ext::PosInf,
        scale: S::one(),
    }
}

pub fn make_power_log_concavity<S: Scalar>(beta: S) -> Result<AdmissibleFunction<S>> {
    if !(beta > S::zero()) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(AdmissibleFunction {
        name: format!("powerlog({beta})"),
        family: Family::PowerLog { beta },
        base_a: Ext::Finite(S::one()),
        scale: S::one(),
    })
}

pub fn make_hot_concavity<S: Scalar>() -> AdmissibleFunction<S> {
    AdmissibleFunction {
        name: "hot".into(),
        family: Family::Hot,
        base_a: Ext::Finite(S::one()),
        scale: S::one(),
    }
}

pub fn build_floored_hot_f<S: Scalar>(k: S) -> Result<AdmissibleFunction<S>> {
    if !(k > S::zero()) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let kf = k.as_f64();
    Ok(AdmissibleFunction {
        name: format!("floored_hot({k})"),
        family: Family::FlooredHot {
            k: kf,
            table: floored::table(kf),
        },
        base_a: Ext::Finite(S::one()),
        scale: S::one(),
    })
}

pub fn make_custom<S: Scalar>(
    name: &str,
    a: Ext<S>,
    eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<AdmissibleFunction<S>> {
    match a {
        Ext::Finite(x) if x > S::zero() => {}
        Ext::PosInf => {}
        _ => return Err(Error::InvalidParameter(format!("a must be positive, got {a}"))),
    }
    Ok(AdmissibleFunction {
        name: name.to_string(),
        family: Family::Custom(Arc::new(CustomFn {
            eval: Box::new(eval),
        })),
        base_a: a,
        scale: S::one(),
    })
}

impl<S: Scalar> AdmissibleFunction<S> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family<S> {
        &self.family
    }

    /// Right endpoint of I = [0, a).
    pub fn a(&self) -> Ext<S> {
        match self.base_a {
            Ext::Finite(a) => Ext::Finite(a / self.scale),
            other => other,
        }
    }

    /// a when finite, 1 otherwise: the anchor of the r-coordinates.
    pub fn anchor(&self) -> S {
        self.a().finite().unwrap_or_else(S::one)
    }

    fn base_anchor(&self) -> S {
        self.base_a.finite().unwrap_or_else(S::one)
    }

    pub fn is_c2(&self) -> bool {
        true
    }

    /// Restricts a function on [0, inf) to [0, a). Only the power family allows it.
    pub fn restricted(&self, a: S) -> Result<Self> {
        match (&self.family, self.base_a) {
            (Family::Power { .. }, Ext::PosInf) if a > S::zero() && a.is_finite() => {
                let mut out = self.clone();
                out.base_a = Ext::Finite(a);
                out.name = format!("{}|a={a}", self.name);
                Ok(out)
            }
            _ => Err(Error::InvalidParameter(format!(
                "{} cannot be restricted to [0,{a})",
                self.name
            ))),
        }
    }

    /// F_k(tau) = F(k tau) on [0, a/k).
    pub fn rescaled(&self, k: S) -> Result<Self> {
        if !(k > S::zero()) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {k}")));
        }
        let mut out = self.clone();
        out.scale = self.scale * k;
        out.name = format!("{}(k={k})", self.name);
        Ok(out)
    }

    pub fn exact_profile(&self) -> Option<ExactProfile<S>> {
        let half = S::lit(0.5);
        match &self.family {
            Family::Power { alpha } => {
                let a = *alpha;
                Some(if a > S::zero() {
                    ExactProfile {
                        kappa_star: Ext::PosInf,
                        sigma_growth: Growth::PosInf,
                        nu_growth: Growth::PosInf,
                        kappa_le_half: false,
                    }
                } else {
                    ExactProfile {
                        kappa_star: if a == S::zero() { Ext::Finite(S::zero()) } else { Ext::NegInf },
                        sigma_growth: Growth::NegInf,
                        nu_growth: Growth::NegInf,
                        kappa_le_half: true,
                    }
                })
            }
            Family::PowerLog { beta } => {
                let kappa = S::one() - *beta;
                let sigma_growth = if kappa < half {
                    Growth::NegInf
                } else if kappa == half {
                    Growth::Zero
                } else {
                    Growth::PosInf
                };
                // nu = sigma/kappa for kappa > 0, -inf otherwise
                let nu_growth = if kappa > S::zero() { sigma_growth } else { Growth::NegInf };
                Some(ExactProfile {
                    kappa_star: Ext::Finite(kappa),
                    sigma_growth,
                    nu_growth,
                    kappa_le_half: kappa <= half,
                })
            }
            _ => None,
        }
    }

    fn check_tau(&self, tau: S) -> Result<()> {
        let inside = tau >= S::zero()
            && match self.a() {
                Ext::Finite(a) => tau < a,
                _ => tau.is_finite(),
            };
        if inside {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                value: tau.as_f64(),
                domain: format!("[0,{})", self.a()),
            })
        }
    }

    /// F(tau), with F(0) = -inf.
    pub fn eval(&self, tau: S) -> Result<Ext<S>> {
        self.check_tau(tau)?;
        if tau == S::zero() {
            return Ok(Ext::NegInf);
        }
        let t = tau * self.scale;
        let v = match &self.family {
            Family::Power { alpha } => power_eval(*alpha, t),
            Family::PowerLog { beta } => -(-t.ln()).powf(*beta),
            Family::Hot => S::lit(special::hot_x_of_r(-t.as_f64().ln())),
            Family::FlooredHot { table, .. } => S::lit(table.profile(-t.as_f64().ln()).0),
            Family::Custom(c) => S::lit((c.eval)(t.as_f64())),
        };
        Ok(Ext::from_scalar(v))
    }

    fn interior(&self, tau: S) -> Result<S> {
        self.check_tau(tau)?;
        if tau == S::zero() {
            return Err(Error::OutsideDomain {
                value: 0.0,
                domain: format!("(0,{})", self.a()),
            });
        }
        Ok(tau * self.scale)
    }

    /// F'(tau) on (0, a), from the tau-domain formula of each family.
    pub fn deriv1(&self, tau: S) -> Result<S> {
        let t = self.interior(tau)?;
        let base = match &self.family {
            Family::Power { alpha } => t.powf(*alpha - S::one()),
            Family::PowerLog { beta } => {
                let l = -t.ln();
                *beta * l.powf(*beta - S::one()) / t
            }
            Family::Hot => {
                let x = special::hot_x_of_r(-t.as_f64().ln());
                S::lit(1.0 / special::hot_density(x))
            }
            _ => {
                let r = (self.base_anchor() / t).ln();
                let (_, d1, _) = self.profile(r)?;
                -d1 / t
            }
        };
        Ok(base * self.scale)
    }

    /// F''(tau) on (0, a).
    pub fn deriv2(&self, tau: S) -> Result<S> {
        let t = self.interior(tau)?;
        let base = match &self.family {
            Family::Power { alpha } => (*alpha - S::one()) * t.powf(*alpha - S::lit(2.0)),
            Family::PowerLog { beta } => {
                let l = -t.ln();
                let b = *beta;
                -b / (t * t) * ((b - S::one()) * l.powf(b - S::lit(2.0)) + l.powf(b - S::one()))
            }
            Family::Hot => {
                // H'' = -h''/h'^3 with h'' = -(x/2) h'
                let x = special::hot_x_of_r(-t.as_f64().ln());
                let d = special::hot_density(x);
                S::lit(0.5 * x / (d * d))
            }
            _ => {
                let r = (self.base_anchor() / t).ln();
                let (_, d1, d2) = self.profile(r)?;
                (d2 + d1) / (t * t)
            }
        };
        Ok(base * self.scale * self.scale)
    }

    /// f_F = F^{-1} on J_F.
    pub fn inverse(&self, s: S) -> Result<S> {
        let outside = || Error::OutsideDomain {
            value: s.as_f64(),
            domain: format!("J_F of {}", self.name),
        };
        if !s.is_finite() {
            return Err(outside());
        }
        let t = match &self.family {
            Family::Power { alpha } => {
                if *alpha == S::zero() {
                    s.exp()
                } else {
                    let base = S::one() + *alpha * s;
                    if !(base > S::zero()) {
                        return Err(outside());
                    }
                    base.powf(S::one() / *alpha)
                }
            }
            Family::PowerLog { beta } => {
                if !(s < S::zero()) {
                    return Err(outside());
                }
                (-(-s).powf(S::one() / *beta)).exp()
            }
            Family::Hot => S::lit(special::hot_h(s.as_f64())),
            Family::FlooredHot { table, .. } => S::lit((-table.inverse_r(s.as_f64())).exp()),
            Family::Custom(c) => S::lit(custom_inverse(c, self.base_a.cast::<f64>(), s.as_f64())?),
        };
        let tau = t / self.scale;
        if let Ext::Finite(a) = self.a() {
            if !(tau < a) {
                return Err(outside());
            }
        }
        Ok(tau)
    }

    /// (F, F', F'') in r-coordinates, F(r) = F(a e^{-r}); r may be negative when a = inf.
    pub fn profile(&self, r: S) -> Result<(S, S, S)> {
        if self.base_a.is_finite() && !(r > S::zero()) {
            return Err(Error::OutsideDomain {
                value: r.as_f64(),
                domain: "(0,inf)".into(),
            });
        }
        let out = match &self.family {
            Family::Power { alpha } => {
                let tau = self.base_anchor() * (-r).exp();
                let a = *alpha;
                if a == S::zero() {
                    (tau.ln(), -S::one(), S::zero())
                } else {
                    let p = tau.powf(a);
                    ((p - S::one()) / a, -p, a * p)
                }
            }
            Family::PowerLog { beta } => {
                let b = *beta;
                (
                    -r.powf(b),
                    -b * r.powf(b - S::one()),
                    -b * (b - S::one()) * r.powf(b - S::lit(2.0)),
                )
            }
            Family::Hot => {
                let x = special::hot_x_of_r(r.as_f64());
                let ratio = special::hot_ratio(x);
                (
                    S::lit(x),
                    S::lit(-ratio),
                    S::lit(special::hot_one_minus_g(x) * ratio),
                )
            }
            Family::FlooredHot { table, .. } => {
                let (f, d1, d2) = table.profile(r.as_f64());
                (S::lit(f), S::lit(d1), S::lit(d2))
            }
            Family::Custom(c) => {
                let anchor = self.base_anchor().as_f64();
                let g = |s: f64| (c.eval)(anchor * (-s).exp());
                let (f, d1, d2) = central_differences(&g, r.as_f64());
                (S::lit(f), S::lit(d1), S::lit(d2))
            }
        };
        Ok(out)
    }

    /// kappa_F from the closed form of the family when there is one.
    pub(crate) fn kappa_direct(&self, r: S) -> Option<S> {
        match &self.family {
            Family::Power { alpha } => Some(*alpha * r),
            Family::PowerLog { beta } => Some(S::one() - *beta),
            Family::Hot => {
                let x = special::hot_x_of_r(r.as_f64());
                Some(r * S::lit(special::hot_one_minus_g(x)))
            }
            Family::FlooredHot { table, .. } => Some(S::lit(table.kappa(r.as_f64()))),
            Family::Custom(_) => None,
        }
    }

    /// sigma_F in closed form, avoiding r*(kappa - 1/2) cancellation.
    pub(crate) fn sigma_direct(&self, r: S) -> Option<S> {
        match &self.family {
            Family::FlooredHot { table, .. } => Some(S::lit(table.sigma(r.as_f64()))),
            Family::Hot => Some(S::lit(floored::sigma_hot(r.as_f64()))),
            _ => None,
        }
    }
}

fn power_eval<S: Scalar>(alpha: S, t: S) -> S {
    if alpha == S::zero() {
        t.ln()
    } else {
        (t.powf(alpha) - S::one()) / alpha
    }
}

/// (g, g', g'') at x by central differences with steps eps^{1/3} and eps^{1/4} times max(1, |x|).
pub fn central_differences(g: &dyn Fn(f64) -> f64, x: f64) -> (f64, f64, f64) {
    let scale = x.abs().max(1.0);
    let h1 = f64::EPSILON.cbrt() * scale;
    let h2 = f64::EPSILON.powf(0.25) * scale;
    let f0 = g(x);
    let d1 = (g(x + h1) - g(x - h1)) / (2.0 * h1);
    let d2 = (g(x + h2) - 2.0 * f0 + g(x - h2)) / (h2 * h2);
    (f0, d1, d2)
}

/// Bisection in log tau for a user F.
fn custom_inverse(c: &CustomFn, a: Ext<f64>, s: f64) -> Result<f64> {
    let hi_tau = match a {
        Ext::Finite(a) => a,
        _ => 1e300,
    };
    let mut lo = (1e-300f64).ln();
    let mut hi = hi_tau.ln();
    let f = |lt: f64| (c.eval)(lt.exp());
    let top = if a.is_finite() { f(hi - 1e-15 * hi.abs().max(1.0)) } else { f(hi) };
    if !(s > f(lo) && s < top) {
        return Err(Error::OutsideDomain {
            value: s,
            domain: "J_F".into(),
        });
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
