use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;

use super::function::AdmissibleFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rigor {
    Exact,
    Sampled,
}

impl std::fmt::Display for Rigor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rigor::Exact => "exact",
            Rigor::Sampled => "sampled",
        })
    }
}

/// The r-coordinate view F(r) = F(a e^{-r}) and its curvature functionals.
#[derive(Debug, Clone)]
pub struct DerivedTransform<S> {
    pub base: AdmissibleFunction<S>,
}

impl<S: Scalar> DerivedTransform<S> {
    pub fn new(base: AdmissibleFunction<S>) -> Self {
        DerivedTransform { base }
    }

    pub fn big_f(&self, r: S) -> Result<S> {
        Ok(self.base.profile(r)?.0)
    }

    pub fn d1(&self, r: S) -> Result<S> {
        Ok(self.base.profile(r)?.1)
    }

    pub fn d2(&self, r: S) -> Result<S> {
        Ok(self.base.profile(r)?.2)
    }

    fn check_r(r: S) -> Result<()> {
        if r > S::zero() && r.is_finite() {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                value: r.as_f64(),
                domain: "(0,inf)".into(),
            })
        }
    }

    /// kappa_F(r) = -r F''(r)/F'(r).
    pub fn kappa(&self, r: S) -> Result<Ext<S>> {
        Self::check_r(r)?;
        if let Some(k) = self.base.kappa_direct(r) {
            return Ok(Ext::Finite(k));
        }
        let (_, d1, d2) = self.base.profile(r)?;
        if d1 == S::zero() || !d1.is_finite() {
            return Err(Error::VanishingDerivative(r.as_f64()));
        }
        Ok(Ext::from_scalar(-r * d2 / d1))
    }

    /// The same quantity through tau-domain derivatives:
    /// kappa = r (1 + tau F''(tau)/F'(tau)) at tau = a e^{-r}.
    pub fn kappa_tau_route(&self, r: S) -> Result<S> {
        Self::check_r(r)?;
        let tau = self.base.anchor() * (-r).exp();
        let d1 = self.base.deriv1(tau)?;
        let d2 = self.base.deriv2(tau)?;
        if d1 == S::zero() {
            return Err(Error::VanishingDerivative(r.as_f64()));
        }
        Ok(r * (S::one() + tau * d2 / d1))
    }

    /// sigma_F(r) = r (kappa_F(r) - 1/2).
    pub fn sigma(&self, r: S) -> Result<Ext<S>> {
        Self::check_r(r)?;
        if let Some(s) = self.base.sigma_direct(r) {
            return Ok(Ext::Finite(s));
        }
        Ok(match self.kappa(r)? {
            Ext::Finite(k) => Ext::Finite(r * (k - S::lit(0.5))),
            other => other,
        })
    }

    /// nu_F(r) = sigma_F(r)/kappa_F(r) for kappa > 0, -inf otherwise.
    pub fn nu(&self, r: S) -> Result<Ext<S>> {
        let k = self.kappa(r)?;
        match k {
            Ext::PosInf => Ok(Ext::Finite(r)),
            Ext::Finite(kv) if kv > S::zero() => match self.sigma(r)? {
                Ext::Finite(s) => Ok(Ext::Finite(s / kv)),
                other => Ok(other),
            },
            _ => Ok(Ext::NegInf),
        }
    }

    /// kappa_F^*: exact from the family profile, otherwise the maximum of
    /// kappa over the top two decades of the grid (a heuristic, tagged sampled).
    pub fn kappa_star_estimate(&self, r_grid: &[f64]) -> Result<(Ext<S>, Rigor)> {
        if let Some(p) = self.base.exact_profile() {
            return Ok((p.kappa_star, Rigor::Exact));
        }
        check_sampling_grid(r_grid)?;
        let top = r_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut best = Ext::NegInf;
        for &r in r_grid.iter().filter(|&&r| r >= top / 100.0) {
            let k = self.kappa(S::lit(r))?;
            if k > best {
                best = k;
            }
        }
        Ok((best, Rigor::Sampled))
    }
}

/// Sampled mode needs a geometric grid reaching [1e2, 1e6] with at least 64 points.
pub fn check_sampling_grid(r_grid: &[f64]) -> Result<()> {
    let lo = r_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = r_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if r_grid.len() < 64 || lo > 1e2 || hi < 1e6 {
        return Err(Error::InvalidParameter(format!(
            "sampled estimates need >= 64 points covering [1e2, 1e6]; got {} points on [{lo}, {hi}]",
            r_grid.len()
        )));
    }
    Ok(())
}

pub fn kappa<S: Scalar>(t: &DerivedTransform<S>, r: S) -> Result<Ext<S>> {
    t.kappa(r)
}

pub fn sigma<S: Scalar>(t: &DerivedTransform<S>, r: S) -> Result<Ext<S>> {
    t.sigma(r)
}

pub fn nu<S: Scalar>(t: &DerivedTransform<S>, r: S) -> Result<Ext<S>> {
    t.nu(r)
}

pub fn kappa_star_estimate<S: Scalar>(
    t: &DerivedTransform<S>,
    r_grid: &[f64],
) -> Result<(Ext<S>, Rigor)> {
    t.kappa_star_estimate(r_grid)
}
