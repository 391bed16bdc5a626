//! The heat flow of initial data through its Gaussian kernel, in the log form
//! v_d = (n/2 - d) log(4 pi t) + |x|^2/4t - log w used by the concavity tests.

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::initialdata::{FullTilted, InitialDatum};
use crate::quadrature::{log_sum_exp, Tilted};
use crate::scalar::Scalar;
use crate::special::erfc;

pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Clone)]
pub struct HeatFlowField<S> {
    phi: InitialDatum<S>,
    d: S,
    a: Ext<S>,
    order: usize,
    max_shift: bool,
}

/// Values and xi-derivatives of v_d at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<S> {
    pub log_w: S,
    pub v: S,
    pub dv: S,
    pub d2v: S,
    pub dlogw: S,
    pub d2logw: S,
}

impl<S: Scalar> HeatFlowField<S> {
    /// `a` is the right end of the interval of F; PosInf means the reference level 1.
    pub fn new(phi: InitialDatum<S>, d: S, a: Ext<S>, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(format!("quadrature order {order} < 2")));
        }
        if !d.is_finite() {
            return Err(Error::InvalidParameter("d must be finite".into()));
        }
        match a {
            Ext::Finite(av) if av > S::zero() => {
                let half_n = S::lit(phi.n() as f64 * 0.5);
                if d == half_n && !(phi.mass() < av) {
                    return Err(Error::InvalidParameter(format!(
                        "d = n/2 needs mass {} < a = {}",
                        phi.mass(),
                        av
                    )));
                }
            }
            Ext::PosInf => {}
            _ => return Err(Error::InvalidParameter(format!("a must be positive, got {a}"))),
        }
        Ok(HeatFlowField {
            phi,
            d,
            a,
            order,
            max_shift: true,
        })
    }

    /// Diagnostic mode: sum exponentials without the max shift.
    pub fn without_max_shift(mut self) -> Self {
        self.max_shift = false;
        self
    }

    pub fn phi(&self) -> &InitialDatum<S> {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn d(&self) -> S {
        self.d
    }

    pub fn a(&self) -> Ext<S> {
        self.a
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn with_order(&self, order: usize) -> Self {
        HeatFlowField {
            order,
            ..self.clone()
        }
    }

    /// log A with A = a, or 1 when a is infinite.
    pub fn log_anchor(&self) -> S {
        match self.a {
            Ext::Finite(a) => a.ln(),
            _ => S::zero(),
        }
    }

    fn check(&self, x: &[S], t: S) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::InvalidParameter(format!(
                "point has dimension {}, field has {}",
                x.len(),
                self.n()
            )));
        }
        if !(t > S::zero()) || !t.is_finite() {
            return Err(Error::OutsideDomain {
                value: t.as_f64(),
                domain: "t > 0".into(),
            });
        }
        Ok(())
    }

    /// Tilted summary of e^{(2<x,y> - |y|^2)/4t} phi(y) dy with statistic <xi, y>.
    fn tilted(&self, x: &[S], t: S, xi: &[S]) -> Result<Tilted<S>> {
        self.check(x, t)?;
        let two_t = S::lit(2.0) * t;
        let b: Vec<S> = x.iter().map(|v| *v / two_t).collect();
        let q = S::one() / (S::lit(4.0) * t);
        if !self.max_shift {
            return self.unshifted(&b, q, xi);
        }
        let mut out = self.phi.tilted(&b, q, xi, self.order);
        out.log_mass = out.log_mass - self.log_anchor();
        Ok(out)
    }

    /// Log w with the tilted mean vector and covariance; `jet_from` turns it into
    /// directional derivatives for any xi without another quadrature pass.
    pub fn full_moments(&self, x: &[S], t: S) -> Result<FullTilted<S>> {
        self.check(x, t)?;
        let two_t = S::lit(2.0) * t;
        let b: Vec<S> = x.iter().map(|v| *v / two_t).collect();
        let q = S::one() / (S::lit(4.0) * t);
        let mut out = self.phi.tilted_full(&b, q, self.order);
        out.log_mass = out.log_mass - self.log_anchor();
        Ok(out)
    }

    pub fn jet_from(&self, full: &FullTilted<S>, x: &[S], t: S, xi: &[S]) -> Jet<S> {
        self.assemble_jet(&full.along(xi), x, t, xi)
    }

    fn assemble_jet(&self, tl: &Tilted<S>, x: &[S], t: S, xi: &[S]) -> Jet<S> {
        let two_t = S::lit(2.0) * t;
        let dlogw = tl.mean / two_t;
        let d2logw = tl.var / (two_t * two_t);
        Jet {
            log_w: tl.log_mass,
            v: self.v_from_log_w(x, t, tl.log_mass),
            dv: dot(x, xi) / two_t - dlogw,
            d2v: dot(xi, xi) / two_t - d2logw,
            dlogw,
            d2logw,
        }
    }

    fn unshifted(&self, b: &[S], q: S, xi: &[S]) -> Result<Tilted<S>> {
        let (mut m0, mut m1, mut m2) = (S::zero(), S::zero(), S::zero());
        for piece in self.phi.pieces() {
            for (y, w) in piece.nodes(b, q, self.order) {
                let e = dot(b, &y) - q * dot(&y, &y);
                let s = dot(xi, &y);
                let m = w * e.exp();
                m0 = m0 + m;
                m1 = m1 + m * s;
                m2 = m2 + m * s * s;
            }
        }
        if !m0.is_finite() || !m2.is_finite() || m0 <= S::zero() {
            return Err(Error::Overflow);
        }
        let mean = m1 / m0;
        Ok(Tilted {
            log_mass: m0.ln() - self.log_anchor(),
            mean,
            var: m2 / m0 - mean * mean,
        })
    }

    fn zero_xi(&self) -> Vec<S> {
        vec![S::zero(); self.n()]
    }

    pub fn eval_log_w(&self, x: &[S], t: S) -> Result<S> {
        Ok(self.tilted(x, t, &self.zero_xi())?.log_mass)
    }

    pub fn eval_w(&self, x: &[S], t: S) -> Result<S> {
        Ok(self.eval_log_w(x, t)?.exp())
    }

    fn v_from_log_w(&self, x: &[S], t: S, log_w: S) -> S {
        let half_n = S::lit(self.n() as f64 * 0.5);
        let four_pi_t = S::lit(4.0) * S::PI() * t;
        (half_n - self.d) * four_pi_t.ln() + dot(x, x) / (S::lit(4.0) * t) - log_w
    }

    /// v_d = -log(U_d / A); errors with AboveCap when U_d >= a for finite a.
    pub fn eval_v(&self, x: &[S], t: S) -> Result<S> {
        let log_w = self.eval_log_w(x, t)?;
        let v = self.v_from_log_w(x, t, log_w);
        self.cap(x, t, v)?;
        Ok(v)
    }

    fn cap(&self, x: &[S], t: S, v: S) -> Result<()> {
        if self.a.is_finite() && !(v > S::zero()) {
            return Err(Error::AboveCap {
                x: x.iter().map(|c| c.as_f64()).collect(),
                t: t.as_f64(),
            });
        }
        Ok(())
    }

    /// U_d = A e^{-v_d}.
    pub fn eval_u(&self, x: &[S], t: S) -> Result<S> {
        let v = self.eval_v(x, t)?;
        Ok((self.log_anchor() - v).exp())
    }

    /// U_d = (4 pi t)^d (4 pi t)^{-n/2} int e^{-|x-y|^2/4t} phi(y) dy on the same nodes.
    pub fn eval_u_direct(&self, x: &[S], t: S) -> Result<S> {
        self.check(x, t)?;
        let two_t = S::lit(2.0) * t;
        let b: Vec<S> = x.iter().map(|v| *v / two_t).collect();
        let q = S::one() / (S::lit(4.0) * t);
        let mut terms = Vec::new();
        for piece in self.phi.pieces() {
            for (y, w) in piece.nodes(&b, q, self.order) {
                if w > S::zero() {
                    let d2 = y.iter().zip(x).fold(S::zero(), |acc, (a, c)| acc + (*a - *c) * (*a - *c));
                    terms.push(w.ln() - d2 * q);
                }
            }
        }
        let half_n = S::lit(self.n() as f64 * 0.5);
        let log_u = (self.d - half_n) * (S::lit(4.0) * S::PI() * t).ln() + log_sum_exp(&terms);
        if self.a.is_finite() && !(log_u < self.log_anchor()) {
            return Err(Error::AboveCap {
                x: x.iter().map(|c| c.as_f64()).collect(),
                t: t.as_f64(),
            });
        }
        Ok(log_u.exp())
    }

    /// int <xi, y>^order e^{(2<x,y> - |y|^2)/4t} a^{-1} phi(y) dy for order 0, 1, 2.
    pub fn moment(&self, x: &[S], t: S, xi: &[S], order: usize) -> Result<S> {
        let tl = self.tilted(x, t, xi)?;
        let w = tl.log_mass.exp();
        match order {
            0 => Ok(w),
            1 => Ok(w * tl.mean),
            2 => Ok(w * (tl.var + tl.mean * tl.mean)),
            _ => Err(Error::InvalidParameter(format!("moment order {order} not in 0..=2"))),
        }
    }

    /// d/dxi log w = m1 / (2t m0).
    pub fn dlogw(&self, x: &[S], t: S, xi: &[S]) -> Result<S> {
        Ok(self.tilted(x, t, xi)?.mean / (S::lit(2.0) * t))
    }

    /// d^2/dxi^2 log w = m2/(4t^2 m0) - (m1/(2t m0))^2, i.e. the tilted variance over 4t^2.
    pub fn d2logw(&self, x: &[S], t: S, xi: &[S]) -> Result<S> {
        Ok(self.tilted(x, t, xi)?.var / (S::lit(4.0) * t * t))
    }

    /// v_d and its first two derivatives along the unit vector xi.
    /// Does not apply the U < a check so that callers can report it separately.
    pub fn jet(&self, x: &[S], t: S, xi: &[S]) -> Result<Jet<S>> {
        let tl = self.tilted(x, t, xi)?;
        Ok(self.assemble_jet(&tl, x, t, xi))
    }

    /// jet() followed by the U < a check.
    pub fn jet_checked(&self, x: &[S], t: S, xi: &[S]) -> Result<Jet<S>> {
        let j = self.jet(x, t, xi)?;
        self.cap(x, t, j.v)?;
        Ok(j)
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + *x * *y)
}

/// (e^{t Laplacian} chi_[p,q])(x) in closed form, using erfc on the tails.
pub fn heat_1d_box_oracle(x: f64, t: f64, p: f64, q: f64) -> f64 {
    assert!(p < q && t > 0.0, "oracle needs p < q and t > 0");
    let s = 2.0 * t.sqrt();
    let al = (x - p) / s;
    let be = (x - q) / s;
    if be >= 0.0 {
        0.5 * (erfc(be) - erfc(al))
    } else if al <= 0.0 {
        0.5 * (erfc(-al) - erfc(-be))
    } else {
        0.5 * (2.0 - erfc(al) - erfc(-be))
    }
}

#[cfg(test)]
mod tests;
