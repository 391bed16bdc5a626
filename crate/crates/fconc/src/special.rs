//! Error-function family and the hot profile h(x) = erfc(-x/2)/2.
//!
//! Everything is evaluated in f64; generic wrappers cast at the boundary.

use std::f64::consts::PI;

use crate::scalar::Scalar;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Switch from exp(u^2)*erfc(u) to the continued fraction.
const ERFCX_CF_FROM: f64 = 2.5;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function exp(u^2)*erfc(u).
pub fn erfcx(u: f64) -> f64 {
    if u < ERFCX_CF_FROM {
        (u * u).exp() * erfc(u)
    } else {
        1.0 / (SQRT_PI * (u + cf_c(u)))
    }
}

/// c(u) with sqrt(pi)*erfcx(u) = 1/(u + c(u)), evaluated without cancellation.
pub fn cf_c(u: f64) -> f64 {
    if u >= ERFCX_CF_FROM {
        cf_backward(u)
    } else {
        1.0 / (SQRT_PI * erfcx(u)) - u
    }
}

/// Backward evaluation of c(u) = a1/(u + a2/(u + a3/(u + ...))), a_k = k/2.
/// The depth is chosen from u so that the truncation error is below 1e-17.
fn cf_backward(u: f64) -> f64 {
    let depth = (40.0 + 400.0 / (u * u)).min(20_000.0) as usize;
    let mut acc = 0.0;
    for k in (1..=depth).rev() {
        acc = (0.5 * k as f64) / (u + acc);
    }
    acc
}

/// h(x) = (4 pi)^(-1/2) int_0^inf exp(-(x-z)^2/4) dz = erfc(-x/2)/2.
pub fn hot_h(x: f64) -> f64 {
    0.5 * erfc(-0.5 * x)
}

/// log h(x), accurate in both tails.
pub fn log_hot_h(x: f64) -> f64 {
    let u = -0.5 * x;
    if u >= 0.5 {
        (0.5 * erfcx(u)).ln() - u * u
    } else if u <= -0.5 {
        (-0.5 * erfc(-u)).ln_1p()
    } else {
        (0.5 * erfc(u)).ln()
    }
}

/// h(x)/h'(x) = sqrt(pi)*erfcx(-x/2).
pub fn hot_ratio(x: f64) -> f64 {
    SQRT_PI * erfcx(-0.5 * x)
}

/// 1 - sqrt(pi)*u*erfcx(u) for u = -x/2, without cancellation for large u.
pub fn hot_one_minus_g(x: f64) -> f64 {
    let u = -0.5 * x;
    if u >= ERFCX_CF_FROM {
        let c = cf_backward(u);
        c / (u + c)
    } else {
        1.0 - SQRT_PI * u * erfcx(u)
    }
}

/// Gaussian density of the hot profile, h'(x) = exp(-x^2/4)/(2 sqrt(pi)).
pub fn hot_density(x: f64) -> f64 {
    (-0.25 * x * x).exp() / (2.0 * SQRT_PI)
}

/// Solves log h(x) = -r for x. r > 0.
///
/// Bracket, bisect to a coarse width, then safeguarded Newton on log h.
pub fn hot_x_of_r(r: f64) -> f64 {
    debug_assert!(r > 0.0);
    let target = -r;
    let f = |x: f64| log_hot_h(x) - target;
    // log h(x) ~ -x^2/4 for x -> -inf and ~ -erfc(x/2)/2 for x -> inf
    let mut lo = -2.0 * r.sqrt() - 8.0;
    while f(lo) > 0.0 {
        lo = 2.0 * lo - 1.0;
    }
    let mut hi = 2.0 * (-r.ln()).max(0.0).sqrt() + 8.0;
    while f(hi) < 0.0 {
        hi = 2.0 * hi + 1.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // d/dx log h = h'/h
        let step = fx * hot_ratio(x);
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || hi - lo <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

/// r -> (x, kappa_H(r)) in the r-coordinates of H = h^{-1} with a = 1.
pub fn hot_kappa(r: f64) -> f64 {
    r * hot_one_minus_g(hot_x_of_r(r))
}

/// ln Gamma for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = 0.5 * n as f64;
    (h * PI.ln() - ln_gamma(h + 1.0)).exp()
}

pub fn erf_s<S: Scalar>(x: S) -> S {
    S::lit(erf(x.as_f64()))
}

pub fn erfc_s<S: Scalar>(x: S) -> S {
    S::lit(erfc(x.as_f64()))
}
