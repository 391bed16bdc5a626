//! Gauss-Legendre rules and log-sum-exp accumulation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::Scalar;

/// Nodes and weights on [-1, 1], in f64.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut z = theta.cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [lo, hi] in the requested scalar type.
    pub fn mapped<S: Scalar>(&self, lo: S, hi: S) -> (Vec<S>, Vec<S>) {
        let half = (hi - lo) * S::lit(0.5);
        let mid = (hi + lo) * S::lit(0.5);
        let xs = self.nodes.iter().map(|&z| mid + half * S::lit(z)).collect();
        let ws = self.weights.iter().map(|&w| half * S::lit(w)).collect();
        (xs, ws)
    }

    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(mid + half * z))
            .sum::<f64>()
            * half
    }
}

/// (P_n(z), P_n'(z)) by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Shared cache of rules by order. Values do not depend on insertion order.
pub fn rule(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("rule cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
        .clone()
}

/// Weighted sample summary of a tilted 1-D measure: log of the total mass
/// and the mean and variance of a linear statistic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tilted<S> {
    pub log_mass: S,
    pub mean: S,
    pub var: S,
}

/// sum_i w_i exp(e_i) with the statistic s_i, summarized with the max shift.
/// Weights must be nonnegative and at least one must be positive.
pub fn tilted_sum<S: Scalar>(weights: &[S], exponents: &[S], stats: &[S]) -> Tilted<S> {
    let shift = exponents
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > S::zero())
        .map(|(e, _)| *e)
        .fold(S::neg_infinity(), S::max);
    let mut mass = S::zero();
    let mut first = S::zero();
    for ((&w, &e), &s) in weights.iter().zip(exponents).zip(stats) {
        let m = w * (e - shift).exp();
        mass = mass + m;
        first = first + m * s;
    }
    let mean = first / mass;
    let mut second = S::zero();
    for ((&w, &e), &s) in weights.iter().zip(exponents).zip(stats) {
        let m = w * (e - shift).exp();
        let c = s - mean;
        second = second + m * c * c;
    }
    Tilted {
        log_mass: shift + mass.ln(),
        mean,
        var: second / mass,
    }
}

/// Combines independent coordinates: log masses add, means add, variances add.
pub fn product<S: Scalar>(parts: &[Tilted<S>]) -> Tilted<S> {
    parts.iter().fold(
        Tilted {
            log_mass: S::zero(),
            mean: S::zero(),
            var: S::zero(),
        },
        |acc, p| Tilted {
            log_mass: acc.log_mass + p.log_mass,
            mean: acc.mean + p.mean,
            var: acc.var + p.var,
        },
    )
}

/// Mixture of measures: log-sum-exp of masses, law of total variance.
pub fn mixture<S: Scalar>(parts: &[Tilted<S>]) -> Tilted<S> {
    let shift = parts
        .iter()
        .map(|p| p.log_mass)
        .fold(S::neg_infinity(), S::max);
    let mut mass = S::zero();
    let mut first = S::zero();
    for p in parts {
        let m = (p.log_mass - shift).exp();
        mass = mass + m;
        first = first + m * p.mean;
    }
    let mean = first / mass;
    let mut second = S::zero();
    for p in parts {
        let m = (p.log_mass - shift).exp();
        let c = p.mean - mean;
        second = second + m * (p.var + c * c);
    }
    Tilted {
        log_mass: shift + mass.ln(),
        mean,
        var: second / mass,
    }
}

/// log sum_i exp(x_i).
pub fn log_sum_exp<S: Scalar>(xs: &[S]) -> S {
    let shift = xs.iter().copied().fold(S::neg_infinity(), S::max);
    if shift == S::neg_infinity() {
        return shift;
    }
    let s = xs.iter().fold(S::zero(), |acc, &x| acc + (x - shift).exp());
    shift + s.ln()
}
