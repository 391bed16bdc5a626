//! Tabulated r-profile of the F built from the hot curvature with a
//! logarithmic floor: f(r) = max(k log r, sigma_H(r)) / r and
//! F'(r) = -r^{-1/2} exp(G(r)), G(r) = int_r^inf f(xi)/xi dxi, F(1) = 0.
//!
//! Everything lives in u = log r. G is integrated panel by panel with
//! Gauss-Legendre, splitting panels where the two branches of the max cross.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::quadrature::GaussLegendre;
use crate::special::hot_kappa;

const NQ: usize = 16;
const U_LO: f64 = -28.0;
const U_HI: f64 = 28.0;
const PANEL: f64 = 0.125;

pub fn sigma_hot(r: f64) -> f64 {
    r * (hot_kappa(r) - 0.5)
}

struct Basis {
    z: [f64; NQ],
    w: [f64; NQ],
    bary: [f64; NQ],
    /// tail[j][m] = int_{z_j}^{1} l_m(z) dz for the Lagrange basis l_m on the nodes.
    tail: [[f64; NQ]; NQ],
}

fn legendre_all(n: usize, z: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = z;
    }
    for k in 2..=n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * z * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

fn basis() -> &'static Basis {
    static B: OnceLock<Basis> = OnceLock::new();
    B.get_or_init(|| {
        let gl = GaussLegendre::new(NQ);
        let mut z = [0.0; NQ];
        let mut w = [0.0; NQ];
        let mut bary = [0.0; NQ];
        for j in 0..NQ {
            z[j] = gl.nodes[j];
            w[j] = gl.weights[j];
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            bary[j] = sign * ((1.0 - z[j] * z[j]) * w[j]).sqrt();
        }
        // l_m = sum_k w_m (k + 1/2) P_k(z_m) P_k
        let pk_nodes: Vec<Vec<f64>> = z.iter().map(|&zm| legendre_all(NQ, zm)).collect();
        let mut tail = [[0.0; NQ]; NQ];
        for j in 0..NQ {
            let p = &pk_nodes[j];
            // int_{z}^{1} P_0 = 1 - z; int_{z}^{1} P_k = (P_{k-1}(z) - P_{k+1}(z)) / (2k + 1)
            let mut ip = vec![0.0; NQ];
            ip[0] = 1.0 - z[j];
            for k in 1..NQ {
                ip[k] = (p[k - 1] - p[k + 1]) / (2.0 * k as f64 + 1.0);
            }
            for m in 0..NQ {
                tail[j][m] = (0..NQ)
                    .map(|k| w[m] * (k as f64 + 0.5) * pk_nodes[m][k] * ip[k])
                    .sum();
            }
        }
        Basis {
            z,
            w,
            bary,
            tail,
        }
    })
}

/// Barycentric interpolation of node values at z in [-1, 1].
fn interpolate(vals: &[f64; NQ], z: f64) -> f64 {
    let b = basis();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..NQ {
        let dz = z - b.z[j];
        if dz == 0.0 {
            return vals[j];
        }
        let c = b.bary[j] / dz;
        num += c * vals[j];
        den += c;
    }
    num / den
}

#[derive(Debug, Clone)]
struct Segment {
    a: f64,
    b: f64,
    /// G at the Gauss nodes of the segment.
    g: [f64; NQ],
    /// P(a) = int_0^a exp(u/2 + G(u)) du
    p_a: f64,
}

#[derive(Debug)]
pub struct FlooredHotTable {
    pub k: f64,
    segs: Vec<Segment>,
    crossings: Vec<f64>,
    g_lo: f64,
    q_lo: f64,
    p_lo: f64,
    g_hi: f64,
    p_hi: f64,
}

impl FlooredHotTable {
    fn sigma_star(&self, u: f64) -> f64 {
        sigma_star(self.k, u)
    }

    /// Integrand of G in u.
    fn q(&self, u: f64) -> f64 {
        self.sigma_star(u) * (-u).exp()
    }

    fn build(k: f64) -> Self {
        let b = basis();
        let n_knots = ((U_HI - U_LO) / PANEL).round() as usize;
        let knots: Vec<f64> = (0..=n_knots).map(|i| U_LO + PANEL * i as f64).collect();
        let diff = |u: f64| sigma_hot(u.exp()) - k * u;
        let mut crossings = Vec::new();
        let mut prev = diff(knots[0]);
        for w in knots.windows(2) {
            let cur = diff(w[1]);
            if (prev < 0.0) != (cur < 0.0) {
                let (mut lo, mut hi) = (w[0], w[1]);
                let lo_neg = prev < 0.0;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if (diff(mid) < 0.0) == lo_neg {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                crossings.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
        let mut cuts = knots.clone();
        cuts.extend(crossings.iter().copied());
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-13);

        let mut table = FlooredHotTable {
            k,
            segs: Vec::with_capacity(cuts.len()),
            crossings,
            g_lo: 0.0,
            q_lo: 0.0,
            p_lo: 0.0,
            g_hi: 0.0,
            p_hi: 0.0,
        };
        let g_top = table.tail_g(U_HI);

        // G from the top down
        let mut segs: Vec<Segment> = Vec::with_capacity(cuts.len() - 1);
        let mut g_b = g_top;
        for w in cuts.windows(2).rev() {
            let (sa, sb) = (w[0], w[1]);
            let half = 0.5 * (sb - sa);
            let mid = 0.5 * (sb + sa);
            let mut q = [0.0; NQ];
            for j in 0..NQ {
                q[j] = table.q(mid + half * b.z[j]);
            }
            let mut g = [0.0; NQ];
            for j in 0..NQ {
                let partial: f64 = (0..NQ).map(|m| b.tail[j][m] * q[m]).sum();
                g[j] = g_b + half * partial;
            }
            let total: f64 = (0..NQ).map(|m| b.w[m] * q[m]).sum::<f64>() * half;
            segs.push(Segment {
                a: sa,
                b: sb,
                g,
                p_a: 0.0,
            });
            g_b += total;
        }
        segs.reverse();

        // P(u) = int_0^u exp(s/2 + G(s)) ds, anchored at u = 0
        let pieces: Vec<f64> = segs
            .iter()
            .map(|s| {
                let half = 0.5 * (s.b - s.a);
                let mid = 0.5 * (s.b + s.a);
                (0..NQ)
                    .map(|j| b.w[j] * (0.5 * (mid + half * b.z[j]) + s.g[j]).exp())
                    .sum::<f64>()
                    * half
            })
            .collect();
        let zero = segs
            .iter()
            .position(|s| s.a.abs() < 1e-12)
            .expect("u = 0 is a knot");
        let mut acc = 0.0;
        for i in zero..segs.len() {
            segs[i].p_a = acc;
            acc += pieces[i];
        }
        table.p_hi = acc;
        let mut acc = 0.0;
        for i in (0..zero).rev() {
            acc -= pieces[i];
            segs[i].p_a = acc;
        }
        table.p_lo = acc;
        table.g_hi = g_top;
        table.g_lo = g_b;
        table.q_lo = table.q(U_LO);
        table.segs = segs;
        table
    }

    /// G(u) beyond the table: numerator of the integrand continued linearly in u.
    fn tail_g(&self, u: f64) -> f64 {
        let d = 1e-2;
        let slope = (self.sigma_star(u + d) - self.sigma_star(u - d)) / (2.0 * d);
        (-u).exp() * (self.sigma_star(u) + slope)
    }

    fn segment(&self, u: f64) -> &Segment {
        let i = self.segs.partition_point(|s| s.b < u);
        &self.segs[i.min(self.segs.len() - 1)]
    }

    pub fn g(&self, u: f64) -> f64 {
        if u >= U_HI {
            return self.tail_g(u);
        }
        if u < U_LO {
            return self.g_lo + self.q_lo * (U_LO - u);
        }
        let s = self.segment(u);
        let z = (2.0 * u - s.a - s.b) / (s.b - s.a);
        interpolate(&s.g, z)
    }

    /// P(u) = int_0^u exp(s/2 + G(s)) ds, so that F(r) = -P(log r).
    pub fn p(&self, u: f64) -> f64 {
        if u >= U_HI {
            return self.p_hi + 2.0 * self.g_hi.exp() * ((0.5 * u).exp() - (0.5 * U_HI).exp());
        }
        if u < U_LO {
            // exponent s/2 + g_lo + q_lo (U_LO - s) is linear in s
            let c1 = 0.5 - self.q_lo;
            let c0 = self.g_lo + self.q_lo * U_LO;
            let integral = if c1.abs() < 1e-12 {
                c0.exp() * (U_LO - u)
            } else {
                c0.exp() * ((c1 * U_LO).exp() - (c1 * u).exp()) / c1
            };
            return self.p_lo - integral;
        }
        let s = self.segment(u);
        let b = basis();
        let half = 0.5 * (u - s.a);
        let mid = 0.5 * (u + s.a);
        let part: f64 = (0..NQ)
            .map(|j| {
                let x = mid + half * b.z[j];
                let z = (2.0 * x - s.a - s.b) / (s.b - s.a);
                b.w[j] * (0.5 * x + interpolate(&s.g, z)).exp()
            })
            .sum::<f64>()
            * half;
        s.p_a + part
    }

    /// (F, F', F'') at r > 0.
    pub fn profile(&self, r: f64) -> (f64, f64, f64) {
        let u = r.ln();
        let eg = self.g(u).exp();
        let f = self.sigma_star(u) / r;
        let d1 = -eg / r.sqrt();
        let d2 = (0.5 + f) * eg / (r * r.sqrt());
        (-self.p(u), d1, d2)
    }

    pub fn kappa(&self, r: f64) -> f64 {
        0.5 + self.sigma_star(r.ln()) / r
    }

    pub fn sigma(&self, r: f64) -> f64 {
        self.sigma_star(r.ln())
    }

    /// Crossover points (in log r) of k log r and sigma_H.
    pub fn crossings(&self) -> &[f64] {
        &self.crossings
    }

    /// Solves F(r) = s.
    pub fn inverse_r(&self, s: f64) -> f64 {
        // F is decreasing in u; -P(u) = s
        let target = -s;
        let mut lo = -1.0;
        while self.p(lo) > target {
            lo *= 2.0;
            if lo < -700.0 {
                return lo.exp();
            }
        }
        let mut hi = 1.0;
        while self.p(hi) < target {
            hi *= 2.0;
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..200 {
            let val = self.p(u) - target;
            if val < 0.0 {
                lo = u;
            } else {
                hi = u;
            }
            let deriv = (0.5 * u + self.g(u)).exp();
            let mut next = u - val / deriv;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 1e-15 * (1.0 + u.abs()) {
                u = next;
                break;
            }
            u = next;
        }
        u.exp()
    }
}

fn sigma_star(k: f64, u: f64) -> f64 {
    (k * u).max(sigma_hot(u.exp()))
}

/// Tables are deterministic in k, so they are shared.
pub fn table(k: f64) -> Arc<FlooredHotTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FlooredHotTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("table cache").get(&k.to_bits()) {
        return t.clone();
    }
    let built = Arc::new(FlooredHotTable::build(k));
    cache
        .lock()
        .expect("table cache")
        .entry(k.to_bits())
        .or_insert(built)
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_matrix_integrates_polynomials() {
        let b = basis();
        // int_{z_j}^1 z^3 dz = (1 - z_j^4)/4
        for j in 0..NQ {
            let got: f64 = (0..NQ).map(|m| b.tail[j][m] * b.z[m].powi(3)).sum();
            let want = (1.0 - b.z[j].powi(4)) / 4.0;
            assert!((got - want).abs() < 1e-14, "j={j}");
        }
    }

    #[test]
    fn barycentric_interpolation_is_exact_for_polynomials() {
        let b = basis();
        let mut vals = [0.0; NQ];
        for j in 0..NQ {
            vals[j] = 1.0 + b.z[j] - 3.0 * b.z[j].powi(5);
        }
        for &z in &[-1.0f64, -0.3, 0.77, 1.0] {
            let want = 1.0 + z - 3.0 * z.powi(5);
            assert!((interpolate(&vals, z) - want).abs() < 1e-13);
        }
    }

    /// Independent oracle: G by adaptive Simpson in u on the raw integrand.
    fn g_oracle(k: f64, u: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 1e-14 {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(f, a, m, fa, flm, fm, depth - 1) + simpson(f, m, b, fm, frm, fb, depth - 1)
        }
        let q = move |s: f64| sigma_star(k, s) * (-s).exp();
        let top = 45.0;
        let mut total = 0.0;
        let mut a = u;
        while a < top {
            let b = (a + 1.0).min(top);
            total += simpson(&q, a, b, q(a), q(0.5 * (a + b)), q(b), 30);
            a = b;
        }
        total
    }

    #[test]
    fn g_matches_simpson_oracle() {
        let t = table(0.3);
        for &u in &[-5.0, 0.0, 1.3, 4.0, 12.0] {
            let want = g_oracle(0.3, u);
            assert!((t.g(u) - want).abs() < 1e-9 * want.abs().max(1e-3), "u={u} {} {want}", t.g(u));
        }
    }

    #[test]
    fn k_point_two_never_crosses_but_larger_k_does() {
        assert!(table(0.2).crossings().is_empty());
        assert!(!table(0.3).crossings().is_empty());
    }

    #[test]
    fn derivative_of_p_is_integrand() {
        let t = table(0.2);
        for &u in &[-3.0, 0.4, 6.0] {
            let h = 1e-5;
            let fd = (t.p(u + h) - t.p(u - h)) / (2.0 * h);
            let want = (0.5 * u + t.g(u)).exp();
            assert!((fd - want).abs() < 1e-7 * want, "u={u}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let t = table(0.2);
        for &r in &[1e-6, 0.01, 0.5, 1.0, 3.0, 100.0, 1e5] {
            let (f, _, _) = t.profile(r);
            let back = t.inverse_r(f);
            assert!((back - r).abs() <= 1e-10 * r, "r={r} back={back}");
        }
    }
}
