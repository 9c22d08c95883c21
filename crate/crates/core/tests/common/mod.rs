//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use latsmooth_core::Basis;
use std::f64::consts::PI;

/// A basis near `scale·I` with entries perturbed by up to `spread·scale`.
pub fn perturbed_basis(n: usize, scale: f64, spread: f64, noise: &[f64]) -> Basis {
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let col = (0..n)
            .map(|i| scale * (if i == j { 1.0 } else { 0.0 } + spread * (2.0 * noise[(j * n + i) % noise.len()] - 1.0)))
            .collect();
        cols.push(col);
    }
    Basis::from_columns(&cols).expect("perturbed identity is well-conditioned")
}

/// Small deterministic generator for picking test instances.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.next_f64()).collect()
    }

    pub fn basis(&mut self, n: usize, scale: f64) -> Basis {
        let noise = self.vec(n * n);
        perturbed_basis(n, scale, 0.3, &noise)
    }
}

/// All coefficient vectors in `[-k, k]^n`.
pub fn coef_box(n: usize, k: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-k..=k).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn point_of(b: &Basis, c: &[i64]) -> Vec<f64> {
    let n = b.dim();
    (0..n).map(|i| (0..n).map(|j| b.get(i, j) * c[j] as f64).sum()).collect()
}

pub fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Frobenius norm of `B⁻¹`, an upper bound on its operator norm.
pub fn inv_norm(b: &Basis) -> f64 {
    let n = b.dim();
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            b.coefficients(&e).iter().map(|v| v * v).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// Lattice points within `r` of `center` by exhausting a coefficient box.
pub fn brute_ball(b: &Basis, center: &[f64], r: f64) -> Vec<Vec<i64>> {
    let c0: Vec<i64> = b.coefficients(center).iter().map(|c| c.round() as i64).collect();
    let k = (r * inv_norm(b)).ceil() as i64 + 1;
    let mut out: Vec<Vec<i64>> = coef_box(b.dim(), k)
        .into_iter()
        .map(|d| d.iter().zip(&c0).map(|(a, b)| a + b).collect::<Vec<i64>>())
        .filter(|c| d2(&point_of(b, c), center) <= r * r)
        .collect();
    out.sort();
    out
}

/// `Σ_{c ∈ [-k,k]^n ∖ 0} e^{−π‖Bc‖²/s²}`.
pub fn brute_rho(b: &Basis, s: f64, k: i64) -> f64 {
    coef_box(b.dim(), k)
        .iter()
        .filter(|c| c.iter().any(|&x| x != 0))
        .map(|c| (-PI * d2(&point_of(b, c), &vec![0.0; b.dim()]) / (s * s)).exp())
        .sum()
}

/// Composite Simpson rule.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `γ_s([−a, a])` in one dimension by quadrature of `e^{−πx²/s²}/s`.
pub fn gamma_interval(a: f64, s: f64) -> f64 {
    simpson(|x| (-PI * x * x / (s * s)).exp() / s, -a, a, 20_000)
}

/// `2Σ_{k≥1} e^{−πk²/s²}` by direct summation.
pub fn rho_z(s: f64) -> f64 {
    (1..=200).map(|k| 2.0 * (-PI * (k * k) as f64 / (s * s)).exp()).sum()
}

/// Two-sided 99.9% normal quantile used when a single Monte Carlo estimate
/// is compared against an exact value; the reported 95% half-width would
/// miss one comparison in twenty across a suite.
pub const Z999: f64 = 3.29;

pub fn within(est: &latsmooth_core::estimate::ProbEstimate, exact: f64) -> bool {
    (est.mean - exact).abs() <= est.halfwidth * Z999 / latsmooth_core::estimate::Z95
}
