//! Certified Gaussian sums over Λ∖{0}, the smoothing parameter, and λ₁.
//!
//! Truncation error is certified with the Gaussian tail bound
//! `ρ_s({‖x‖² ≥ (1+ε′)s²n/2π}) ≤ ((1+ε′)e^{−ε′})^{n/2}·ρ_s(Λ)`; since
//! `ρ_s(Λ) ≤ 1 + value + tail` this gives `tail ≤ β(1+value)/(1−β)` for
//! `β < 1/2`.

use core::f64::consts::PI;

use crate::basis::{norm2, Basis};
use crate::enumerate::BallEnum;
use crate::error::{domain, positive, unit_open, Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-6;
/// Per-probe sum tolerance inside bisection, relative to ε.
pub const PROBE_TOL_FACTOR: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;
const MAX_BRACKET_GROWTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedSum {
    /// Partial sum over enumerated points.
    pub value: f64,
    /// Certified bound on the omitted mass.
    pub tail_bound: f64,
    pub s: f64,
    /// Enumeration radius the certificate refers to.
    pub radius: f64,
    /// Nonzero points summed.
    pub points: u64,
}

impl CertifiedSum {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingResult {
    pub eta: f64,
    pub eps: f64,
    /// Final bracket: the sum exceeds ε at `lo` and is at most ε at `hi`.
    pub bracket: (f64, f64),
    /// Relative bracket width actually achieved.
    pub rtol: f64,
    /// `|Δ ln ρ| / |Δ ln s|` across the final bracket.
    pub log_slope: f64,
    pub iterations: usize,
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `((1+ε′)e^{−ε′})^{n/2}` with `ε′ = 2πR²/(s²n) − 1`, or 1 when ε′ ≤ 0.
pub fn tail_factor(n: usize, s: f64, radius: f64) -> f64 {
    let e = 2.0 * PI * radius * radius / (s * s * n as f64) - 1.0;
    if e <= 0.0 {
        1.0
    } else {
        libm::exp(0.5 * n as f64 * (libm::log1p(e) - e))
    }
}

/// Tail certificate for a partial sum `value` computed out to `radius`.
pub fn certified_tail(n: usize, s: f64, radius: f64, value: f64) -> f64 {
    let beta = tail_factor(n, s, radius);
    if beta >= 0.5 {
        f64::INFINITY
    } else {
        beta * (1.0 + value) / (1.0 - beta)
    }
}

/// Smallest radius whose tail factor is at most `beta` (bisection on ε′).
fn radius_for_factor(n: usize, s: f64, beta: f64) -> f64 {
    let target = libm::log(beta) / (0.5 * n as f64);
    let g = |e: f64| libm::log1p(e) - e;
    let mut hi = 1.0;
    while g(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    s * libm::sqrt(n as f64 * (1.0 + hi) / (2.0 * PI))
}

/// `ρ_s(Λ(B)∖{0})` with a certified tail no larger than `tol`.
pub fn rho_sum_nonzero(b: &Basis, s: f64, tol: f64) -> Result<CertifiedSum> {
    positive("s", s)?;
    positive("tol", tol)?;
    let n = b.dim();
    let mut e = BallEnum::new(b);
    let mut value_est = 0.0;
    let mut radius = 0.0;
    for _ in 0..64 {
        let beta = (tol / (1.0 + value_est + tol)).min(0.25);
        radius = radius_for_factor(n, s, beta * 0.999).max(radius * 1.25);
        e.reset(&alloc::vec![0.0; n], radius * radius);
        let mut acc = Neumaier::default();
        let mut points = 0;
        while let Some(step) = e.advance() {
            step?;
            if e.coefs().iter().all(|&c| c == 0) {
                continue;
            }
            points += 1;
            acc.add(libm::exp(-PI * norm2(e.point()) / (s * s)));
        }
        let value = acc.total();
        let tail_bound = certified_tail(n, s, radius, value);
        if tail_bound <= tol {
            return Ok(CertifiedSum { value, tail_bound, s, radius, points });
        }
        value_est = value;
    }
    Err(Error::Regime(alloc::format!("tail certificate did not reach tol {tol} at s = {s}")))
}

/// `ρ_s(L^k ∖ {0})` from a certified sum over the factor lattice `L`.
pub fn product_rho_sum_nonzero(base: &Basis, k: u32, s: f64, tol: f64) -> Result<CertifiedSum> {
    positive("tol", tol)?;
    if k == 0 {
        return Err(domain("k", "power must be at least 1"));
    }
    let kf = k as f64;
    let mut base_tol = tol / (2.0 * kf);
    for _ in 0..32 {
        let c = rho_sum_nonzero(base, s, base_tol)?;
        let ln_a = libm::log1p(c.value);
        let value = libm::expm1(kf * ln_a);
        let tail = libm::exp(kf * ln_a) * libm::expm1(kf * libm::log1p(c.tail_bound / (1.0 + c.value)));
        if tail <= tol {
            return Ok(CertifiedSum { value, tail_bound: tail, s, radius: c.radius, points: c.points });
        }
        base_tol *= 0.5 * tol / tail;
    }
    Err(Error::Regime(alloc::format!("product tail did not reach tol {tol}")))
}

/// Length of a shortest nonzero vector.
pub fn lambda1(b: &Basis) -> Result<f64> {
    let n = b.dim();
    let col_min = b.columns().map(norm2).fold(f64::INFINITY, f64::min);
    let g = b.min_gram_schmidt();
    let mut r2 = (g * g).min(col_min);
    let mut e = BallEnum::new(b);
    let zero = alloc::vec![0.0; n];
    loop {
        e.reset(&zero, r2);
        let mut best = f64::INFINITY;
        while let Some(step) = e.advance() {
            step?;
            if e.coefs().iter().any(|&c| c != 0) {
                best = best.min(norm2(e.point()));
            }
        }
        if best.is_finite() {
            return Ok(libm::sqrt(best));
        }
        r2 = f64::min(4.0 * r2, col_min);
    }
}

/// η_ε(Λ(B)): smallest `s` with `ρ_{1/s}(Λ*∖{0}) ≤ ε`.
pub fn smoothing_parameter(b: &Basis, eps: f64, rtol: f64) -> Result<SmoothingResult> {
    unit_open("eps", eps)?;
    let d = b.dual()?;
    let l1 = lambda1(&d)?;
    let tol = eps * PROBE_TOL_FACTOR;
    bisect_eta(b.dim(), l1, eps, rtol, |s| rho_sum_nonzero(&d, s, tol))
}

/// η_ε(L^k) for the `k`-fold orthogonal power of the lattice `L = Λ(base)`,
/// with sums evaluated as products of factor sums.
pub fn smoothing_parameter_power(base: &Basis, k: u32, eps: f64, rtol: f64) -> Result<SmoothingResult> {
    unit_open("eps", eps)?;
    if k == 0 {
        return Err(domain("k", "power must be at least 1"));
    }
    let d = base.dual()?;
    let l1 = lambda1(&d)?;
    let tol = eps * PROBE_TOL_FACTOR;
    bisect_eta(base.dim() * k as usize, l1, eps, rtol, |s| product_rho_sum_nonzero(&d, k, s, tol))
}

fn bisect_eta(
    n: usize,
    lambda1_dual: f64,
    eps: f64,
    rtol: f64,
    mut sum_at: impl FnMut(f64) -> Result<CertifiedSum>,
) -> Result<SmoothingResult> {
    positive("rtol", rtol)?;
    if rtol >= 1.0 {
        return Err(domain("rtol", "must be below 1"));
    }
    // ρ_{1/η}(Λ*∖0) is decreasing in η.
    let mut probe = |eta: f64| sum_at(1.0 / eta);
    let mut lo = libm::sqrt(libm::log(1.0 / eps) / PI) / lambda1_dual / 2.0;
    let mut hi = 2.0 * libm::sqrt(n as f64) / lambda1_dual;
    let f_lo0 = probe(lo)?;
    if f_lo0.value <= eps {
        return Err(Error::Bracket(alloc::format!(
            "sum {} at lower end {lo} is already at most eps {eps}",
            f_lo0.value
        )));
    }
    let mut f_lo = f_lo0.value;
    let mut f_hi = probe(hi)?;
    let mut grown = 0;
    while f_hi.upper() > eps {
        if grown == MAX_BRACKET_GROWTH {
            return Err(Error::Bracket(alloc::format!("sum {} still above eps {eps} at upper end {hi}", f_hi.value)));
        }
        lo = hi;
        f_lo = f_hi.value;
        hi *= 2.0;
        f_hi = probe(hi)?;
        grown += 1;
    }
    let mut f_hi = f_hi.value;
    let mut iterations = 0;
    while hi - lo > rtol * hi && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let c = probe(mid)?;
        let below = if c.upper() <= eps {
            true
        } else if c.value > eps {
            false
        } else {
            c.value + 0.5 * c.tail_bound <= eps
        };
        if below {
            hi = mid;
            f_hi = c.value;
        } else {
            lo = mid;
            f_lo = c.value;
        }
        iterations += 1;
    }
    let log_slope = if hi > lo && f_lo > 0.0 && f_hi > 0.0 {
        (libm::log(f_lo) - libm::log(f_hi)).abs() / (libm::log(hi) - libm::log(lo))
    } else {
        0.0
    };
    Ok(SmoothingResult { eta: hi, eps, bracket: (lo, hi), rtol: (hi - lo) / hi, log_slope, iterations })
}

/// `t = √(1 + ln r / ln(1/ε))`: scaling `s` down by `t` turns an ε bound into ε/r.
pub fn scaled_eps_factor(eps: f64, r: f64) -> Result<f64> {
    unit_open("eps", eps)?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err(domain("r", alloc::format!("must be a finite number ≥ 1, got {r}")));
    }
    Ok(libm::sqrt(1.0 + libm::log(r) / libm::log(1.0 / eps)))
}

/// `γ′ = γ·√(ln(1/ε_Y)/ln(1/ε_N))`.
pub fn gamma_approx_factor(eps_y: f64, eps_n: f64, gamma: f64) -> Result<f64> {
    unit_open("epsY", eps_y)?;
    unit_open("epsN", eps_n)?;
    positive("gamma", gamma)?;
    if eps_y > eps_n {
        return Err(domain("epsY", "must not exceed epsN"));
    }
    Ok(gamma * libm::sqrt(libm::log(1.0 / eps_y) / libm::log(1.0 / eps_n)))
}
