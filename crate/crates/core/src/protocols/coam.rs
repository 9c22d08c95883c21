//! The coAM shell protocol. The prover claims the sizes `K_i` of the dual
//! shells `S_0 = {0 < ‖v‖ ≤ 1}`, `S_i = {(1+α)^{i−1} < ‖v‖ ≤ (1+α)^i}`
//! for `i ≤ T`; the verifier accepts iff `Σ K_i e^{−π(1+α)^{2i}} ≥ (ε_Y+ε_N)/2`,
//! with each claim backed by a set-size lower bound.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::{norm2, Basis};
use crate::enumerate::{BallEnum, LatticePoint};
use crate::error::{domain, positive, unit_open, Result};

use super::Outcome;

/// The logarithm used in `R` and `T`. Its base is unstated; natural log.
pub fn protocol_log(x: f64) -> f64 {
    libm::log(x)
}

/// `R = n(1 + log(1/ε_Y))` and `T = ⌈log √R / log(1+α)⌉`.
pub fn coam_parameters(n: usize, alpha: f64, eps_y: f64) -> Result<(f64, u32)> {
    positive("alpha", alpha)?;
    unit_open("epsY", eps_y)?;
    let big_r = n as f64 * (1.0 + protocol_log(1.0 / eps_y));
    let t = libm::ceil(protocol_log(libm::sqrt(big_r)) / protocol_log(1.0 + alpha)).max(0.0) as u32;
    Ok((big_r, t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellClaims {
    pub alpha: f64,
    pub eps_y: f64,
    pub eps_n: f64,
    pub big_r: f64,
    pub t: u32,
    /// `K_0 … K_T`.
    pub counts: Vec<u64>,
}

impl ShellClaims {
    /// `e^{−π(1+α)^{2i}}`.
    pub fn weight(&self, i: usize) -> f64 {
        libm::exp(-PI * libm::pow(1.0 + self.alpha, 2.0 * i as f64))
    }

    pub fn weighted_sum(&self) -> f64 {
        self.counts.iter().enumerate().map(|(i, &k)| k as f64 * self.weight(i)).sum()
    }

    /// `(ε_Y + ε_N)/2`.
    pub fn threshold(&self) -> f64 {
        0.5 * (self.eps_y + self.eps_n)
    }

    /// `1/(1−β) = (ε_Y+ε_N)/(2ε_Y)`: the inflation a cheating prover needs.
    pub fn inflation_factor(&self) -> f64 {
        (self.eps_y + self.eps_n) / (2.0 * self.eps_y)
    }

    /// Largest weighted sum reachable when no claim exceeds
    /// `|S_i|/(1−β)`, taking these claims as the exact counts.
    pub fn max_uninflated_sum(&self) -> f64 {
        let f = self.inflation_factor();
        self.counts.iter().enumerate().map(|(i, &k)| libm::floor(k as f64 * f) * self.weight(i)).sum()
    }

    pub fn with_counts(&self, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != self.counts.len() {
            return Err(domain("counts", alloc::format!("expected {} shells", self.counts.len())));
        }
        Ok(Self { counts, ..self.clone() })
    }
}

/// Shell index of a nonzero point of norm `norm`, if it lies within `(1+α)^T`.
fn shell_of(norm: f64, alpha: f64, t: u32) -> Option<usize> {
    if norm <= 1.0 {
        return Some(0);
    }
    let base = 1.0 + alpha;
    let mut i = libm::ceil(protocol_log(norm) / protocol_log(base)).max(1.0) as i64;
    while libm::pow(base, i as f64) < norm {
        i += 1;
    }
    while i > 1 && libm::pow(base, (i - 1) as f64) >= norm {
        i -= 1;
    }
    (i as u32 <= t).then_some(i as usize)
}

/// Nonzero dual points grouped by shell, from one enumeration out to `(1+α)^T`.
pub fn coam_shells(b: &Basis, alpha: f64, eps_y: f64) -> Result<Vec<Vec<LatticePoint>>> {
    let n = b.dim();
    let (_, t) = coam_parameters(n, alpha, eps_y)?;
    let d = b.dual()?;
    let outer = libm::pow(1.0 + alpha, t as f64);
    let mut shells = vec![Vec::new(); t as usize + 1];
    let mut e = BallEnum::new(&d);
    e.reset(&vec![0.0; n], outer * outer);
    while let Some(step) = e.advance() {
        step?;
        if e.coefs().iter().all(|&c| c == 0) {
            continue;
        }
        if let Some(i) = shell_of(libm::sqrt(norm2(e.point())), alpha, t) {
            shells[i].push(LatticePoint { point: e.point().to_vec(), coefs: e.coefs().to_vec() });
        }
    }
    Ok(shells)
}

/// The honest prover's claims: exact shell sizes.
pub fn coam_shell_counts(b: &Basis, alpha: f64, eps_y: f64, eps_n: f64) -> Result<ShellClaims> {
    unit_open("epsN", eps_n)?;
    let (big_r, t) = coam_parameters(b.dim(), alpha, eps_y)?;
    let counts = coam_shells(b, alpha, eps_y)?.iter().map(|s| s.len() as u64).collect();
    Ok(ShellClaims { alpha, eps_y, eps_n, big_r, t, counts })
}

/// The verifier's final arithmetic test.
pub fn coam_verdict(claims: &ShellClaims) -> Outcome {
    Outcome::from_bool(claims.weighted_sum() >= claims.threshold())
}
