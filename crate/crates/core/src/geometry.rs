//! Voronoi-cell and ball-overlap measures, and checkers for the two-sided
//! Gaussian-sum characterizations of those measures.

use alloc::vec;
use core::f64::consts::PI;

use crate::basis::{norm2, Basis};
use crate::enumerate::BallEnum;
use crate::error::{domain, positive, Error, Result};
use crate::estimate::{Mc, ProbEstimate, Tally};
use crate::gauss::{rho_sum_nonzero, smoothing_parameter, DEFAULT_RTOL};
use crate::samplers::{fill_ball, fill_gaussian};

/// Tolerance of every certified sum feeding a sandwich bound.
pub const SANDWICH_SUM_TOL: f64 = 1e-10;

/// Outcome of a statistical inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Holds even after moving the estimate by its full half-width.
    Holds,
    /// Fails even after moving the estimate by its full half-width.
    Violated,
    /// The confidence interval straddles a bound.
    Undecided,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Violated => "violated",
            Status::Undecided => "undecided",
        }
    }
}

/// `lower ≤ middle ≤ upper`, with the middle estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub lower: f64,
    pub middle: ProbEstimate,
    pub upper: f64,
    pub status: Status,
    /// Both inequalities hold within one half-width of slack.
    pub satisfied: bool,
}

impl SandwichReport {
    pub fn new(lower: f64, middle: ProbEstimate, upper: f64) -> Self {
        let (m, hw) = (middle.mean, middle.halfwidth);
        let satisfied = lower <= m + hw && m - hw <= upper;
        let status = if !satisfied {
            Status::Violated
        } else if lower <= m - hw && m + hw <= upper {
            Status::Holds
        } else {
            Status::Undecided
        };
        Self { lower, middle, upper, status, satisfied }
    }
}

/// `left ≤ right` where both sides carry a half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub left: f64,
    pub left_halfwidth: f64,
    pub right: f64,
    pub right_halfwidth: f64,
    pub trials: u64,
    pub status: Status,
    pub satisfied: bool,
}

impl Comparison {
    fn new(left: f64, left_halfwidth: f64, right: f64, right_halfwidth: f64, trials: u64) -> Self {
        let slack = left_halfwidth + right_halfwidth;
        let satisfied = left <= right + slack;
        let status = if !satisfied {
            Status::Violated
        } else if left + slack <= right {
            Status::Holds
        } else {
            Status::Undecided
        };
        Self { left, left_halfwidth, right, right_halfwidth, trials, status, satisfied }
    }
}

/// A convex body symmetric about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Body {
    Ball {
        radius: f64,
    },
    /// The cube `[−h, h]ⁿ`.
    Box {
        half_width: f64,
    },
}

impl Body {
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Body::Ball { radius } => norm2(x) <= radius * radius,
            Body::Box { half_width } => x.iter().all(|v| v.abs() <= half_width),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Body::Ball { radius } => positive("radius", radius),
            Body::Box { half_width } => positive("half_width", half_width),
        }
    }
}

/// Whether some nonzero lattice point is strictly closer to `x` than 0 is.
pub(crate) fn beaten_by_nonzero(e: &mut BallEnum, x: &[f64]) -> Result<bool> {
    let nx = norm2(x);
    e.reset(x, nx);
    let strict = nx - 1e-12 * (1.0 + nx);
    while let Some(step) = e.advance() {
        step?;
        if e.dist2() < strict && e.coefs().iter().any(|&c| c != 0) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether some nonzero lattice point lies within distance `r` of `x`.
pub(crate) fn near_nonzero(e: &mut BallEnum, x: &[f64], r: f64) -> Result<bool> {
    e.reset(x, r * r);
    while let Some(step) = e.advance() {
        step?;
        if e.coefs().iter().any(|&c| c != 0) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Membership in the closed Voronoi cell: no lattice point strictly closer
/// to `x` than the origin.
pub fn in_voronoi(b: &Basis, x: &[f64]) -> Result<bool> {
    if x.len() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), got: x.len() });
    }
    Ok(!beaten_by_nonzero(&mut BallEnum::new(b), x)?)
}

/// `γ_s(V(Λ))`: probability that `X ← D_s` lands in the Voronoi cell.
pub fn voronoi_gaussian_measure(b: &Basis, s: f64, mc: &Mc) -> Result<ProbEstimate> {
    positive("s", s)?;
    let n = b.dim();
    mc.frequency(|rng, count| {
        let mut e = BallEnum::new(b);
        let mut x = vec![0.0; n];
        let mut hits = 0;
        for _ in 0..count {
            fill_gaussian(s, &mut x, rng);
            hits += !beaten_by_nonzero(&mut e, &x)? as u64;
        }
        Ok(hits)
    })
}

/// `Overlap(Λ, r)`: probability that `e` uniform in `rB` lies within `r` of
/// some nonzero lattice point.
pub fn overlap_fraction(b: &Basis, r: f64, mc: &Mc) -> Result<ProbEstimate> {
    positive("r", r)?;
    let n = b.dim();
    mc.frequency(|rng, count| {
        let mut e = BallEnum::new(b);
        let mut x = vec![0.0; n];
        let mut hits = 0;
        for _ in 0..count {
            fill_ball(r, &mut x, rng);
            hits += near_nonzero(&mut e, &x, r)? as u64;
        }
        Ok(hits)
    })
}

/// `ρ_s(Λ∖0)/ρ_s(Λ) ≤ 1 − γ_s(V) ≤ ρ_{2s}(Λ∖0)`.
///
/// Each certified bound is taken at the end of its interval that makes the
/// inequality hardest to satisfy.
pub fn check_voronoi_sandwich(b: &Basis, s: f64, mc: &Mc) -> Result<SandwichReport> {
    positive("s", s)?;
    let a = rho_sum_nonzero(b, s, SANDWICH_SUM_TOL)?.upper();
    let upper = rho_sum_nonzero(b, 2.0 * s, SANDWICH_SUM_TOL)?.value;
    let middle = voronoi_gaussian_measure(b, s, mc)?.complement();
    Ok(SandwichReport::new(a / (1.0 + a), middle, upper))
}

/// With `s = r√(2π/n)`:
/// `ρ_{s/(1+δ)}(Λ∖0)/ρ_{s/(1+δ)}(Λ) − e^{−(2n/3)δ²} ≤ Overlap(Λ, r) ≤ 2ρ_{2s}(Λ∖0)`.
pub fn check_overlap_sandwich(b: &Basis, r: f64, delta: f64, mc: &Mc) -> Result<SandwichReport> {
    positive("r", r)?;
    if !(delta > 0.0 && delta < 0.25) {
        return Err(domain("delta", alloc::format!("must lie in (0, 1/4), got {delta}")));
    }
    let n = b.dim() as f64;
    let s = r * libm::sqrt(2.0 * PI / n);
    let a = rho_sum_nonzero(b, s / (1.0 + delta), SANDWICH_SUM_TOL)?.upper();
    let lower = a / (1.0 + a) - libm::exp(-(2.0 * n / 3.0) * delta * delta);
    let upper = 2.0 * rho_sum_nonzero(b, 2.0 * s, SANDWICH_SUM_TOL)?.value;
    Ok(SandwichReport::new(lower, overlap_fraction(b, r, mc)?, upper))
}

/// Radii bracketing the ε-overlap radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapRadii {
    /// `√(n/2π) / (2η_ε(Λ*))`.
    pub r_eps: f64,
    /// `2(1+δ)·r_ε`.
    pub r_upper: f64,
    /// `√((3/2n)·ln(4/ε))`.
    pub delta: f64,
    pub eta_dual: f64,
    /// `δ < 1/4`, required for the lower bound at `r_upper`.
    pub upper_regime: bool,
    /// `ε ≥ 2^{−n/4}`.
    pub eps_above_floor: bool,
}

pub fn ball_overlap_radii(b: &Basis, eps: f64) -> Result<OverlapRadii> {
    check_overlap_eps(eps)?;
    let eta = smoothing_parameter(&b.dual()?, eps, DEFAULT_RTOL)?.eta;
    ball_overlap_radii_from_eta(b.dim(), eps, eta)
}

/// Same as [`ball_overlap_radii`] given a precomputed `η_ε(Λ*)`.
pub fn ball_overlap_radii_from_eta(n: usize, eps: f64, eta_dual: f64) -> Result<OverlapRadii> {
    check_overlap_eps(eps)?;
    positive("eta", eta_dual)?;
    let nf = n as f64;
    let r_eps = libm::sqrt(nf / (2.0 * PI)) / (2.0 * eta_dual);
    let delta = libm::sqrt(1.5 / nf * libm::log(4.0 / eps));
    Ok(OverlapRadii {
        r_eps,
        r_upper: 2.0 * (1.0 + delta) * r_eps,
        delta,
        eta_dual,
        upper_regime: delta < 0.25,
        eps_above_floor: eps >= libm::exp2(-nf / 4.0),
    })
}

fn check_overlap_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 / 3.0 {
        Ok(())
    } else {
        Err(Error::Regime(alloc::format!("eps must lie in (0, 1/3], got {eps}")))
    }
}

/// `2e^{−π‖y‖²/(2s)²}` with `s = r√(2π/n)`: bounds the fraction of `rB`
/// covered by `rB + y`.
pub fn sphere_cap_bound(y: &[f64], r: f64) -> Result<f64> {
    positive("r", r)?;
    if y.is_empty() {
        return Err(domain("y", "dimension must be at least 1"));
    }
    let s = r * libm::sqrt(2.0 * PI / y.len() as f64);
    Ok(2.0 * libm::exp(-PI * norm2(y) / (4.0 * s * s)))
}

/// `γ_s(S)·ρ_s(y) ≤ γ_s(S + y)` for a symmetric body `S`, both sides on
/// the same Gaussian samples.
pub fn check_translate_bound(body: Body, y: &[f64], s: f64, mc: &Mc) -> Result<Comparison> {
    body.validate()?;
    positive("s", s)?;
    let n = y.len();
    let t = mc.run(|rng, count| {
        let mut x = vec![0.0; n];
        let mut shifted = vec![0.0; n];
        let mut tally = Tally::default();
        for _ in 0..count {
            fill_gaussian(s, &mut x, rng);
            for ((d, a), b) in shifted.iter_mut().zip(&x).zip(y) {
                *d = a - b;
            }
            tally.hits[0] += body.contains(&shifted) as u64;
            tally.hits[1] += body.contains(&x) as u64;
        }
        Ok(tally)
    })?;
    let shifted = ProbEstimate::from_hits(t.hits[0], mc.trials, mc.seed);
    let plain = ProbEstimate::from_hits(t.hits[1], mc.trials, mc.seed);
    let rho = libm::exp(-PI * norm2(y) / (s * s));
    Ok(Comparison::new(plain.mean * rho, plain.halfwidth * rho, shifted.mean, shifted.halfwidth, mc.trials))
}

/// `γ_s(rB∖K)/γ_s(rB) ≤ vol(rB∖K)/vol(rB)` for a convex `K ∋ 0`.
///
/// The Gaussian side draws `U` uniform in `rB` and keeps it with
/// probability `ρ_s(U)`, which samples `D_s` conditioned on `rB`.
pub fn check_gauss_unif_transfer(body: Body, n: usize, r: f64, s: f64, mc: &Mc) -> Result<Comparison> {
    body.validate()?;
    positive("r", r)?;
    positive("s", s)?;
    if n == 0 {
        return Err(domain("n", "dimension must be at least 1"));
    }
    const MAX_ATTEMPTS_PER_TRIAL: u64 = 10_000;
    let t = mc.run(|rng, count| {
        let mut u = vec![0.0; n];
        let mut tally = Tally::default();
        for _ in 0..count {
            let mut attempts = 0;
            loop {
                fill_ball(r, &mut u, rng);
                if rng.unit_open() <= libm::exp(-PI * norm2(&u) / (s * s)) {
                    break;
                }
                attempts += 1;
                if attempts == MAX_ATTEMPTS_PER_TRIAL {
                    return Err(Error::Regime(alloc::format!(
                        "Gaussian mass of the radius-{r} ball is too small to sample at s = {s}"
                    )));
                }
            }
            tally.hits[0] += !body.contains(&u) as u64;
            fill_ball(r, &mut u, rng);
            tally.hits[1] += !body.contains(&u) as u64;
        }
        Ok(tally)
    })?;
    let g = ProbEstimate::from_hits(t.hits[0], mc.trials, mc.seed);
    let v = ProbEstimate::from_hits(t.hits[1], mc.trials, mc.seed);
    Ok(Comparison::new(g.mean, g.halfwidth, v.mean, v.halfwidth, mc.trials))
}
