//! The Gaussian GGG protocol: the verifier perturbs by `x ← D₁`, sends
//! `x̄ = x mod B*`, and accepts iff the prover recovers `x`. With an optimal
//! prover the acceptance probability is exactly `γ(V(Λ*))`.

use alloc::vec;

use crate::basis::{dist2, Basis};
use crate::decision::{BddEvidence, DecisionReport, Evidence, Verdict};
use crate::enumerate::BallEnum;
use crate::error::{domain, unit_open, Result};
use crate::estimate::{Mc, ProbEstimate};
use crate::gauss::{smoothing_parameter, DEFAULT_RTOL};
use crate::rng::{derive_seed, Rng};
use crate::samplers::fill_gaussian;

use super::{Outcome, Payload, Role, Transcript};

/// Distance under which the prover's answer counts as equal to `x`.
pub const ACCEPT_TOL: f64 = 1e-9;
/// Child stream used for prover randomness, kept apart from the verifier's
/// so strategies can be compared on identical verifier coins.
const PROVER_STREAM: u64 = 0x5052_4f56;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prover {
    /// `x̄ − cvp(Λ*, x̄)`.
    Optimal,
    /// Decodes only within `radius`; answers `x̄` itself when nothing is found.
    Bdd { radius: f64 },
    /// Always answers 0.
    Sabotage,
    /// Subtracts a random lattice vector with coefficients in {−1, 0, 1}.
    RandomCoset,
}

impl Prover {
    /// BDD prover with radius `α/η_ε(Λ)`, the decoding radius for the dual
    /// lattice `Λ*` the prover works in.
    pub fn bdd(b: &Basis, alpha: f64, eps: f64) -> Result<Self> {
        unit_open("alpha", alpha)?;
        Ok(Prover::Bdd { radius: alpha / smoothing_parameter(b, eps, DEFAULT_RTOL)?.eta })
    }
}

/// Verifier state for one lattice.
#[derive(Debug, Clone)]
pub struct Ggg {
    dual: Basis,
}

struct Scratch<'a> {
    e: BallEnum<'a>,
    x: vec::Vec<f64>,
    xbar: vec::Vec<f64>,
    coef: vec::Vec<f64>,
    reply: vec::Vec<f64>,
    k: vec::Vec<i64>,
}

impl Ggg {
    pub fn new(b: &Basis) -> Result<Self> {
        Ok(Self { dual: b.dual()? })
    }

    pub fn dual(&self) -> &Basis {
        &self.dual
    }

    fn scratch(&self) -> Scratch<'_> {
        let n = self.dual.dim();
        Scratch {
            e: BallEnum::new(&self.dual),
            x: vec![0.0; n],
            xbar: vec![0.0; n],
            coef: vec![0.0; n],
            reply: vec![0.0; n],
            k: vec![0; n],
        }
    }

    /// Verifier draws `x` and reduces it; the prover answers into `reply`.
    fn play(&self, s: &mut Scratch, prover: Prover, rng: &mut Rng, prover_rng: &mut Rng) -> Result<bool> {
        fill_gaussian(1.0, &mut s.x, rng);
        self.dual.reduce_into(&s.x, &mut s.xbar, &mut s.coef);
        match prover {
            Prover::Optimal => {
                s.e.closest(&s.xbar, None)?;
                sub(&s.xbar, s.e.point(), &mut s.reply);
            }
            Prover::Bdd { radius } => match s.e.closest(&s.xbar, Some(radius * radius))? {
                Some(_) => sub(&s.xbar, s.e.point(), &mut s.reply),
                None => s.reply.copy_from_slice(&s.xbar),
            },
            Prover::Sabotage => s.reply.fill(0.0),
            Prover::RandomCoset => {
                for k in s.k.iter_mut() {
                    *k = prover_rng.below(3) as i64 - 1;
                }
                self.dual.apply_int(&s.k, &mut s.coef);
                sub(&s.xbar, &s.coef, &mut s.reply);
            }
        }
        Ok(dist2(&s.reply, &s.x) <= ACCEPT_TOL * ACCEPT_TOL)
    }

    pub fn round(&self, prover: Prover, rng: &mut Rng) -> Result<Transcript> {
        let mut s = self.scratch();
        let mut prover_rng = Rng::new(derive_seed(rng.seed(), PROVER_STREAM));
        let ok = self.play(&mut s, prover, rng, &mut prover_rng)?;
        let mut t = Transcript::new();
        t.push(Role::Verifier, Payload::Point(s.xbar.clone()));
        t.push(Role::Prover, Payload::Point(s.reply.clone()));
        t.outcome = Outcome::from_bool(ok);
        Ok(t)
    }

    /// Acceptance frequency of `prover`. Verifier coins depend only on
    /// `(seed, trials)`, so different provers are coupled.
    pub fn accept_prob(&self, prover: Prover, mc: &Mc) -> Result<ProbEstimate> {
        mc.frequency(|rng, count| {
            let mut s = self.scratch();
            let mut prover_rng = Rng::new(derive_seed(rng.seed(), PROVER_STREAM));
            let mut hits = 0;
            for _ in 0..count {
                hits += self.play(&mut s, prover, rng, &mut prover_rng)? as u64;
            }
            Ok(hits)
        })
    }
}

fn sub(a: &[f64], b: &[f64], out: &mut [f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = x - y;
    }
}

pub fn ggg_round(b: &Basis, prover: Prover, rng: &mut Rng) -> Result<Transcript> {
    Ggg::new(b)?.round(prover, rng)
}

/// Optimal-prover acceptance probability, an estimate of `γ(V(Λ*))`.
pub fn ggg_accept_prob(b: &Basis, mc: &Mc) -> Result<ProbEstimate> {
    Ggg::new(b)?.accept_prob(Prover::Optimal, mc)
}

/// Honest-verifier simulator: draw `x ← D₁` and output `(x̄, x, accept)`
/// without any prover.
pub fn ggg_simulate_szk(b: &Basis, rng: &mut Rng) -> Result<Transcript> {
    let d = b.dual()?;
    let n = d.dim();
    let mut x = vec![0.0; n];
    fill_gaussian(1.0, &mut x, rng);
    let mut xbar = vec![0.0; n];
    let mut coef = vec![0.0; n];
    d.reduce_into(&x, &mut xbar, &mut coef);
    let mut t = Transcript::new();
    t.push(Role::Verifier, Payload::Point(xbar));
    t.push(Role::Prover, Payload::Point(x));
    t.outcome = Outcome::Accept;
    Ok(t)
}

/// GapSPP via GGG with an `α`-BDD prover of radius `α/η_{ε_Y}(Λ)`.
///
/// YES iff the rejection frequency is at most
/// `(ε_Y + ε_N/(1+ε_N))/2`; UNDECIDED when the interval straddles it.
pub fn decide_gapspp_bdd(b: &Basis, eps_y: f64, eps_n: f64, alpha: f64, mc: &Mc) -> Result<DecisionReport> {
    unit_open("epsY", eps_y)?;
    unit_open("epsN", eps_n)?;
    if eps_y > eps_n / 100.0 {
        return Err(domain("epsY", "must be at most epsN/100"));
    }
    let prover = Prover::bdd(b, alpha, eps_y)?;
    let Prover::Bdd { radius } = prover else { unreachable!() };
    let rejection = Ggg::new(b)?.accept_prob(prover, mc)?.complement();
    let threshold = 0.5 * (eps_y + eps_n / (1.0 + eps_n));
    let verdict = if rejection.upper() <= threshold {
        Verdict::Yes
    } else if rejection.lower() > threshold {
        Verdict::No
    } else {
        Verdict::Undecided
    };
    Ok(DecisionReport {
        verdict,
        evidence: Evidence::Bdd(BddEvidence { rejection, threshold, decoding_radius: radius }),
    })
}
