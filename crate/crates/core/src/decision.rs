//! GapSPP verdicts, and the deterministic enumeration decider.
//!
//! Instances are assumed pre-scaled so both promise thresholds sit at 1:
//! YES means `ρ₁(Λ*∖0) ≤ ε_Y`, NO means `ρ₁(Λ*∖0) > ε_N`.

use core::f64::consts::PI;

use crate::basis::{norm2, Basis};
use crate::enumerate::BallEnum;
use crate::error::{domain, unit_open, Error, Result};
use crate::estimate::ProbEstimate;
use crate::gauss::{rho_sum_nonzero, CertifiedSum, Neumaier};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
            Verdict::Undecided => "UNDECIDED",
        }
    }
}

/// Where an instance falls relative to the promise, when that is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Promise {
    Yes,
    No,
    /// Strictly between the thresholds.
    Outside,
    /// Not determined (early abort, or the certified interval straddles).
    Unknown,
}

impl Promise {
    /// Classifies a certified `ρ₁(Λ*∖0)`.
    pub fn classify(sum: &CertifiedSum, eps_y: f64, eps_n: f64) -> Self {
        if sum.upper() <= eps_y {
            Promise::Yes
        } else if sum.value > eps_n {
            Promise::No
        } else if sum.value > eps_y && sum.upper() <= eps_n {
            Promise::Outside
        } else {
            Promise::Unknown
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Promise::Yes => "yes",
            Promise::No => "no",
            Promise::Outside => "outside",
            Promise::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetEvidence {
    /// `Σ e^{−π‖v‖²}` over enumerated nonzero dual points (partial on abort).
    pub sum_u: f64,
    pub point_count: u64,
    pub threshold: f64,
    pub early_abort: bool,
    /// `⌈e^{πn}·ε_N⌉`.
    pub abort_cap: u64,
    pub radius: f64,
    /// `ε_N − ε_Y ≥ 2^{−2n}`; reported, not enforced.
    pub separated: bool,
    pub promise: Promise,
    /// Full certified `ρ₁(Λ*∖0)` when it was computed.
    pub certified: Option<CertifiedSum>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BddEvidence {
    pub rejection: ProbEstimate,
    pub threshold: f64,
    /// Decoding radius used by the prover.
    pub decoding_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Det(DetEvidence),
    Bdd(BddEvidence),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionReport {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Tolerance of the certified sum used only to label the promise side.
const PROMISE_SUM_TOL: f64 = 1e-10;

/// Enumerates `Λ*∖0` inside the `√n` ball, rejecting as soon as
/// `⌈e^{πn}ε_N⌉` points turn up; otherwise YES iff
/// `Σ e^{−π‖v‖²} ≤ (ε_Y+ε_N)/2`.
pub fn decide_gapspp_det(b: &Basis, eps_y: f64, eps_n: f64) -> Result<DecisionReport> {
    unit_open("epsY", eps_y)?;
    unit_open("epsN", eps_n)?;
    let n = b.dim();
    if eps_y >= eps_n {
        return Err(domain("epsY", "must be strictly below epsN"));
    }
    let separated = eps_n - eps_y >= libm::exp2(-2.0 * n as f64);
    let d = b.dual()?;
    let cap_f = libm::ceil(libm::exp(PI * n as f64) * eps_n);
    let abort_cap = if cap_f >= u64::MAX as f64 { u64::MAX } else { cap_f as u64 };
    let threshold = 0.5 * (eps_y + eps_n);
    let radius = libm::sqrt(n as f64);
    let budget = d.point_budget();

    let mut e = BallEnum::new(&d);
    e.set_budget(u64::MAX);
    e.reset(&alloc::vec![0.0; n], n as f64);
    let mut acc = Neumaier::default();
    let mut count = 0u64;
    let mut early_abort = false;
    while let Some(step) = e.advance() {
        step?;
        if e.coefs().iter().all(|&c| c == 0) {
            continue;
        }
        count += 1;
        acc.add(libm::exp(-PI * norm2(e.point())));
        if count >= abort_cap {
            early_abort = true;
            break;
        }
        if count > budget {
            return Err(Error::Budget { budget });
        }
    }
    let sum_u = acc.total();
    let verdict = if early_abort || sum_u > threshold { Verdict::No } else { Verdict::Yes };
    let (promise, certified) = if early_abort {
        (Promise::Unknown, None)
    } else {
        match rho_sum_nonzero(&d, 1.0, PROMISE_SUM_TOL) {
            Ok(c) => (Promise::classify(&c, eps_y, eps_n), Some(c)),
            Err(_) => (Promise::Unknown, None),
        }
    };
    Ok(DecisionReport {
        verdict,
        evidence: Evidence::Det(DetEvidence {
            sum_u,
            point_count: count,
            threshold,
            early_abort,
            abort_cap,
            radius,
            separated,
            promise,
            certified,
        }),
    })
}
