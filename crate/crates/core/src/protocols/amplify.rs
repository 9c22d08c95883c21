//! Hiding/binding amplification of SPCom and the 2-message SZK protocol
//! built on it.
//!
//! Repetition(k) commits to the same bit k times: `(1−(1−p)^k, q^k)`.
//! Sharing(k) commits to k XOR-shares: `(p^k, 1−(1−q)^k)`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::basis::Basis;
use crate::enumerate::BallEnum;
use crate::error::{domain, Error, Result};
use crate::estimate::{Mc, ProbEstimate};
use crate::rng::{derive_seed, Rng};

use super::spcom::{Commitment, SpCom};
use super::{Outcome, Payload, Role, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Repetition(u32),
    Sharing(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Leaf,
    Repetition { k: u32, child: Box<SchemeParams> },
    Sharing { k: u32, child: Box<SchemeParams> },
}

/// Hiding bound `p`, binding bound `q`, and how the scheme is composed.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    pub p: f64,
    pub q: f64,
    pub structure: Structure,
}

impl SchemeParams {
    pub fn leaf(p: f64, q: f64) -> Result<Self> {
        check_prob("p", p)?;
        check_prob("q", q)?;
        Ok(Self { p, q, structure: Structure::Leaf })
    }

    /// Number of SPCom commitments one composed commitment uses.
    pub fn leaves(&self) -> u64 {
        match &self.structure {
            Structure::Leaf => 1,
            Structure::Repetition { k, child } | Structure::Sharing { k, child } => {
                (*k as u64).saturating_mul(child.leaves())
            }
        }
    }
}

fn check_prob(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(domain(name, alloc::format!("must lie in [0, 1], got {v}")))
    }
}

fn step(p: f64, q: f64, op: Op) -> (f64, f64) {
    match op {
        Op::Repetition(k) => (-libm::expm1(k as f64 * libm::log1p(-p)), libm::pow(q, k as f64)),
        Op::Sharing(k) => (libm::pow(p, k as f64), -libm::expm1(k as f64 * libm::log1p(-q))),
    }
}

pub fn amplify(params: &SchemeParams, op: Op) -> Result<SchemeParams> {
    let k = match op {
        Op::Repetition(k) | Op::Sharing(k) => k,
    };
    if k == 0 {
        return Err(domain("k", "must be at least 1"));
    }
    if k == 1 {
        return Ok(params.clone());
    }
    let (p, q) = step(params.p, params.q, op);
    let child = Box::new(params.clone());
    let structure = match op {
        Op::Repetition(k) => Structure::Repetition { k, child },
        Op::Sharing(k) => Structure::Sharing { k, child },
    };
    Ok(SchemeParams { p, q, structure })
}

pub fn apply_plan(params: &SchemeParams, ops: &[Op]) -> Result<SchemeParams> {
    ops.iter().try_fold(params.clone(), |acc, &op| amplify(&acc, op))
}

const MAX_K: u32 = 4096;
const MAX_OPS: usize = 64;

/// Best second operation of kind `second` after reaching `(p, q)`: the
/// component it raises crosses the one it lowers, so bisect for the crossing.
fn best_second(p: f64, q: f64, repetition: bool) -> (u32, f64) {
    let make = |k| if repetition { Op::Repetition(k) } else { Op::Sharing(k) };
    let score = |k| {
        let (a, b) = step(p, q, make(k));
        a.max(b)
    };
    let rises_past = |k| {
        let (a, b) = step(p, q, make(k));
        if repetition {
            a >= b
        } else {
            b >= a
        }
    };
    let (mut lo, mut hi) = (1u32, MAX_K);
    if rises_past(lo) {
        return (1, score(1));
    }
    if !rises_past(hi) {
        return (hi, score(hi));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rises_past(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if score(lo) <= score(hi) {
        (lo, score(lo))
    } else {
        (hi, score(hi))
    }
}

/// Alternates repetition and sharing until both bounds are at most `target`.
///
/// Each round looks two operations ahead (repetition then sharing, or the
/// reverse), trying every first `k ≤ 4096` and the best matching second `k`,
/// and keeps the pair that minimizes `max(p, q)`.
pub fn amplification_plan(p: f64, q: f64, target: f64) -> Result<Vec<Op>> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    if !(target > 0.0 && target < 1.0) {
        return Err(domain("target", alloc::format!("must lie in (0, 1), got {target}")));
    }
    let (mut p, mut q) = (p, q);
    let mut ops = Vec::new();
    while p > target || q > target {
        if p + q >= 1.0 || ops.len() >= MAX_OPS {
            return Err(Error::NoConvergence { p, q, steps: ops.len() });
        }
        let mut best: Option<(f64, Op, Op)> = None;
        for rep_first in [true, false] {
            for k1 in 1..=MAX_K {
                let first = if rep_first { Op::Repetition(k1) } else { Op::Sharing(k1) };
                let (p1, q1) = step(p, q, first);
                let (k2, s) = best_second(p1, q1, !rep_first);
                let second = if rep_first { Op::Sharing(k2) } else { Op::Repetition(k2) };
                if best.is_none_or(|(b, _, _)| s < b) {
                    best = Some((s, first, second));
                }
            }
        }
        let (score, first, second) = best.expect("search space is nonempty");
        if !(score < p.max(q)) {
            return Err(Error::NoConvergence { p, q, steps: ops.len() });
        }
        for op in [first, second] {
            if !matches!(op, Op::Repetition(1) | Op::Sharing(1)) {
                (p, q) = step(p, q, op);
                ops.push(op);
            }
        }
    }
    Ok(ops)
}

/// Cap on SPCom leaves in one executable composed commitment.
pub const MAX_LEAVES: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub enum CommitTree {
    Leaf(Commitment),
    Node(Vec<CommitTree>),
}

impl CommitTree {
    pub fn leaves(&self) -> Vec<&Commitment> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Commitment>) {
        match self {
            CommitTree::Leaf(c) => out.push(c),
            CommitTree::Node(children) => children.iter().for_each(|c| c.collect(out)),
        }
    }
}

/// Executable composed scheme on one lattice.
#[derive(Debug, Clone)]
pub struct Amplified {
    spcom: SpCom,
    params: SchemeParams,
}

/// Prover randomness (tie-breaking) lives on its own stream.
const PROVER_STREAM: u64 = 0x7469_6573;

impl Amplified {
    pub fn new(b: &Basis, params: SchemeParams) -> Result<Self> {
        if params.leaves() > MAX_LEAVES {
            return Err(domain("params", alloc::format!("composed scheme needs more than {MAX_LEAVES} commitments")));
        }
        Ok(Self { spcom: SpCom::new(b)?, params })
    }

    pub fn commit(&self, bit: bool, rng: &mut Rng) -> Result<CommitTree> {
        self.commit_node(&self.params, bit, rng)
    }

    fn commit_node(&self, node: &SchemeParams, bit: bool, rng: &mut Rng) -> Result<CommitTree> {
        match &node.structure {
            Structure::Leaf => Ok(CommitTree::Leaf(self.spcom.commit(bit, rng)?)),
            Structure::Repetition { k, child } => {
                (0..*k).map(|_| self.commit_node(child, bit, rng)).collect::<Result<_>>().map(CommitTree::Node)
            }
            Structure::Sharing { k, child } => {
                let mut acc = false;
                let mut kids = Vec::with_capacity(*k as usize);
                for i in 0..*k {
                    let share = if i + 1 == *k { bit ^ acc } else { rng.bit() };
                    acc ^= share;
                    kids.push(self.commit_node(child, share, rng)?);
                }
                Ok(CommitTree::Node(kids))
            }
        }
    }

    /// Posterior probability that the committed bit is 1 under a uniform
    /// prior, from exhaustive opening search.
    pub fn posterior_one(&self, e: &mut BallEnum, tree: &CommitTree) -> Result<f64> {
        self.posterior(e, &self.params, tree)
    }

    fn posterior(&self, e: &mut BallEnum, node: &SchemeParams, tree: &CommitTree) -> Result<f64> {
        match (&node.structure, tree) {
            (Structure::Leaf, CommitTree::Leaf(c)) => {
                let opens = self.spcom.openings(e, &c.opening.lift)?;
                let ones = opens.iter().filter(|z| c.h.eval(z)).count();
                Ok(ones as f64 / opens.len() as f64)
            }
            (Structure::Repetition { child, .. }, CommitTree::Node(kids)) => {
                let (mut l1, mut l0) = (0.0, 0.0);
                for kid in kids {
                    let p1 = self.posterior(e, child, kid)?;
                    l1 += libm::log(p1);
                    l0 += libm::log(1.0 - p1);
                }
                Ok(match (l1.is_finite(), l0.is_finite()) {
                    (true, true) => 1.0 / (1.0 + libm::exp(l0 - l1)),
                    (true, false) => 1.0,
                    (false, true) => 0.0,
                    (false, false) => 0.5,
                })
            }
            (Structure::Sharing { child, .. }, CommitTree::Node(kids)) => {
                let mut bias = 1.0;
                for kid in kids {
                    bias *= 1.0 - 2.0 * self.posterior(e, child, kid)?;
                }
                Ok(0.5 * (1.0 - bias))
            }
            _ => Err(domain("tree", "commitment does not match the scheme structure")),
        }
    }

    fn play(&self, e: &mut BallEnum, rng: &mut Rng, prover_rng: &mut Rng) -> Result<(bool, CommitTree, bool)> {
        let bit = rng.bit();
        let tree = self.commit(bit, rng)?;
        let p1 = self.posterior_one(e, &tree)?;
        let guess = if p1 > 0.5 {
            true
        } else if p1 < 0.5 {
            false
        } else {
            prover_rng.bit()
        };
        Ok((bit, tree, guess))
    }

    /// V commits to a random bit; the unbounded prover answers its
    /// maximum-likelihood guess; V accepts iff the guess is right.
    pub fn run(&self, rng: &mut Rng) -> Result<Transcript> {
        let mut e = self.spcom.enumerator();
        let mut prover_rng = Rng::new(derive_seed(rng.seed(), PROVER_STREAM));
        let (bit, tree, guess) = self.play(&mut e, rng, &mut prover_rng)?;
        let mut t = Transcript::new();
        for c in tree.leaves() {
            t.push(Role::Verifier, Payload::Point(c.w.clone()));
            t.push(Role::Verifier, Payload::Hash(c.h.clone()));
        }
        t.push(Role::Prover, Payload::Bit(guess));
        t.outcome = Outcome::from_bool(guess == bit);
        Ok(t)
    }

    pub fn accept_prob(&self, mc: &Mc) -> Result<ProbEstimate> {
        mc.frequency(|rng, count| {
            let mut e = self.spcom.enumerator();
            let mut prover_rng = Rng::new(derive_seed(rng.seed(), PROVER_STREAM));
            let mut hits = 0;
            for _ in 0..count {
                let (bit, _, guess) = self.play(&mut e, rng, &mut prover_rng)?;
                hits += (bit == guess) as u64;
            }
            Ok(hits)
        })
    }

    /// Frequency of the composed binding-failure event: every repeated
    /// child ambiguous, or any shared child ambiguous.
    pub fn binding_estimate(&self, mc: &Mc) -> Result<ProbEstimate> {
        mc.frequency(|rng, count| {
            let mut e = self.spcom.enumerator();
            let mut hits = 0;
            for _ in 0..count {
                let tree = self.commit(rng.bit(), rng)?;
                hits += self.ambiguous(&mut e, &self.params, &tree)? as u64;
            }
            Ok(hits)
        })
    }

    fn ambiguous(&self, e: &mut BallEnum, node: &SchemeParams, tree: &CommitTree) -> Result<bool> {
        match (&node.structure, tree) {
            (Structure::Leaf, CommitTree::Leaf(c)) => self.spcom.ambiguous(e, c),
            (Structure::Repetition { child, .. }, CommitTree::Node(kids)) => {
                for kid in kids {
                    if !self.ambiguous(e, child, kid)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (Structure::Sharing { child, .. }, CommitTree::Node(kids)) => {
                for kid in kids {
                    if self.ambiguous(e, child, kid)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => Err(domain("tree", "commitment does not match the scheme structure")),
        }
    }
}

pub fn szk_protocol_run(b: &Basis, params: &SchemeParams, rng: &mut Rng) -> Result<Transcript> {
    Amplified::new(b, params.clone())?.run(rng)
}
