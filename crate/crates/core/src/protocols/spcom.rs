//! SPCom, the instance-dependent commitment keyed to `Λ*`:
//! `(z, h) ← {h(z) = b}`, `e ← rBⁿ`, `w = (B*z + e) mod 2B*` with
//! `r = ½√(n/2π)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::{Basis, Point};
use crate::enumerate::BallEnum;
use crate::error::{domain, Result};
use crate::estimate::{Mc, ProbEstimate, Tally};
use crate::geometry::near_nonzero;
use crate::rng::Rng;
use crate::samplers::{fill_ball, sample_conditioned_pair, Bits, HashFn};

/// Largest dimension for which hiding is evaluated by exhausting the hash family.
pub const HIDING_MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Opening {
    pub z: Bits,
    pub e: Point,
    /// `B*z + e` before reduction.
    pub lift: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commitment {
    pub w: Point,
    pub h: HashFn,
    pub opening: Opening,
}

/// Commitment scheme for one lattice.
#[derive(Debug, Clone)]
pub struct SpCom {
    dual: Basis,
    dual2: Basis,
    r: f64,
}

impl SpCom {
    pub fn new(b: &Basis) -> Result<Self> {
        let dual = b.dual()?;
        let dual2 = crate::basis::lattice_scale(&dual, 2.0)?;
        let n = b.dim() as f64;
        Ok(Self { dual, dual2, r: 0.5 * libm::sqrt(n / (2.0 * PI)) })
    }

    /// Noise radius `½√(n/2π)`.
    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn dual(&self) -> &Basis {
        &self.dual
    }

    pub fn commit(&self, bit: bool, rng: &mut Rng) -> Result<Commitment> {
        let n = self.dual.dim();
        let (z, h) = sample_conditioned_pair(bit, n, rng)?;
        let mut e = vec![0.0; n];
        fill_ball(self.r, &mut e, rng);
        let zc: Vec<i64> = z.iter().map(i64::from).collect();
        let mut lift = vec![0.0; n];
        self.dual.apply_int(&zc, &mut lift);
        lift.iter_mut().zip(&e).for_each(|(l, x)| *l += x);
        let mut w = vec![0.0; n];
        let mut coef = vec![0.0; n];
        self.dual2.reduce_into(&lift, &mut w, &mut coef);
        Ok(Commitment { w, h, opening: Opening { z, e, lift } })
    }

    /// `T′_w`: distinct coefficient parities of the points of `Λ*` within `r`
    /// of the retained lift — the openings consistent with `w`.
    pub fn openings(&self, e: &mut BallEnum, lift: &[f64]) -> Result<Vec<Bits>> {
        let n = self.dual.dim();
        let mut out: Vec<Bits> = Vec::new();
        e.reset(lift, self.r * self.r);
        while let Some(step) = e.advance() {
            step?;
            let mut z = Bits::zeros(n);
            for (i, &c) in e.coefs().iter().enumerate() {
                z.set(i, c & 1 == 1);
            }
            if !out.contains(&z) {
                out.push(z);
            }
        }
        Ok(out)
    }

    pub(crate) fn enumerator(&self) -> BallEnum<'_> {
        BallEnum::new(&self.dual)
    }

    /// Binding failure event: the noise lies within `r` of `Λ*∖0`.
    pub(crate) fn ambiguous(&self, e: &mut BallEnum, c: &Commitment) -> Result<bool> {
        near_nonzero(e, &c.opening.e, self.r)
    }
}

pub fn spcom_commit(b: &Basis, bit: bool, rng: &mut Rng) -> Result<Commitment> {
    SpCom::new(b)?.commit(bit, rng)
}

/// Frequency of commitments whose noise lands in the overlap region.
pub fn spcom_binding_estimate(b: &Basis, mc: &Mc) -> Result<ProbEstimate> {
    let sc = SpCom::new(b)?;
    mc.frequency(|rng, count| {
        let mut e = sc.enumerator();
        let mut hits = 0;
        for _ in 0..count {
            let bit = rng.bit();
            let c = sc.commit(bit, rng)?;
            hits += sc.ambiguous(&mut e, &c)? as u64;
        }
        Ok(hits)
    })
}

/// `Σ_a |Σ_i (−1)^{⟨a, z_i⟩}|` over all `a ∈ {0,1}ⁿ`, for `z_i` packed in the
/// low `n` bits. The offset bit of the affine family only flips the sign of
/// the inner sum, so this is also the sum over the full family divided by 2.
pub fn discrepancy_total(zs: &[u64], n: usize) -> u64 {
    (0..1u64 << n)
        .map(|a| zs.iter().map(|z| if (a & z).count_ones() & 1 == 0 { 1i64 } else { -1 }).sum::<i64>().unsigned_abs())
        .sum()
}

/// `E_h |Σ_i (−1)^{h(z_i)}|` over the whole hash family, by exhaustion.
pub fn hash_discrepancy(zs: &[Bits]) -> Result<f64> {
    let n = zs.first().map_or(0, Bits::len);
    if n > HIDING_MAX_DIM || zs.iter().any(|z| z.len() != n) {
        return Err(domain("z", "inputs must share a length of at most 16 bits"));
    }
    let packed: Vec<u64> = zs.iter().map(|z| z.words().first().copied().unwrap_or(0)).collect();
    Ok(discrepancy_total(&packed, n) as f64 / (1u64 << n) as f64)
}

/// Mean statistical distance between the hash's distributions under the two
/// committed bits, given `w`: for `t = |T′_w|` openings this is
/// `E_h|Σ(−1)^{h(z_i)}| / t`.
pub fn spcom_hiding_sd(b: &Basis, mc: &Mc) -> Result<ProbEstimate> {
    let n = b.dim();
    if n > HIDING_MAX_DIM {
        return Err(domain(
            "n",
            alloc::format!("hiding estimator enumerates 2^n hashes; n must be ≤ {HIDING_MAX_DIM}"),
        ));
    }
    let sc = SpCom::new(b)?;
    let t = mc.run(|rng, count| {
        let mut e = sc.enumerator();
        let mut tally = Tally::default();
        let mut packed = Vec::new();
        for _ in 0..count {
            let c = sc.commit(false, rng)?;
            let opens = sc.openings(&mut e, &c.opening.lift)?;
            packed.clear();
            packed.extend(opens.iter().map(|z| z.words()[0]));
            let t = packed.len() as f64;
            tally.sum += discrepancy_total(&packed, n) as f64 / ((1u64 << n) as f64 * t);
            tally.hits[0] += (packed.len() >= 2) as u64;
        }
        Ok(tally)
    })?;
    Ok(ProbEstimate::from_mean(t.sum / mc.trials as f64, mc.trials, mc.seed))
}
