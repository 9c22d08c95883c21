//! Toy Goldwasser–Sipser set-size lower bound.
//!
//! Each round hashes the set to `m = max(0, ⌊log₂(K/c)⌋)` bits with `m`
//! independent affine hashes and asks whether a random target has a
//! preimage; the claim is accepted on a strict majority of `⌈64/γ⌉` rounds.

use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::rng::Rng;
use crate::samplers::{sample_hash, Bits};

use super::Outcome;

/// Collision constant `c` in `m = ⌊log₂(K/c)⌋`.
pub const COLLISION_CONST: f64 = 1.0;
/// Rounds per run are `⌈REPETITION_FACTOR/γ⌉`.
pub const REPETITION_FACTOR: f64 = 64.0;
/// Bits per coefficient in [`encode_coefs`].
pub const COEF_BITS: usize = 16;

/// Coefficients as 16-bit two's-complement fields.
pub fn encode_coefs(coefs: &[i64]) -> Result<Bits> {
    let mut out = Bits::zeros(coefs.len() * COEF_BITS);
    for (i, &c) in coefs.iter().enumerate() {
        if !(-(1 << (COEF_BITS - 1))..1 << (COEF_BITS - 1)).contains(&c) {
            return Err(domain("coefs", alloc::format!("coefficient {c} does not fit in {COEF_BITS} bits")));
        }
        let v = c as u64;
        for j in 0..COEF_BITS {
            out.set(i * COEF_BITS + j, v >> j & 1 == 1);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GsRun {
    pub outcome: Outcome,
    pub hash_bits: u32,
    pub rounds: u64,
    pub hits: u64,
}

pub fn gs_lower_bound(members: &[Bits], k: u64, gamma: f64, rng: &mut Rng) -> Result<GsRun> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(domain("gamma", alloc::format!("must lie in (0, 1], got {gamma}")));
    }
    if k == 0 {
        return Ok(GsRun { outcome: Outcome::Accept, hash_bits: 0, rounds: 0, hits: 0 });
    }
    let len = members.first().map_or(1, Bits::len).max(1);
    if members.iter().any(|m| m.len() != len) {
        return Err(domain("members", "encodings must share one length"));
    }
    let m = libm::floor(libm::log2(k as f64 / COLLISION_CONST)).max(0.0) as u32;
    let rounds = libm::ceil(REPETITION_FACTOR / gamma) as u64;
    let mut hits = 0;
    for _ in 0..rounds {
        let hashes: Vec<_> = (0..m).map(|_| sample_hash(len, rng)).collect::<Result<_>>()?;
        let target: Vec<bool> = (0..m).map(|_| rng.bit()).collect();
        let hit = members.iter().any(|x| hashes.iter().zip(&target).all(|(h, &y)| h.eval(x) == y));
        hits += hit as u64;
    }
    Ok(GsRun { outcome: Outcome::from_bool(2 * hits > rounds), hash_bits: m, rounds, hits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_layout() {
        let b = encode_coefs(&[1, -1]).unwrap();
        assert_eq!(b.len(), 32);
        assert!(b.get(0) && !b.get(1));
        assert!((16..32).all(|i| b.get(i)));
        assert!(encode_coefs(&[1 << 15]).is_err());
    }

    #[test]
    fn empty_claim_accepts() {
        let run = gs_lower_bound(&[], 0, 0.5, &mut Rng::new(0)).unwrap();
        assert_eq!(run.outcome, Outcome::Accept);
    }

    #[test]
    fn single_claim_needs_nonempty_set() {
        let x = encode_coefs(&[3]).unwrap();
        let mut rng = Rng::new(1);
        assert!(gs_lower_bound(&[x], 1, 0.5, &mut rng).unwrap().outcome.is_accept());
        assert!(!gs_lower_bound(&[], 1, 0.5, &mut rng).unwrap().outcome.is_accept());
    }
}
