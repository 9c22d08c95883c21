//! Continuous Gaussians in the ρ_s normalization, uniform ball vectors, and
//! the affine pairwise-independent hash family over GF(2).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::Point;
use crate::error::{domain, positive, Result};
use crate::rng::Rng;

/// Fixed-length bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    /// The low `len` bits of `v` (bit `i` of `v` becomes entry `i`).
    pub fn from_u64(len: usize, v: u64) -> Self {
        let mut b = Self::zeros(len);
        for i in 0..len.min(64) {
            b.set(i, v >> i & 1 == 1);
        }
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            b.set(i, v);
        }
        b
    }

    pub fn random(len: usize, rng: &mut Rng) -> Self {
        let mut b = Self::zeros(len);
        for i in 0..len {
            b.set(i, rng.bit());
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Packed words, least significant bit first.
    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// `h(z) = ⟨a, z⟩ ⊕ b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HashFn {
    pub a: Bits,
    pub b: bool,
}

impl HashFn {
    pub fn eval(&self, z: &Bits) -> bool {
        self.a.dot(z) ^ self.b
    }

    pub fn input_len(&self) -> usize {
        self.a.len()
    }

    /// Every member of the family on `n`-bit inputs, `2^{n+1}` in total.
    pub fn family(n: usize) -> impl Iterator<Item = HashFn> {
        assert!(n < 63, "family too large to enumerate");
        (0..1u64 << (n + 1)).map(move |v| HashFn { a: Bits::from_u64(n, v >> 1), b: v & 1 == 1 })
    }
}

/// Fills `out` with independent coordinates of a `D_s` sample: density
/// proportional to `e^{−π‖x‖²/s²}`, coordinate standard deviation `s/√(2π)`.
pub fn fill_gaussian(s: f64, out: &mut [f64], rng: &mut Rng) {
    let sigma = s / libm::sqrt(2.0 * PI);
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = box_muller(rng);
        pair[0] = sigma * a;
        pair[1] = sigma * b;
    }
    if let [last] = chunks.into_remainder() {
        *last = sigma * box_muller(rng).0;
    }
}

fn box_muller(rng: &mut Rng) -> (f64, f64) {
    let rad = libm::sqrt(-2.0 * libm::log(rng.unit_open()));
    let theta = 2.0 * PI * rng.unit_open();
    (rad * libm::cos(theta), rad * libm::sin(theta))
}

pub fn sample_gaussian(s: f64, n: usize, rng: &mut Rng) -> Result<Point> {
    positive("s", s)?;
    let mut x = vec![0.0; n];
    fill_gaussian(s, &mut x, rng);
    Ok(x)
}

/// Uniform sample from the solid ball of radius `r`, written into `out`.
pub fn fill_ball(r: f64, out: &mut [f64], rng: &mut Rng) {
    let n = out.len();
    loop {
        fill_gaussian(1.0, out, rng);
        let norm = libm::sqrt(out.iter().map(|v| v * v).sum::<f64>());
        if norm > 0.0 {
            let radius = r * libm::pow(rng.unit_open(), 1.0 / n as f64);
            out.iter_mut().for_each(|v| *v *= radius / norm);
            return;
        }
    }
}

pub fn sample_ball(r: f64, n: usize, rng: &mut Rng) -> Result<Point> {
    positive("r", r)?;
    let mut x = vec![0.0; n];
    fill_ball(r, &mut x, rng);
    Ok(x)
}

/// Uniform member of the affine family on `n`-bit inputs.
pub fn sample_hash(n: usize, rng: &mut Rng) -> Result<HashFn> {
    if n == 0 {
        return Err(domain("n", "hash input length must be at least 1"));
    }
    let a = Bits::random(n, rng);
    Ok(HashFn { a, b: rng.bit() })
}

/// Uniform `z`, then `h` uniform among members with `h(z) = bit`.
pub fn sample_conditioned_pair(bit: bool, n: usize, rng: &mut Rng) -> Result<(Bits, HashFn)> {
    if n == 0 {
        return Err(domain("n", "hash input length must be at least 1"));
    }
    let z = Bits::random(n, rng);
    let a = Bits::random(n, rng);
    // Exactly one choice of the offset bit satisfies the condition.
    let b = a.dot(&z) ^ bit;
    Ok((z, HashFn { a, b }))
}
