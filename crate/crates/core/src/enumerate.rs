//! Lattice points in a ball, closest-vector and bounded-distance decoding.
//!
//! Depth-first traversal over the Gram–Schmidt levels of `B = QR`. Each level
//! visits integers in Schnorr–Euchner zigzag order around its projected
//! center, so partial distances are nondecreasing along a level and the first
//! overshoot ends it.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{dist2, Basis, Point};
use crate::error::{domain, Error, Result};

/// Relative slack on the pruning radius; the leaf test uses the exact
/// distance with a much tighter slack.
const PRUNE_SLACK: f64 = 1e-10;
const LEAF_SLACK: f64 = 1e-12;

/// A lattice point with its integer coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub point: Point,
    pub coefs: Vec<i64>,
}

impl LatticePoint {
    pub fn is_zero(&self) -> bool {
        self.coefs.iter().all(|&c| c == 0)
    }
}

/// Ball enumeration request: lattice points `v` with `‖v − center‖ ≤ radius`.
#[derive(Debug, Clone)]
pub struct EnumRequest<'a> {
    pub basis: &'a Basis,
    pub center: Point,
    pub radius: f64,
    pub budget: u64,
}

impl<'a> EnumRequest<'a> {
    /// Request with the basis' point budget.
    pub fn new(basis: &'a Basis, center: Point, radius: f64) -> Self {
        Self { basis, center, radius, budget: basis.point_budget() }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

/// Streaming ball enumerator. Reusable across centers via [`BallEnum::reset`];
/// the raw [`BallEnum::advance`] interface avoids per-point allocation.
#[derive(Debug, Clone)]
pub struct BallEnum<'a> {
    b: &'a Basis,
    n: usize,
    center: Vec<f64>,
    y: Vec<f64>,
    r2: f64,
    budget: u64,
    yielded: u64,
    c: Vec<i64>,
    ctr: Vec<f64>,
    x0: Vec<i64>,
    sgn: Vec<i64>,
    step: Vec<i64>,
    /// `partial[k]`: squared distance contributed by levels above `k`.
    partial: Vec<f64>,
    k: usize,
    state: State,
    last: Vec<i64>,
    point: Vec<f64>,
    last_d2: f64,
}

impl<'a> BallEnum<'a> {
    /// An idle enumerator over `b`; call [`reset`](Self::reset) before use.
    pub fn new(b: &'a Basis) -> Self {
        let n = b.dim();
        Self {
            b,
            n,
            center: vec![0.0; n],
            y: vec![0.0; n],
            r2: 0.0,
            budget: b.point_budget(),
            yielded: 0,
            c: vec![0; n],
            ctr: vec![0.0; n],
            x0: vec![0; n],
            sgn: vec![1; n],
            step: vec![0; n],
            partial: vec![0.0; n],
            k: 0,
            state: State::Done,
            last: vec![0; n],
            point: vec![0.0; n],
            last_d2: 0.0,
        }
    }

    /// Restarts enumeration of the closed ball of squared radius `r2`.
    pub fn reset(&mut self, center: &[f64], r2: f64) {
        debug_assert_eq!(center.len(), self.n);
        self.center.copy_from_slice(center);
        self.b.qt_into(center, &mut self.y);
        self.r2 = r2.max(0.0);
        self.yielded = 0;
        self.state = State::Fresh;
    }

    pub fn set_budget(&mut self, budget: u64) {
        self.budget = budget;
    }

    /// Points yielded since the last reset.
    pub fn yielded(&self) -> u64 {
        self.yielded
    }

    /// Coefficients of the most recently yielded point.
    pub fn coefs(&self) -> &[i64] {
        &self.last
    }

    /// Coordinates of the most recently yielded point.
    pub fn point(&self) -> &[f64] {
        &self.point
    }

    /// Squared distance from the center to the most recently yielded point.
    pub fn dist2(&self) -> f64 {
        self.last_d2
    }

    fn open_level(&mut self, k: usize) {
        let n = self.n;
        let mut acc = self.y[k];
        for j in k + 1..n {
            acc -= self.b.r(k, j) * self.c[j] as f64;
        }
        let ctr = acc / self.b.r(k, k);
        let x0 = libm::round(ctr);
        self.ctr[k] = ctr;
        self.x0[k] = x0 as i64;
        self.sgn[k] = if ctr >= x0 { 1 } else { -1 };
        self.step[k] = 0;
        self.c[k] = x0 as i64;
    }

    /// Next zigzag candidate at level `k`: x0, x0±1, x0∓1, x0±2, …
    fn bump(&mut self, k: usize) {
        self.step[k] += 1;
        let m = self.step[k];
        let off = if m % 2 == 1 { self.sgn[k] * (m + 1) / 2 } else { -self.sgn[k] * m / 2 };
        self.c[k] = self.x0[k] + off;
    }

    /// Moves to the next point in the ball. `None` once exhausted; an error
    /// (after which the stream is finished) if the budget is exceeded.
    pub fn advance(&mut self) -> Option<Result<()>> {
        match self.state {
            State::Done => return None,
            State::Fresh => {
                self.k = self.n - 1;
                self.partial[self.k] = 0.0;
                self.open_level(self.k);
                self.state = State::Running;
            }
            State::Running => {}
        }
        let lim = self.r2 * (1.0 + PRUNE_SLACK);
        let leaf_lim = self.r2 * (1.0 + LEAF_SLACK);
        loop {
            let k = self.k;
            let diff = self.b.r(k, k) * (self.c[k] as f64 - self.ctr[k]);
            let d = self.partial[k] + diff * diff;
            if d <= lim {
                if k == 0 {
                    self.b.apply_int(&self.c, &mut self.point);
                    let d2 = dist2(&self.point, &self.center);
                    self.last.copy_from_slice(&self.c);
                    self.bump(0);
                    if d2 <= leaf_lim {
                        self.last_d2 = d2;
                        self.yielded += 1;
                        if self.yielded > self.budget {
                            self.state = State::Done;
                            return Some(Err(Error::Budget { budget: self.budget }));
                        }
                        return Some(Ok(()));
                    }
                } else {
                    self.partial[k - 1] = d;
                    self.k = k - 1;
                    self.open_level(k - 1);
                }
            } else {
                if k == self.n - 1 {
                    self.state = State::Done;
                    return None;
                }
                self.k = k + 1;
                self.bump(k + 1);
            }
        }
    }

    /// Babai nearest-plane coefficients for `t`, written into `out`.
    pub fn babai(&mut self, t: &[f64], out: &mut [i64]) {
        let n = self.n;
        self.b.qt_into(t, &mut self.y);
        for k in (0..n).rev() {
            let mut acc = self.y[k];
            for (j, &c) in out.iter().enumerate().take(n).skip(k + 1) {
                acc -= self.b.r(k, j) * c as f64;
            }
            out[k] = libm::round(acc / self.b.r(k, k)) as i64;
        }
    }

    /// Closest lattice point to `t` among those within squared distance
    /// `r2` (or anywhere, if `r2` is `None`). Ties go to the lexicographically
    /// smallest coefficient vector. On success the winner is left in
    /// [`coefs`](Self::coefs)/[`point`](Self::point) and its squared
    /// distance is returned.
    pub fn closest(&mut self, t: &[f64], r2: Option<f64>) -> Result<Option<f64>> {
        let n = self.n;
        let mut best_c = vec![0i64; n];
        let bound = match r2 {
            Some(r2) => r2,
            None => {
                self.babai(t, &mut best_c);
                self.b.apply_int(&best_c, &mut self.point);
                dist2(&self.point, t) * (1.0 + 1e-9) + f64::MIN_POSITIVE
            }
        };
        self.reset(t, bound);
        let mut best_d = f64::INFINITY;
        let mut found = false;
        while let Some(step) = self.advance() {
            step?;
            let d = self.last_d2;
            let tol = 1e-12 * (1.0 + d);
            let better = if !found || d < best_d - tol {
                true
            } else {
                (d - best_d).abs() <= tol && self.last.as_slice() < best_c.as_slice()
            };
            if better {
                found = true;
                best_d = d;
                best_c.copy_from_slice(&self.last);
            }
        }
        if !found {
            return Ok(None);
        }
        self.last.copy_from_slice(&best_c);
        self.b.apply_int(&best_c, &mut self.point);
        self.last_d2 = best_d;
        Ok(Some(best_d))
    }

    fn current(&self) -> LatticePoint {
        LatticePoint { point: self.point.clone(), coefs: self.last.clone() }
    }
}

impl Iterator for BallEnum<'_> {
    type Item = Result<LatticePoint>;

    fn next(&mut self) -> Option<Self::Item> {
        self.advance().map(|r| r.map(|()| self.current()))
    }
}

/// Streams the lattice points within `radius` of `center` (boundary
/// inclusive). Exceeding the budget is reported in-stream.
pub fn ball_enum<'a>(req: &EnumRequest<'a>) -> Result<BallEnum<'a>> {
    let n = req.basis.dim();
    if req.center.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: req.center.len() });
    }
    if !(req.radius.is_finite() && req.radius > 0.0) {
        return Err(domain("radius", alloc::format!("must be positive, got {}", req.radius)));
    }
    if req.budget == 0 {
        return Err(domain("budget", "must be at least 1"));
    }
    let mut e = BallEnum::new(req.basis);
    e.set_budget(req.budget);
    e.reset(&req.center, req.radius * req.radius);
    Ok(e)
}

/// A lattice point minimizing `‖t − v‖`; ties broken by the
/// lexicographically smallest coefficient vector.
pub fn cvp(b: &Basis, t: &[f64]) -> Result<LatticePoint> {
    check_dim(b, t)?;
    let mut e = BallEnum::new(b);
    e.closest(t, None)?.expect("the Babai point lies inside its own ball");
    Ok(e.current())
}

/// Closest lattice point within distance `d` of `t`, if any.
pub fn bdd_solve_radius(b: &Basis, t: &[f64], d: f64) -> Result<Option<LatticePoint>> {
    check_dim(b, t)?;
    if !(d >= 0.0 && d.is_finite()) {
        return Err(domain("d", "decoding radius must be finite and nonnegative"));
    }
    let mut e = BallEnum::new(b);
    Ok(e.closest(t, Some(d * d))?.map(|_| e.current()))
}

/// `α`-BDD with decoding radius `d = α / η_ε(Λ(B)*)`.
pub fn bdd_solve(b: &Basis, t: &[f64], alpha: f64, eps: f64) -> Result<Option<LatticePoint>> {
    bdd_solve_radius(b, t, bdd_radius(b, alpha, eps)?)
}

/// Decoding radius `α / η_ε(Λ(B)*)`.
pub fn bdd_radius(b: &Basis, alpha: f64, eps: f64) -> Result<f64> {
    crate::error::unit_open("alpha", alpha)?;
    crate::error::unit_open("eps", eps)?;
    let eta = crate::gauss::smoothing_parameter(&b.dual()?, eps, crate::gauss::DEFAULT_RTOL)?.eta;
    Ok(alpha / eta)
}

fn check_dim(b: &Basis, t: &[f64]) -> Result<()> {
    if t.len() != b.dim() {
        Err(Error::DimensionMismatch { expected: b.dim(), got: t.len() })
    } else {
        Ok(())
    }
}
