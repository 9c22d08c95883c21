//! Lattice bases, duals, and reduction modulo the fundamental parallelepiped.
//!
//! A basis stores its columns plus a few derived factorizations (inverse,
//! QR) in flat row/column-major arrays so hot loops never touch nalgebra.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{domain, positive, Error, Result};

/// Coordinates of a point in the ambient space.
pub type Point = Vec<f64>;
/// Coordinates of a point in the basis frame (`x = B·c`).
pub type CoefVector = Vec<f64>;

/// Condition numbers above this are rejected as ill-conditioned.
pub const COND_LIMIT: f64 = 1e8;
/// Condition numbers above this (or a zero singular value) mean singular.
pub const SINGULAR_LIMIT: f64 = 1e14;
/// Absolute tolerance for "this coefficient is an integer".
pub const INTEGRALITY_TOL: f64 = 1e-9;
/// Default cap on points visited by a single enumeration.
pub const DEFAULT_POINT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone)]
pub struct Basis {
    n: usize,
    /// Column-major: entry (i, j) is `cols[j * n + i]`.
    cols: Vec<f64>,
    /// Row-major inverse.
    inv: Vec<f64>,
    /// Row-major transpose of Q from B = QR.
    qt: Vec<f64>,
    /// Row-major upper-triangular R from B = QR.
    r: Vec<f64>,
    cond: f64,
    budget: u64,
}

impl Basis {
    /// Builds a basis from `n × n` column-major data, validating independence
    /// and conditioning.
    pub fn from_column_major(n: usize, cols: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyBasis);
        }
        if cols.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: cols.len() });
        }
        if cols.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let m = DMatrix::from_column_slice(n, n, &cols);
        let sv = m.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(cond <= SINGULAR_LIMIT) {
            return Err(Error::Singular { cond });
        }
        if cond > COND_LIMIT {
            return Err(Error::IllConditioned { cond, limit: COND_LIMIT });
        }
        let inv_m = m.clone().try_inverse().ok_or(Error::Singular { cond })?;
        let qr = m.qr();
        let (q, r_m) = (qr.q(), qr.r());
        let row_major = |a: &DMatrix<f64>| {
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = a[(i, j)];
                }
            }
            out
        };
        Ok(Self {
            n,
            inv: row_major(&inv_m),
            qt: row_major(&q.transpose()),
            r: row_major(&r_m),
            cols,
            cond,
            budget: DEFAULT_POINT_BUDGET,
        })
    }

    /// Builds a basis from a list of column vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        let mut data = Vec::with_capacity(n * n);
        for c in columns {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            data.extend_from_slice(c);
        }
        Self::from_column_major(n, data)
    }

    /// Builds a basis from rows, where row `i` holds coordinate `i` of every
    /// column (the layout of the basis file format).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                data[j * n + i] = v;
            }
        }
        Self::from_column_major(n, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_column_major(n, data).expect("identity is well-conditioned")
    }

    /// `c · Zⁿ`.
    pub fn scaled_identity(n: usize, c: f64) -> Result<Self> {
        lattice_scale(&Self::identity(n), c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry (i, j): coordinate `i` of column `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cols[j * self.n + i]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.cols.chunks_exact(self.n)
    }

    /// Spectral condition number σ_max / σ_min.
    pub fn cond(&self) -> f64 {
        self.cond
    }

    /// Maximum number of points a single enumeration over this basis may yield.
    pub fn point_budget(&self) -> u64 {
        self.budget
    }

    pub fn with_point_budget(mut self, budget: u64) -> Self {
        self.budget = budget.max(1);
        self
    }

    /// `B · c` for real coefficients.
    pub fn apply(&self, c: &[f64]) -> Point {
        let mut out = vec![0.0; self.n];
        for (j, &cj) in c.iter().enumerate() {
            if cj != 0.0 {
                for (o, b) in out.iter_mut().zip(self.column(j)) {
                    *o += cj * b;
                }
            }
        }
        out
    }

    /// `B · c` for integer coefficients, written into `out`.
    pub fn apply_int(&self, c: &[i64], out: &mut [f64]) {
        out.fill(0.0);
        for (j, &cj) in c.iter().enumerate() {
            if cj != 0 {
                let cj = cj as f64;
                for (o, b) in out.iter_mut().zip(self.column(j)) {
                    *o += cj * b;
                }
            }
        }
    }

    /// Coefficients `B⁻¹ x`.
    pub fn coefficients(&self, x: &[f64]) -> CoefVector {
        let mut out = vec![0.0; self.n];
        self.coefficients_into(x, &mut out);
        out
    }

    pub(crate) fn coefficients_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.inv[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `Qᵀ x`, the target expressed in the Gram–Schmidt frame.
    pub(crate) fn qt_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.qt[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Entry (i, j) of R.
    #[inline]
    pub(crate) fn r(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.n + j]
    }

    /// Smallest Gram–Schmidt length, a lower bound on λ₁.
    pub fn min_gram_schmidt(&self) -> f64 {
        (0..self.n).map(|i| self.r(i, i).abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn dual(&self) -> Result<Basis> {
        // Column j of (B⁻¹)ᵀ is row j of B⁻¹, so the row-major inverse is
        // already the column-major dual.
        Ok(Basis::from_column_major(self.n, self.inv.clone())?.with_point_budget(self.budget))
    }

    /// Reduces `x` into the half-open parallelepiped, writing the reduced
    /// point and its coefficients.
    pub fn reduce_into(&self, x: &[f64], point: &mut [f64], coefs: &mut [f64]) {
        self.coefficients_into(x, coefs);
        point.copy_from_slice(x);
        for (j, c) in coefs.iter_mut().enumerate() {
            // floor(c + 1/2) sends an exact half to the residual −1/2.
            let k = libm::floor(*c + 0.5);
            if k != 0.0 {
                *c -= k;
                for (p, b) in point.iter_mut().zip(self.column(j)) {
                    *p -= k * b;
                }
            }
        }
    }

    /// Whether `x` has integral coefficients within `tol`.
    pub fn is_lattice_vector(&self, x: &[f64], tol: f64) -> bool {
        self.coefficients(x).iter().all(|c| (c - libm::round(*c)).abs() <= tol)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n, got })
        }
    }
}

/// `B* = (B⁻¹)ᵀ`.
pub fn dual_basis(b: &Basis) -> Result<Basis> {
    b.dual()
}

/// `x mod B`: returns the reduced point and its coefficient vector in
/// `[−1/2, 1/2)ⁿ`.
pub fn reduce_mod(b: &Basis, x: &[f64]) -> Result<(Point, CoefVector)> {
    b.check_dim(x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(domain("x", "coordinates must be finite"));
    }
    let mut p = vec![0.0; b.n];
    let mut c = vec![0.0; b.n];
    b.reduce_into(x, &mut p, &mut c);
    Ok((p, c))
}

/// Multiplies every column by `c > 0`.
pub fn lattice_scale(b: &Basis, c: f64) -> Result<Basis> {
    positive("c", c)?;
    let cols = b.cols.iter().map(|v| v * c).collect();
    Ok(Basis::from_column_major(b.n, cols)?.with_point_budget(b.budget))
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}
