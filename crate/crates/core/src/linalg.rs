//! Dense complex matrices and the small set of direct solvers the rest of the
//! crate is built on.
//!
//! Everything here targets tiny systems (a few dozen unknowns at most), so the
//! kernels are plain triple loops and LU with partial pivoting.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type Complex = Complex64;

/// Relative pivot threshold: a pivot is rejected when `|p| < PIVOT_EPS_REL * ‖a‖_∞`.
pub const PIVOT_EPS_REL: f64 = 1e-13;
/// Default relative residual accepted from a linear solve.
pub const TOL_SOLVE: f64 = 1e-9;
/// Default relative threshold for numerical rank.
pub const RANK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry list has length {len}, expected {rows}x{cols}")]
    BadLength { rows: usize, cols: usize, len: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular: pivot {pivot} has magnitude {magnitude:e}")]
    Singular { pivot: usize, magnitude: f64 },
    #[error("leading block m11 is singular (pivot {pivot})")]
    Singular11 { pivot: usize },
    #[error("Schur complement m22 - m21 m11^-1 m12 is singular (pivot {pivot})")]
    SingularSchur { pivot: usize },
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Complex]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex::new(0.0, 0.0) })
    }

    /// Builds a matrix from real row slices; handy in tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::BadLength {
                    rows: r,
                    cols: c,
                    len: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    /// Column vector.
    pub fn column_vector(v: &[Complex]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Row vector.
    pub fn row_vector(v: &[Complex]) -> Self {
        Self {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Checked product.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == Complex::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(l);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(Complex, Complex) -> Complex,
    ) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Rectangular sub-block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Gathers the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "vstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)]
            } else {
                other[(i - self.rows, j)]
            }
        }))
    }

    /// Multiplies column `j` by `d[j]` (right multiplication by `diag(d)`).
    pub fn scale_cols(&self, d: &[Complex]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j])
    }

    /// Multiplies row `i` by `d[i]` (left multiplication by `diag(d)`).
    pub fn scale_rows(&self, d: &[Complex]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[i])
    }

    /// Frobenius distance `‖self − other‖_F`; panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; they are used internally where shapes
// are fixed by construction. Public entry points use the checked variants.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// 2×2 block partition of a square matrix with square diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Block2x2 {
    pub m11: ComplexMatrix,
    pub m12: ComplexMatrix,
    pub m21: ComplexMatrix,
    pub m22: ComplexMatrix,
}

impl Block2x2 {
    /// Splits a square matrix after the first `n1` rows/columns.
    pub fn split(m: &ComplexMatrix, n1: usize) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        let n = m.rows;
        if n1 > n {
            return Err(LinalgError::DimensionMismatch {
                op: "block split",
                left: m.shape(),
                right: (n1, n1),
            });
        }
        let n2 = n - n1;
        Ok(Self {
            m11: m.block(0, 0, n1, n1),
            m12: m.block(0, n1, n1, n2),
            m21: m.block(n1, 0, n2, n1),
            m22: m.block(n1, n1, n2, n2),
        })
    }

    pub fn n1(&self) -> usize {
        self.m11.rows
    }

    pub fn n2(&self) -> usize {
        self.m22.rows
    }

    fn check_shapes(&self) -> Result<(), LinalgError> {
        let (n1, n2) = (self.m11.rows, self.m22.rows);
        let expect = [
            (&self.m11, (n1, n1)),
            (&self.m12, (n1, n2)),
            (&self.m21, (n2, n1)),
            (&self.m22, (n2, n2)),
        ];
        for (m, shape) in expect {
            if m.shape() != shape {
                return Err(LinalgError::DimensionMismatch {
                    op: "block shapes",
                    left: m.shape(),
                    right: shape,
                });
            }
        }
        Ok(())
    }

    pub fn assemble(&self) -> ComplexMatrix {
        let top = self.m11.hstack(&self.m12).expect("block rows");
        let bottom = self.m21.hstack(&self.m22).expect("block rows");
        top.vstack(&bottom).expect("block cols")
    }
}

/// LU factorization `P·A = L·U` with partial pivoting, stored packed.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        Self::factor_with(a, PIVOT_EPS_REL)
    }

    /// Factorizes with a custom relative pivot threshold.
    pub fn factor_with(a: &ComplexMatrix, pivot_eps_rel: f64) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        let n = a.rows;
        let threshold = pivot_eps_rel * a.inf_norm();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, mag) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag <= threshold || mag == 0.0 {
                return Err(LinalgError::Singular {
                    pivot: k,
                    magnitude: mag,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        let n = self.dim();
        if b.rows != n {
            return Err(LinalgError::DimensionMismatch {
                op: "solve",
                left: self.lu.shape(),
                right: b.shape(),
            });
        }
        let m = b.cols;
        let mut x = b.select_rows(&self.perm);
        for c in 0..m {
            for i in 0..n {
                let mut s = x[(i, c)];
                for j in 0..i {
                    s -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.dim()))
            .expect("identity has matching rows")
    }

    pub fn det(&self) -> Complex {
        let d: Complex = (0..self.dim()).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if a.is_square() && b.rows != a.rows {
        return Err(LinalgError::DimensionMismatch {
            op: "solve",
            left: a.shape(),
            right: b.shape(),
        });
    }
    Lu::factor(a)?.solve(b)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Ok(Lu::factor(a)?.inverse())
}

/// Determinant via LU; a singular factorization reports zero.
pub fn det(a: &ComplexMatrix) -> Result<Complex, LinalgError> {
    match Lu::factor_with(a, 0.0) {
        Ok(lu) => Ok(lu.det()),
        Err(LinalgError::Singular { .. }) => Ok(Complex::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Frobenius condition number `‖a‖_F·‖a⁻¹‖_F`; infinite when `a` is singular.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    if a.rows == 0 {
        return 1.0;
    }
    match inverse(a) {
        Ok(inv) => a.frobenius_norm() * inv.frobenius_norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Inverts a 2×2 block matrix through the Schur complement of `m11`.
///
/// `(M⁻¹)₂₂ = Δ⁻¹` with `Δ = m22 − m21·m11⁻¹·m12`; the remaining blocks follow
/// from `M⁻¹ = diag(m11⁻¹, 0) + [−m11⁻¹m12; I]·Δ⁻¹·[−m21m11⁻¹, I]`.
pub fn block_inverse_2x2(m: &Block2x2) -> Result<Block2x2, LinalgError> {
    m.check_shapes()?;
    let lu11 = Lu::factor(&m.m11).map_err(|e| match e {
        LinalgError::Singular { pivot, .. } => LinalgError::Singular11 { pivot },
        other => other,
    })?;
    let inv11 = lu11.inverse();
    let left = &inv11 * &m.m12; // m11⁻¹ m12
    let right = &m.m21 * &inv11; // m21 m11⁻¹
    let schur = &m.m22 - &(&m.m21 * &left);
    let schur_inv = Lu::factor(&schur)
        .map_err(|e| match e {
            LinalgError::Singular { pivot, .. } => LinalgError::SingularSchur { pivot },
            other => other,
        })?
        .inverse();
    let b12 = -&(&left * &schur_inv);
    let b21 = -&(&schur_inv * &right);
    let b11 = &inv11 + &(&(&left * &schur_inv) * &right);
    Ok(Block2x2 {
        m11: b11,
        m12: b12,
        m21: b21,
        m22: schur_inv,
    })
}

/// Numerical rank by Gaussian elimination with complete pivoting.
///
/// Elimination stops once the largest remaining entry drops below
/// `rank_eps · max|a_ij|`.
pub fn rank(a: &ComplexMatrix, rank_eps: f64) -> usize {
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0;
    }
    let threshold = rank_eps * scale;
    let mut w = a.clone();
    let (m, n) = a.shape();
    let mut r = 0;
    while r < m.min(n) {
        let mut best = (r, r, -1.0);
        for i in r..m {
            for j in r..n {
                let v = w[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= threshold {
            break;
        }
        let (pi, pj, _) = best;
        for j in 0..n {
            w.data.swap(r * n + j, pi * n + j);
        }
        for i in 0..m {
            w.data.swap(i * n + r, i * n + pj);
        }
        let pivot = w[(r, r)];
        for i in r + 1..m {
            let factor = w[(i, r)] / pivot;
            for j in r..n {
                let u = w[(r, j)];
                w[(i, j)] -= factor * u;
            }
        }
        r += 1;
    }
    r
}
