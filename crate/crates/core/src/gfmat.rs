//! Dense exact linear algebra over the prime field 𝔽_p.
//!
//! Matrices are stored row-major as residues in `[0, p)`. Vectors are plain
//! `Vec<u32>` slices; a matrix acts on column vectors. Row spaces are the
//! currency for subspaces: a subspace of 𝔽_p^n is a matrix whose rows span it,
//! usually kept in reduced row-echelon form so that coordinates can be read
//! straight off the pivot columns.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;

/// Largest modulus accepted; products of two residues then fit in a `u32`.
pub const MAX_PRIME: u32 = 1 << 16;

/// Matrices with at least this many entries are eliminated on the parallel backend.
const PAR_THRESHOLD: usize = 64 * 64;
/// Target number of entries handed to one parallel task during elimination.
const ROW_BLOCK_ELEMS: usize = 16 * 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not a prime below 2^16")]
    BadModulus(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<(), GfError> {
    if p < MAX_PRIME && is_prime(p) {
        Ok(())
    } else {
        Err(GfError::BadModulus(p))
    }
}

#[inline]
pub fn add(p: u32, a: u32, b: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(p: u32, a: u32, b: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul(p: u32, a: u32, b: u32) -> u32 {
    a * b % p
}

#[inline]
pub fn neg(p: u32, a: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow(p: u32, mut base: u32, mut exp: u64) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(p, acc, base);
        }
        base = mul(p, base, base);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue (Fermat).
pub fn inv(p: u32, a: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    pow(p, a, u64::from(p) - 2)
}

/// Reduces a signed integer into `[0, p)`.
pub fn reduce(p: u32, x: i64) -> u32 {
    x.rem_euclid(i64::from(p)) as u32
}

/// A residue together with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u32,
    p: u32,
}

impl FpScalar {
    pub fn new(p: u32, value: i64) -> Self {
        FpScalar {
            value: reduce(p, value),
            p,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Option<Self> {
        (self.value != 0).then(|| FpScalar {
            value: inv(self.p, self.value),
            p: self.p,
        })
    }
}

impl std::ops::Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p);
        FpScalar {
            value: add(self.p, self.value, rhs.value),
            p: self.p,
        }
    }
}

impl std::ops::Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p);
        FpScalar {
            value: sub(self.p, self.value, rhs.value),
            p: self.p,
        }
    }
}

impl std::ops::Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p);
        FpScalar {
            value: mul(self.p, self.value, rhs.value),
            p: self.p,
        }
    }
}

impl std::ops::Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        FpScalar {
            value: neg(self.p, self.value),
            p: self.p,
        }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Dense matrix over 𝔽_p.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`FpMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: FpMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix {}x{} over F_{}", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry mod `p`.
    pub fn from_rows<R: AsRef<[i64]>>(p: u32, cols: usize, rows: &[R]) -> Result<Self, GfError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(GfError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&x| reduce(p, x)));
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from already-reduced row-major data.
    pub fn from_data(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        debug_assert!(data.iter().all(|&x| x < p));
        FpMatrix {
            p,
            rows,
            cols,
            data,
        }
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_vectors(p: u32, cols: usize, vectors: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(vectors.len() * cols);
        for v in vectors {
            assert_eq!(v.len(), cols);
            data.extend_from_slice(v);
        }
        FpMatrix {
            p,
            rows: vectors.len(),
            cols,
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(p: u32, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        FpMatrix {
            p,
            rows,
            cols,
            data,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn to_nested(&self) -> Vec<Vec<u32>> {
        self.row_vectors()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn same_field(&self, other: &Self) -> Result<(), GfError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(GfError::ModulusMismatch(self.p, other.p))
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "modulus mismatch in product");
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions differ: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let p = self.p;
        let n = rhs.cols;
        let mut out = vec![0u64; self.rows * n];
        for r in 0..self.rows {
            let acc = &mut out[r * n..(r + 1) * n];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == 0 {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in acc.iter_mut().zip(brow) {
                    *o += u64::from(a * b);
                }
            }
        }
        let data = out.into_iter().map(|x| (x % u64::from(p)) as u32).collect();
        FpMatrix {
            p,
            rows: self.rows,
            cols: n,
            data,
        }
    }

    /// Matrix-vector product for a column vector `v`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = u64::from(self.p);
        (0..self.rows)
            .map(|r| {
                let s: u64 = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| u64::from(a) * u64::from(b))
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.p, self.rows, self.cols), (rhs.p, rhs.rows, rhs.cols));
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| add(p, a, b))
            .collect();
        FpMatrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.p, self.rows, self.cols), (rhs.p, rhs.rows, rhs.cols));
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| sub(p, a, b))
            .collect();
        FpMatrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: u32) -> Self {
        let p = self.p;
        let s = s % p;
        let data = self.data.iter().map(|&a| mul(p, a, s)).collect();
        FpMatrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `self += s * rhs`, in place.
    pub fn add_scaled(&mut self, s: u32, rhs: &Self) {
        assert_eq!((self.p, self.rows, self.cols), (rhs.p, rhs.rows, rhs.cols));
        let p = self.p;
        let s = s % p;
        if s == 0 {
            return;
        }
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = (*a + s * b) % p;
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(GfError::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(GfError::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(FpMatrix {
            p: self.p,
            rows: self.rows,
            cols,
            data,
        })
    }

    /// Sub-block of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut data = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for r in r0..r1 {
            data.extend_from_slice(&self.row(r)[c0..c1]);
        }
        FpMatrix {
            p: self.p,
            rows: r1 - r0,
            cols: c1 - c0,
            data,
        }
    }

    /// Selects the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        FpMatrix {
            p: self.p,
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Selects the listed columns, in order.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(idx.iter().map(|&c| row[c]));
        }
        FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    pub fn rref(&self) -> Rref {
        self.rref_with(Exec::default())
    }

    /// Gauss–Jordan elimination with first-nonzero pivoting.
    ///
    /// The backend only changes how the per-pivot row updates are scheduled;
    /// the result is identical on both.
    pub fn rref_with(&self, exec: Exec) -> Rref {
        let p = self.p;
        let (rows, cols) = (self.rows, self.cols);
        let mut data = self.data.clone();
        let mut pivots = Vec::new();
        let exec = if rows * cols >= PAR_THRESHOLD {
            exec
        } else {
            Exec::Sequential
        };
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in c..cols {
                    data.swap(pr * cols + j, r * cols + j);
                }
            }
            let s = inv(p, data[r * cols + c]);
            if s != 1 {
                for x in &mut data[r * cols + c..(r + 1) * cols] {
                    *x = mul(p, *x, s);
                }
            }
            let pivot_row: Vec<u32> = data[r * cols + c..(r + 1) * cols].to_vec();
            let pivot_idx = r;
            let block = (ROW_BLOCK_ELEMS / cols).max(1);
            exec.for_each_chunk_mut(&mut data, block * cols, |b, chunk| {
                for (k, row) in chunk.chunks_mut(cols).enumerate() {
                    if b * block + k == pivot_idx {
                        continue;
                    }
                    let f = row[c];
                    if f == 0 {
                        continue;
                    }
                    let nf = p - f;
                    for (x, &y) in row[c..].iter_mut().zip(&pivot_row) {
                        *x = (*x + nf * y) % p;
                    }
                }
            });
            pivots.push(c);
            r += 1;
        }
        Rref {
            reduced: FpMatrix {
                p,
                rows,
                cols,
                data,
            },
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis (as rows, in reduced echelon form) of the row space.
    pub fn row_space(&self) -> FpMatrix {
        let rr = self.rref();
        rr.reduced.block(0, rr.rank, 0, self.cols)
    }

    /// Rows spanning `{v : self · v = 0}`; there are `cols − rank` of them.
    pub fn kernel_basis(&self) -> FpMatrix {
        let rr = self.rref();
        let p = self.p;
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &c in &rr.pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut out = FpMatrix::zeros(p, free.len(), n);
        for (k, &f) in free.iter().enumerate() {
            out.data[k * n + f] = 1 % p;
            for (i, &pc) in rr.pivots.iter().enumerate() {
                out.data[k * n + pc] = neg(p, rr.reduced.get(i, f));
            }
        }
        out
    }

    /// Rows spanning `{w : w · self = 0}`.
    pub fn left_kernel_basis(&self) -> FpMatrix {
        self.transpose().kernel_basis()
    }

    /// Some `v` with `self · v = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, GfError> {
        if b.len() != self.rows {
            return Err(GfError::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let bcol = FpMatrix::from_data(
            self.p,
            self.rows,
            1,
            b.iter().map(|&x| x % self.p).collect(),
        );
        let aug = self.hstack(&bcol)?;
        let rr = aug.rref();
        if rr.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut v = vec![0u32; self.cols];
        for (i, &c) in rr.pivots.iter().enumerate() {
            v[c] = rr.reduced.get(i, self.cols);
        }
        Ok(Some(v))
    }

    /// Solves `self · X = rhs` column by column; `None` if any column fails.
    pub fn solve_matrix(&self, rhs: &FpMatrix) -> Result<Option<FpMatrix>, GfError> {
        self.same_field(rhs)?;
        if rhs.rows != self.rows {
            return Err(GfError::DimensionMismatch(format!(
                "right-hand side has {} rows, matrix has {}",
                rhs.rows, self.rows
            )));
        }
        let aug = self.hstack(rhs)?;
        let rr = aug.rref();
        if rr.pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = FpMatrix::zeros(self.p, self.cols, rhs.cols);
        for (i, &c) in rr.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.data[c * rhs.cols + j] = rr.reduced.get(i, self.cols + j);
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(self.clone());
        }
        let id = FpMatrix::identity(self.p, self.rows);
        let aug = self.hstack(&id).expect("same shape");
        let rr = aug.rref();
        if rr.rank < self.rows || rr.pivots[self.rows - 1] >= self.cols {
            return None;
        }
        Some(rr.reduced.block(0, self.rows, self.cols, 2 * self.cols))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Determinant by elimination; `None` for non-square input.
    pub fn determinant(&self) -> Option<u32> {
        if !self.is_square() {
            return None;
        }
        let p = self.p;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1 % p;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| a[i * n + c] != 0) else {
                return Some(0);
            };
            if pr != c {
                for j in 0..n {
                    a.swap(pr * n + j, c * n + j);
                }
                det = neg(p, det);
            }
            let piv = a[c * n + c];
            det = mul(p, det, piv);
            let s = inv(p, piv);
            for i in c + 1..n {
                let f = mul(p, a[i * n + c], s);
                if f == 0 {
                    continue;
                }
                for j in c..n {
                    a[i * n + j] = sub(p, a[i * n + j], mul(p, f, a[c * n + j]));
                }
            }
        }
        Some(det)
    }

    pub fn trace(&self) -> u32 {
        let p = self.p;
        (0..self.rows.min(self.cols)).fold(0, |acc, i| add(p, acc, self.get(i, i)))
    }

    /// Power by repeated squaring (square matrices only).
    pub fn pow(&self, mut e: u64) -> FpMatrix {
        assert!(self.is_square());
        let mut acc = FpMatrix::identity(self.p, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Row space of the stacked matrix.
pub fn subspace_sum(a: &FpMatrix, b: &FpMatrix) -> Result<FpMatrix, GfError> {
    Ok(a.vstack(b)?.row_space())
}

/// Row-space intersection, via the left kernel of `[a; −b]`.
pub fn subspace_intersection(a: &FpMatrix, b: &FpMatrix) -> Result<FpMatrix, GfError> {
    a.same_field(b)?;
    if a.cols != b.cols {
        return Err(GfError::DimensionMismatch(format!(
            "subspaces of F_p^{} and F_p^{}",
            a.cols, b.cols
        )));
    }
    let stacked = a.vstack(&b.scale(a.p - 1))?;
    let k = stacked.left_kernel_basis();
    let coeffs = k.block(0, k.rows, 0, a.rows);
    Ok(coeffs.mul(a).row_space())
}

/// Whether `v` lies in the row space of `a`.
pub fn contains_vector(a: &FpMatrix, v: &[u32]) -> Result<bool, GfError> {
    if v.len() != a.cols {
        return Err(GfError::DimensionMismatch(format!(
            "vector of length {} against subspace of F_p^{}",
            v.len(),
            a.cols
        )));
    }
    let r = a.rank();
    let vm = FpMatrix::from_data(a.p, 1, a.cols, v.iter().map(|&x| x % a.p).collect());
    Ok(a.vstack(&vm)?.rank() == r)
}

/// Whether the row space of `a` is contained in the row space of `b`.
pub fn is_subspace(a: &FpMatrix, b: &FpMatrix) -> Result<bool, GfError> {
    Ok(b.rank() == subspace_sum(a, b)?.rows())
}

/// A basis grown one vector at a time, kept in semi-echelon form.
///
/// Row `i` has a 1 at `pivots[i]` and zeros at the pivots of all earlier rows,
/// so a single forward pass reduces any vector.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    p: u32,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(p: u32, n: usize) -> Self {
        EchelonBasis {
            p,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    /// Residue of `v` after clearing every pivot column.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut w: Vec<u32> = v.iter().map(|&x| x % p).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = w[c];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (x, &y) in w[c..].iter_mut().zip(&row[c..]) {
                *x = (*x + nf * y) % p;
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.n);
        let mut w = self.reduce(v);
        let Some(c) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(self.p, w[c]);
        for x in &mut w[c..] {
            *x = mul(self.p, *x, s);
        }
        self.rows.push(w);
        self.pivots.push(c);
        true
    }

    /// The spanned subspace as a reduced row-echelon matrix.
    pub fn to_matrix(&self) -> FpMatrix {
        FpMatrix::from_vectors(self.p, self.n, &self.rows).row_space()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(p: u32, cols: usize, rows: &[&[i64]]) -> FpMatrix {
        FpMatrix::from_rows(p, cols, rows).unwrap()
    }

    #[test]
    fn rref_examples() {
        let id = FpMatrix::identity(2, 3);
        let r = id.rref();
        assert_eq!((r.rank, r.pivots), (3, vec![0, 1, 2]));
        assert_eq!(m(2, 2, &[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(m(5, 2, &[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(FpMatrix::zeros(3, 0, 0).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        let k = m(2, 2, &[&[1, 1]]).kernel_basis();
        assert_eq!(k.to_nested(), vec![vec![1, 1]]);
        assert_eq!(FpMatrix::identity(3, 4).kernel_basis().rows(), 0);
        assert_eq!(FpMatrix::zeros(5, 2, 3).kernel_basis().rows(), 3);
    }

    #[test]
    fn solve_examples() {
        let id = FpMatrix::identity(7, 3);
        assert_eq!(id.solve(&[1, 2, 3]).unwrap(), Some(vec![1, 2, 3]));
        let v = m(2, 2, &[&[1, 1]]).solve(&[1]).unwrap().unwrap();
        assert!(v == vec![1, 0] || v == vec![0, 1]);
        assert_eq!(m(3, 1, &[&[1], &[1]]).solve(&[1, 2]).unwrap(), None);
        assert!(matches!(id.solve(&[1]), Err(GfError::DimensionMismatch(_))));
    }

    #[test]
    fn subspace_examples() {
        let e1 = m(2, 3, &[&[1, 0, 0]]);
        let e2 = m(2, 3, &[&[0, 1, 0]]);
        assert_eq!(subspace_sum(&e1, &e2).unwrap().rows(), 2);
        assert_eq!(subspace_intersection(&e1, &e2).unwrap().rows(), 0);
        let a = m(3, 3, &[&[1, 2, 0], &[0, 1, 1]]);
        assert_eq!(subspace_intersection(&a, &a).unwrap(), a.row_space());
        let d = m(3, 2, &[&[1, 1]]);
        let full = m(3, 2, &[&[1, 0], &[0, 1]]);
        assert_eq!(subspace_intersection(&d, &full).unwrap().rows(), 1);
        assert!(contains_vector(&full, &[2, 2]).unwrap());
        assert!(is_subspace(&d, &full).unwrap());
        let other = m(5, 2, &[&[1, 0]]);
        assert_eq!(
            subspace_sum(&d, &other).unwrap_err(),
            GfError::ModulusMismatch(3, 5)
        );
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(5, 2, &[&[1, 2], &[3, 4]]);
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai), FpMatrix::identity(5, 2));
        assert_eq!(
            FpMatrix::zeros(5, 0, 0).inverse(),
            Some(FpMatrix::zeros(5, 0, 0))
        );
        // det = 4 - 6 = -2 = 3 mod 5
        assert_eq!(a.determinant(), Some(3));
        assert!(m(5, 2, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn parallel_rref_matches_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (rows, cols) in [(120, 90), (700, 40), (300, 300)] {
            let a = FpMatrix::random(3, rows, cols, &mut rng);
            assert_eq!(a.rref_with(Exec::Sequential), a.rref_with(Exec::Parallel));
            let low = a
                .mul(&FpMatrix::random(3, cols, 7, &mut rng))
                .mul(&FpMatrix::random(3, 7, cols, &mut rng));
            let r = low.rref_with(Exec::Parallel);
            assert_eq!(r, low.rref_with(Exec::Sequential));
            assert_eq!(r.rank, 7.min(rows));
        }
    }

    #[test]
    fn echelon_basis_tracks_rank() {
        let mut b = EchelonBasis::new(3, 3);
        assert!(b.insert(&[1, 2, 0]));
        assert!(!b.insert(&[2, 1, 0]));
        assert!(b.insert(&[0, 0, 1]));
        assert_eq!(b.to_matrix().rows(), 2);
        assert!(b.contains(&[1, 2, 2]));
    }

    fn arb_matrix() -> impl Strategy<Value = FpMatrix> {
        (
            prop::sample::select(vec![2u32, 3, 5, 7]),
            0usize..7,
            0usize..7,
            any::<u64>(),
        )
            .prop_map(|(p, r, c, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                FpMatrix::random(p, r, c, &mut rng)
            })
    }

    proptest! {
        #[test]
        fn rref_idempotent(a in arb_matrix()) {
            let r = a.rref();
            prop_assert_eq!(r.reduced.rref().reduced, r.reduced);
        }

        #[test]
        fn rank_nullity(a in arb_matrix()) {
            let k = a.kernel_basis();
            prop_assert_eq!(a.rank() + k.rows(), a.cols());
            prop_assert!(a.mul(&k.transpose()).is_zero());
            prop_assert_eq!(k.rank(), k.rows());
        }

        #[test]
        fn solve_consistent_rhs(a in arb_matrix(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<u32> = (0..a.cols()).map(|_| rand::Rng::gen_range(&mut rng, 0..a.p())).collect();
            let b = a.apply(&v);
            let w = a.solve(&b).unwrap().expect("consistent system");
            prop_assert_eq!(a.apply(&w), b);
        }

        #[test]
        fn sum_intersection_dimensions(a in arb_matrix(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = FpMatrix::random(a.p(), 3, a.cols(), &mut rng);
            let s = subspace_sum(&a, &b).unwrap().rows();
            let i = subspace_intersection(&a, &b).unwrap().rows();
            prop_assert_eq!(s + i, a.rank() + b.rank());
        }
    }
}
