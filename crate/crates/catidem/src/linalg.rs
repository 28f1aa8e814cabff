//! Exact linear algebra over prime fields.
//!
//! Dense row-major matrices with entries in `[0, p)`. Elimination dispatches to a
//! bit-packed kernel when `p = 2` and to a sparse kernel for large matrices over
//! other primes.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

static SPARSE_THRESHOLD: AtomicUsize = AtomicUsize::new(512);

/// Side length above which elimination over odd primes uses the sparse kernel.
pub fn sparse_threshold() -> usize {
    SPARSE_THRESHOLD.load(Ordering::Relaxed)
}

/// Change the sparse threshold (matrices with `rows * cols > t * t` go sparse).
pub fn set_sparse_threshold(t: usize) {
    SPARSE_THRESHOLD.store(t, Ordering::Relaxed);
}

/// The prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::NonPrimeModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        add(a, b, self.p)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        sub(a, b, self.p)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        mul(a, b, self.p)
    }

    pub fn neg(&self, a: u32) -> u32 {
        neg(a, self.p)
    }

    /// Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        inv(a, self.p)
    }

    /// (-1)^n as a field element.
    pub fn sign(&self, n: i64) -> u32 {
        if n.rem_euclid(2) == 0 {
            1
        } else {
            self.p - 1
        }
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
fn add(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    if s >= p as u64 {
        (s - p as u64) as u32
    } else {
        s as u32
    }
}

#[inline]
fn sub(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

#[inline]
fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

fn inv(a: u32, p: u32) -> u32 {
    assert!(!a.is_multiple_of(p), "inverse of zero");
    // Fermat
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Dense matrix over F_p, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[F_{}; {}x{}]", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of reduced row-echelon form: `r = t * m`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub r: Matrix,
    pub pivots: Vec<usize>,
    pub t: Matrix,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Particular solution plus kernel basis (as columns).
#[derive(Clone, Debug)]
pub struct Solution {
    pub x0: Vec<u32>,
    pub kernel: Matrix,
}

impl Matrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Matrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn scalar(p: u32, n: usize, c: u32) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = c % p;
        }
        m
    }

    /// Build from signed integer rows, reducing mod p.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = x.rem_euclid(p as i64) as u32;
            }
        }
        m
    }

    pub fn from_data(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        let data = data.into_iter().map(|x| x % p).collect();
        Matrix { p, rows, cols, data }
    }

    pub fn from_fn(p: u32, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut m = Self::zeros(p, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) % p;
            }
        }
        m
    }

    pub fn column(p: u32, v: &[u32]) -> Self {
        Self::from_data(p, v.len(), 1, v.to_vec())
    }

    pub fn from_columns(p: u32, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(p, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                m.data[i * cols.len() + j] = c[i] % p;
            }
        }
        m
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
    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "add shape");
        let p = self.p;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| add(a, b, p)).collect();
        Matrix { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "sub shape");
        let p = self.p;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| sub(a, b, p)).collect();
        Matrix { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        let p = self.p;
        Matrix { p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| neg(a, p)).collect() }
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let p = self.p;
        let c = c % p;
        Matrix { p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| mul(a, c, p)).collect() }
    }

    /// Multiply by (-1)^n.
    pub fn signed(&self, n: i64) -> Matrix {
        if n.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "mul shape {}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols);
        let p = self.p as u64;
        let mut out = Self::zeros(self.p, self.rows, o.cols);
        if self.rows == 0 || o.cols == 0 {
            return out;
        }
        let mut acc = vec![0u64; o.cols];
        // accumulate without reducing until close to overflow
        let limit = u64::MAX / ((p - 1).max(1) * (p - 1).max(1)) - 1;
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut pending = 0u64;
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &o.data[k * o.cols..(k + 1) * o.cols];
                for (x, &b) in acc.iter_mut().zip(orow) {
                    *x += a * b as u64;
                }
                pending += 1;
                if pending >= limit {
                    acc.iter_mut().for_each(|x| *x %= p);
                    pending = 0;
                }
            }
            for j in 0..o.cols {
                out.data[i * o.cols + j] = (acc[j] % p) as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        let p = self.p as u64;
        (0..self.rows)
            .map(|i| {
                let mut s = 0u64;
                for (k, &x) in v.iter().enumerate() {
                    s = (s + self.data[i * self.cols + k] as u64 * x as u64) % p;
                }
                s as u32
            })
            .collect()
    }

    /// Kronecker product, row index `i * o.rows + k`.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        let p = self.p;
        let mut out = Self::zeros(p, self.rows * o.rows, self.cols * o.cols);
        let oc = self.cols * o.cols;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        let b = o.get(k, l);
                        if b != 0 {
                            out.data[(i * o.rows + k) * oc + j * o.cols + l] = mul(a, b, p);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows, "hstack rows");
        let mut out = Self::zeros(self.p, self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            let w = self.cols + o.cols;
            out.data[i * w..i * w + self.cols].copy_from_slice(self.row(i));
            out.data[i * w + self.cols..(i + 1) * w].copy_from_slice(o.row(i));
        }
        out
    }

    pub fn vstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        Matrix { p: self.p, rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn block_diag(p: u32, blocks: &[&Matrix]) -> Matrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(p, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Overwrite the block starting at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    /// Add `b` into the block starting at (r0, c0).
    pub fn add_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        let p = self.p;
        for i in 0..b.rows {
            for j in 0..b.cols {
                let x = b.get(i, j);
                if x != 0 {
                    let idx = (r0 + i) * self.cols + c0 + j;
                    self.data[idx] = add(self.data[idx], x, p);
                }
            }
        }
    }

    pub fn block(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = Self::zeros(self.p, rows, cols);
        for i in 0..rows {
            let src = (r0 + i) * self.cols + c0;
            out.data[i * cols..(i + 1) * cols].copy_from_slice(&self.data[src..src + cols]);
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.p, self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.p, idx.len(), self.cols, |i, j| self.get(idx[i], j))
    }

    /// Permute rows: output row `perm[i]` is input row `i`.
    pub fn permute_rows(&self, perm: &[usize]) -> Matrix {
        let mut out = Self::zeros(self.p, self.rows, self.cols);
        for i in 0..self.rows {
            let d = perm[i];
            out.data[d * self.cols..(d + 1) * self.cols].copy_from_slice(self.row(i));
        }
        out
    }

    /// Permute columns: output column `perm[j]` is input column `j`.
    pub fn permute_cols(&self, perm: &[usize]) -> Matrix {
        let mut out = Self::zeros(self.p, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * self.cols + perm[j]] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Reduced row-echelon form with transform.
    pub fn rref(&self) -> Rref {
        let aug = self.hstack(&Matrix::identity(self.p, self.rows));
        let (red, pivots) = eliminate(&aug, self.cols);
        let r = red.block(0, self.rows, 0, self.cols);
        let t = red.block(0, self.rows, self.cols, self.rows);
        Rref { r, pivots, t }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        eliminate(self, self.cols).1.len()
    }

    /// Basis of the right kernel, as columns.
    pub fn kernel(&self) -> Matrix {
        let (red, pivots) = eliminate(self, self.cols);
        kernel_from_rref(&red, &pivots, self.cols)
    }

    /// Solve `self * x = b`.
    pub fn solve(&self, b: &[u32]) -> Result<Solution> {
        assert_eq!(b.len(), self.rows, "rhs length");
        let aug = self.hstack(&Matrix::column(self.p, b));
        let (red, pivots) = eliminate(&aug, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x0 = vec![0u32; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x0[c] = red.get(r, self.cols);
        }
        Ok(Solution { x0, kernel: kernel_from_rref(&red, &pivots, self.cols) })
    }

    /// Particular solution `x` of `self * x = b` for matrix right-hand sides.
    pub fn solve_matrix(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(b.rows, self.rows, "rhs rows");
        let aug = self.hstack(b);
        let (red, pivots) = eliminate(&aug, self.cols + b.cols);
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.p, self.cols, b.cols);
        for (r, &c) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.data[c * b.cols + j] = red.get(r, self.cols + j);
            }
        }
        Some(x)
    }

    /// Particular solution of `x * self = b`.
    pub fn solve_left(&self, b: &Matrix) -> Option<Matrix> {
        self.transpose().solve_matrix(&b.transpose()).map(|x| x.transpose())
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let r = self.rref();
        if r.rank() == self.rows {
            Some(r.t)
        } else {
            None
        }
    }

    /// Indices of a maximal independent set of columns (the pivot columns).
    pub fn pivot_columns(&self) -> Vec<usize> {
        if self.rows == 0 {
            return vec![];
        }
        eliminate(self, self.cols).1
    }

    /// Basis of the column space, as columns.
    pub fn column_space(&self) -> Matrix {
        let piv = self.pivot_columns();
        self.select_cols(&piv)
    }

    /// A basis of a complement of the column space of `self` inside F_p^rows,
    /// taken from standard basis vectors.
    pub fn complement_basis(&self) -> Vec<usize> {
        let aug = self.hstack(&Matrix::identity(self.p, self.rows));
        let piv = aug.pivot_columns();
        piv.into_iter().filter(|&c| c >= self.cols).map(|c| c - self.cols).collect()
    }
}

fn kernel_from_rref(red: &Matrix, pivots: &[usize], ncols: usize) -> Matrix {
    let p = red.p;
    let piv: Vec<usize> = pivots.iter().copied().filter(|&c| c < ncols).collect();
    let mut is_piv = vec![false; ncols];
    for &c in &piv {
        is_piv[c] = true;
    }
    let free: Vec<usize> = (0..ncols).filter(|&c| !is_piv[c]).collect();
    let mut k = Matrix::zeros(p, ncols, free.len());
    for (j, &f) in free.iter().enumerate() {
        k.data[f * free.len() + j] = 1 % p;
        for (r, &c) in piv.iter().enumerate() {
            let v = red.get(r, f);
            if v != 0 {
                k.data[c * free.len() + j] = neg(v, p);
            }
        }
    }
    k
}

/// Reduced row-echelon form of `m`, pivoting only in the first `pivot_cols` columns.
/// Returns the reduced matrix (same shape) and the pivot columns.
pub fn eliminate(m: &Matrix, pivot_cols: usize) -> (Matrix, Vec<usize>) {
    if m.p == 2 {
        return gf2::eliminate(m, pivot_cols);
    }
    let t = sparse_threshold();
    if m.rows * m.cols > t * t {
        let nnz = m.data.iter().filter(|&&x| x != 0).count();
        if nnz * 8 < m.rows * m.cols {
            return sparse::eliminate(m, pivot_cols);
        }
    }
    eliminate_dense(m, pivot_cols)
}

pub(crate) fn eliminate_dense(m: &Matrix, pivot_cols: usize) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let p = a.p;
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a.data[i * cols + c] != 0) else { continue };
        if pr != r {
            for j in 0..cols {
                a.data.swap(pr * cols + j, r * cols + j);
            }
        }
        let iv = inv(a.data[r * cols + c], p);
        if iv != 1 {
            for j in c..cols {
                a.data[r * cols + j] = mul(a.data[r * cols + j], iv, p);
            }
        }
        let prow: Vec<u32> = a.data[r * cols..(r + 1) * cols].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a.data[i * cols + c];
            if f == 0 {
                continue;
            }
            let nf = neg(f, p) as u64;
            let row = &mut a.data[i * cols..(i + 1) * cols];
            for j in c..cols {
                if prow[j] != 0 {
                    row[j] = ((row[j] as u64 + nf * prow[j] as u64) % p as u64) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub mod gf2 {
    //! Bit-packed elimination over F_2.
    use super::Matrix;

    pub(crate) struct BitRows {
        pub words: usize,
        pub rows: Vec<Vec<u64>>,
    }

    impl BitRows {
        pub fn from_matrix(m: &Matrix) -> Self {
            let words = m.cols.div_ceil(64).max(1);
            let rows = (0..m.rows)
                .map(|i| {
                    let mut w = vec![0u64; words];
                    for (j, &x) in m.row(i).iter().enumerate() {
                        if x & 1 == 1 {
                            w[j / 64] |= 1 << (j % 64);
                        }
                    }
                    w
                })
                .collect();
            BitRows { words, rows }
        }

        pub fn to_matrix(&self, cols: usize) -> Matrix {
            let mut m = Matrix::zeros(2, self.rows.len(), cols);
            for (i, w) in self.rows.iter().enumerate() {
                for j in 0..cols {
                    if (w[j / 64] >> (j % 64)) & 1 == 1 {
                        m.data[i * cols + j] = 1;
                    }
                }
            }
            m
        }
    }

    pub fn eliminate(m: &Matrix, pivot_cols: usize) -> (Matrix, Vec<usize>) {
        let mut b = BitRows::from_matrix(m);
        let rows = b.rows.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == rows {
                break;
            }
            let (wi, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pr) = (r..rows).find(|&i| b.rows[i][wi] & bit != 0) else { continue };
            b.rows.swap(pr, r);
            let prow = b.rows[r].clone();
            for i in 0..rows {
                if i != r && b.rows[i][wi] & bit != 0 {
                    let row = &mut b.rows[i];
                    for k in wi..b.words {
                        row[k] ^= prow[k];
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (b.to_matrix(m.cols), pivots)
    }
}

pub mod sparse {
    //! Sparse row elimination for large matrices over odd primes.
    use super::{add, inv, mul, neg, Matrix};
    use std::collections::BTreeMap;

    type Row = Vec<(usize, u32)>;

    fn axpy(a: &Row, f: u32, b: &Row, p: u32) -> Row {
        // a + f * b
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, mul(f, b[j].1, p)));
                j += 1;
            } else {
                let v = add(a[i].1, mul(f, b[j].1, p), p);
                if v != 0 {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    pub fn eliminate(m: &Matrix, pivot_cols: usize) -> (Matrix, Vec<usize>) {
        let p = m.p;
        let mut basis: BTreeMap<usize, Row> = BTreeMap::new();
        let mut rest: Vec<Row> = Vec::new();
        for i in 0..m.rows {
            let mut row: Row = m.row(i).iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j, x)).collect();
            loop {
                let Some(&(c, v)) = row.first() else { break };
                if c >= pivot_cols {
                    break;
                }
                if let Some(prow) = basis.get(&c) {
                    row = axpy(&row, neg(v, p), prow, p);
                } else {
                    let iv = inv(v, p);
                    let row: Row = row.iter().map(|&(j, x)| (j, mul(x, iv, p))).collect();
                    basis.insert(c, row);
                    break;
                }
            }
            // rows that reduced to something supported beyond pivot_cols are kept aside
            if let Some(&(c, _)) = row.first() {
                if c >= pivot_cols {
                    rest.push(row);
                }
            }
        }
        // back substitution
        let keys: Vec<usize> = basis.keys().rev().copied().collect();
        for &c in &keys {
            let prow = basis[&c].clone();
            for (&k, row) in basis.range_mut(..c) {
                let _ = k;
                if let Some(&(_, v)) = row.iter().find(|(j, _)| *j == c) {
                    *row = axpy(row, neg(v, p), &prow, p);
                }
            }
        }
        let mut out = Matrix::zeros(p, m.rows, m.cols);
        let mut r = 0;
        let mut pivots = Vec::new();
        for (&c, row) in &basis {
            for &(j, x) in row {
                out.data[r * m.cols + j] = x;
            }
            pivots.push(c);
            r += 1;
        }
        // remaining rows (zero in pivot columns) go below, left as is
        for row in rest {
            if r < m.rows {
                for &(j, x) in &row {
                    out.data[r * m.cols + j] = x;
                }
                r += 1;
            }
        }
        (out, pivots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_all_ones_f2() {
        let m = Matrix::from_rows(2, &[vec![1, 1], vec![1, 1]]);
        let r = m.rref();
        assert_eq!(r.r, Matrix::from_rows(2, &[vec![1, 1], vec![0, 0]]));
        assert_eq!(r.rank(), 1);
        assert_eq!(r.t.mul(&m), r.r);
    }

    #[test]
    fn rref_identity_and_zero() {
        let i = Matrix::identity(5, 4);
        assert_eq!(i.rref().r, i);
        assert_eq!(i.rank(), 4);
        let z = Matrix::zeros(5, 3, 4);
        assert_eq!(z.rref().r, z);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn solve_examples() {
        let m = Matrix::from_rows(2, &[vec![1, 1], vec![1, 1]]);
        let s = m.solve(&[1, 1]).unwrap();
        assert_eq!(s.x0, vec![1, 0]);
        assert_eq!(s.kernel, Matrix::from_rows(2, &[vec![1], vec![1]]));
        let i = Matrix::identity(7, 3);
        let s = i.solve(&[3, 4, 5]).unwrap();
        assert_eq!(s.x0, vec![3, 4, 5]);
        assert_eq!(s.kernel.cols(), 0);
        let z = Matrix::from_rows(3, &[vec![0]]);
        assert!(matches!(z.solve(&[1]), Err(Error::NoSolution)));
    }

    #[test]
    fn solve_mod17() {
        let a = Matrix::from_rows(17, &[vec![1, 1, 2], vec![3, 4, 3], vec![16, 5, 5]]);
        let s = a.solve(&[3, 15, 8]).unwrap();
        assert_eq!(s.x0, vec![2, 3, 16]);
    }

    #[test]
    fn sparse_matches_dense() {
        let p = 5;
        let m = Matrix::from_fn(p, 30, 40, |i, j| if (i * 7 + j * 3) % 11 == 0 { ((i + j) % 5) as u32 } else { 0 });
        let (a, pa) = eliminate_dense(&m, 40);
        let (b, pb) = sparse::eliminate(&m, 40);
        assert_eq!(pa, pb);
        assert_eq!(a.block(0, pa.len(), 0, 40), b.block(0, pb.len(), 0, 40));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(3, &[vec![1, 2], vec![0, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3, 2));
        assert!(Matrix::from_rows(3, &[vec![1, 1], vec![1, 1]]).inverse().is_none());
    }

    #[test]
    fn prime_field_checks() {
        assert!(PrimeField::new(4).is_err());
        let f = PrimeField::new(3).unwrap();
        assert_eq!(f.mul(f.inv(2), 2), 1);
        assert_eq!(f.sign(3), 2);
    }
}
