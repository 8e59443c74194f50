//! Exact linear algebra over the two-element field, and the concrete model of
//! finite-dimensional F2[C2]-modules.
//!
//! Vectors and matrix rows are bit-packed into `u64` words and all elimination
//! is word-level XOR. Matrices act on column vectors: an `m x n` matrix maps
//! `F2^n` to `F2^m`.
//!
//! Subspaces are always stored by a basis in reduced row echelon form, so two
//! subspaces are equal exactly when their stored bases are bit-identical.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

/// Errors raised by the linear algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    /// Two operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Two subspaces live in different ambient spaces.
    #[error("ambient mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    /// A candidate involution does not square to the identity.
    #[error("sigma is not an involution")]
    NotInvolution,
    /// A list of vectors expected to be independent is not.
    #[error("vectors are linearly dependent")]
    Dependent,
}

const W: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(W)
}

// ---------------------------------------------------------------------------
// BitVec
// ---------------------------------------------------------------------------

/// A dense vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    /// The zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    /// The standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Builds a vector from booleans.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters. Other characters are ignored.
    pub fn from_bit_str(s: &str) -> Self {
        let bits: Vec<bool> = s.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1').collect();
        Self::from_bools(&bits)
    }

    /// Number of coordinates.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True for the length-zero vector.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Reads coordinate `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "index {i} out of range {}", self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    /// Writes coordinate `i`.
    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % W);
        if b {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    /// Flips coordinate `i`.
    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / W] ^= 1u64 << (i % W);
    }

    /// In-place addition.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Sum of two vectors.
    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    /// Standard bilinear pairing.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// True if every coordinate is zero.
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of nonzero coordinates.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest nonzero coordinate.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * W + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of the nonzero coordinates in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * W + t)
                }
            })
        })
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut r = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            r.set(i, true);
        }
        for i in other.ones() {
            r.set(self.len + i, true);
        }
        r
    }

    /// The coordinates in `range` as a new vector.
    pub fn slice(&self, range: Range<usize>) -> BitVec {
        let mut r = BitVec::zeros(range.len());
        for i in self.ones() {
            if range.contains(&i) {
                r.set(i - range.start, true);
            }
        }
        r
    }

    /// Copies `src` into coordinates starting at `offset`.
    pub fn place(&mut self, offset: usize, src: &BitVec) {
        for i in src.ones() {
            self.set(offset + i, true);
        }
    }

    /// Kronecker product of two vectors (index `i * other.len + j`).
    pub fn kron(&self, other: &BitVec) -> BitVec {
        let mut r = BitVec::zeros(self.len * other.len);
        for i in self.ones() {
            for j in other.ones() {
                r.set(i * other.len + j, true);
            }
        }
        r
    }

    fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// BitMatrix
// ---------------------------------------------------------------------------

/// A dense matrix over F2, stored row-major with packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// The zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix entrywise.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors (all of length `cols`).
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[BitVec]) -> Self {
        Self::from_rows(rows, cols).transpose()
    }

    /// Parses rows written as `0`/`1` strings, e.g. `["11", "01"]`.
    pub fn from_str_rows(rows: &[&str]) -> Self {
        let vs: Vec<BitVec> = rows.iter().map(|r| BitVec::from_bit_str(r)).collect();
        let cols = vs.first().map_or(0, |v| v.len());
        Self::from_rows(cols, &vs)
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Shape as `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// Reads entry `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / W] >> (j % W)) & 1 == 1
    }

    /// Writes entry `(i, j)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let idx = i * self.stride + j / W;
        let m = 1u64 << (j % W);
        if b {
            self.data[idx] |= m;
        } else {
            self.data[idx] &= !m;
        }
    }

    /// Flips entry `(i, j)`.
    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i * self.stride + j / W] ^= 1u64 << (j % W);
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> BitVec {
        BitVec { words: self.row_words(i).to_vec(), len: self.cols }
    }

    /// All rows as vectors.
    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    /// All columns as vectors.
    pub fn col_vecs(&self) -> Vec<BitVec> {
        self.transpose().row_vecs()
    }

    /// Overwrites row `i`.
    pub fn set_row(&mut self, i: usize, v: &BitVec) {
        assert_eq!(v.len(), self.cols);
        self.row_words_mut(i).copy_from_slice(v.words());
    }

    /// Overwrites column `j`.
    pub fn set_col(&mut self, j: usize, v: &BitVec) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self.set(i, j, v.get(i));
        }
    }

    /// Adds row `src` into row `dst`.
    #[inline]
    fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..dst * s + s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..src * s + s])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= *y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// True if all entries vanish.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// True for a square identity matrix.
    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Transpose.
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row_ones(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let cols = self.cols;
        self.row_words(i).iter().enumerate().flat_map(move |(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * W + t)
                }
            })
            .filter(move |&j| j < cols)
        })
    }

    /// Matrix product `self * other`. Panics on a shape mismatch.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch {:?} * {:?}", self.shape(), other.shape());
        let mut r = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in self.row_ones(i) {
                let src = other.row_words(k);
                let dst = &mut r.data[i * r.stride..(i + 1) * r.stride];
                for (x, y) in dst.iter_mut().zip(src) {
                    *x ^= *y;
                }
            }
        }
        r
    }

    /// Matrix product with shape checking.
    pub fn try_mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch(format!("{:?} * {:?}", self.shape(), other.shape())));
        }
        Ok(self.mul(other))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let mut r = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = 0u64;
            for (a, b) in self.row_words(i).iter().zip(v.words()) {
                acc ^= a & b;
            }
            if acc.count_ones() & 1 == 1 {
                r.set(i, true);
            }
        }
        r
    }

    /// Entrywise sum.
    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape mismatch");
        let mut r = self.clone();
        for (a, b) in r.data.iter_mut().zip(&other.data) {
            *a ^= *b;
        }
        r
    }

    /// In-place entrywise sum.
    pub fn add_assign(&mut self, other: &BitMatrix) {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a ^= *b;
        }
    }

    /// Kronecker product; row `(i, k)` is indexed `i * other.rows + k`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut r = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in self.row_ones(i) {
                for k in 0..other.rows {
                    for l in other.row_ones(k) {
                        r.set(i * other.rows + k, j * other.cols + l, true);
                    }
                }
            }
        }
        r
    }

    /// Block diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &BitMatrix) -> BitMatrix {
        let mut r = BitMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        r.paste(0, 0, self);
        r.paste(self.rows, self.cols, other);
        r
    }

    /// Block diagonal matrix from a list.
    pub fn block_diag_all(blocks: &[BitMatrix]) -> BitMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut r = BitMatrix::zeros(rows, cols);
        let (mut i, mut j) = (0, 0);
        for b in blocks {
            r.paste(i, j, b);
            i += b.rows;
            j += b.cols;
        }
        r
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut r = BitMatrix::zeros(self.rows, self.cols + other.cols);
        r.paste(0, 0, self);
        r.paste(0, self.cols, other);
        r
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut r = BitMatrix::zeros(self.rows + other.rows, self.cols);
        r.paste(0, 0, self);
        r.paste(self.rows, 0, other);
        r
    }

    /// Writes `block` with its top-left corner at `(i0, j0)`, adding into existing entries.
    pub fn paste(&mut self, i0: usize, j0: usize, block: &BitMatrix) {
        assert!(i0 + block.rows <= self.rows && j0 + block.cols <= self.cols, "paste out of range");
        for i in 0..block.rows {
            for j in block.row_ones(i) {
                self.flip(i0 + i, j0 + j);
            }
        }
    }

    /// The sub-block with the given row and column ranges.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> BitMatrix {
        let mut r = BitMatrix::zeros(rows.len(), cols.len());
        for (ii, i) in rows.clone().enumerate() {
            for j in self.row_ones(i) {
                if cols.contains(&j) {
                    r.set(ii, j - cols.start, true);
                }
            }
        }
        r
    }

    /// Rows picked by index.
    pub fn select_rows(&self, idx: &[usize]) -> BitMatrix {
        let mut r = BitMatrix::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            let src = self.row_words(i).to_vec();
            r.row_words_mut(ii).copy_from_slice(&src);
        }
        r
    }

    /// Columns picked by index.
    pub fn select_cols(&self, idx: &[usize]) -> BitMatrix {
        BitMatrix::from_fn(self.rows, idx.len(), |i, jj| self.get(i, idx[jj]))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else { continue };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.rows_truncate(r);
        (m, pivots)
    }

    fn rows_truncate(&mut self, r: usize) {
        self.rows = r;
        self.data.truncate(r * self.stride);
    }

    /// Rank over F2.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else { continue };
            m.swap_rows(r, p);
            for i in r + 1..m.rows {
                if m.get(i, c) {
                    m.xor_rows(i, r);
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of the right null space `{x : self * x = 0}`, as the rows of the result.
    pub fn kernel(&self) -> BitMatrix {
        let (red, pivots) = self.rref();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut out = BitMatrix::zeros(free.len(), n);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if red.get(r, f) {
                    out.set(k, p, true);
                }
            }
        }
        out
    }

    /// Some solution of `self * x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>, Gf2Error> {
        if b.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch(format!("{:?} x = b with |b| = {}", self.shape(), b.len())));
        }
        let aug = self.hstack(&BitMatrix::from_cols(self.rows, std::slice::from_ref(b)));
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            if red.get(r, self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Solves `self * X = B` column by column; `None` if any column is inconsistent.
    pub fn solve_matrix(&self, b: &BitMatrix) -> Option<BitMatrix> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hstack(b);
        let (red, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = BitMatrix::zeros(self.cols, b.cols);
        for (r, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                if red.get(r, self.cols + j) {
                    x.set(p, j, true);
                }
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve_matrix(&BitMatrix::identity(self.rows))?;
        if self.rank() == self.rows {
            Some(x)
        } else {
            None
        }
    }

    /// True if square and invertible.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

/// Row rank of a matrix.
pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Some `x` with `a * x = b`, or `None` if inconsistent.
pub fn solve(a: &BitMatrix, b: &BitVec) -> Result<Option<BitVec>, Gf2Error> {
    a.solve(b)
}

// ---------------------------------------------------------------------------
// Coordinates
// ---------------------------------------------------------------------------

/// Expresses vectors in a fixed independent family.
///
/// Built once by incremental elimination; each lookup costs one pass over the
/// reduced rows.
#[derive(Clone, Debug)]
pub struct Coordinates {
    ambient: usize,
    size: usize,
    pivots: Vec<usize>,
    reduced: Vec<BitVec>,
    combos: Vec<BitVec>,
}

impl Coordinates {
    /// Prepares coordinate lookups for the given independent vectors.
    pub fn new(ambient: usize, family: &[BitVec]) -> Result<Self, Gf2Error> {
        let size = family.len();
        let mut c = Self { ambient, size, pivots: Vec::new(), reduced: Vec::new(), combos: Vec::new() };
        for (k, v) in family.iter().enumerate() {
            if v.len() != ambient {
                return Err(Gf2Error::DimensionMismatch(format!("vector of length {} in ambient {ambient}", v.len())));
            }
            let mut x = v.clone();
            let mut combo = BitVec::unit(size, k);
            c.reduce(&mut x, &mut combo);
            let Some(p) = x.first_one() else { return Err(Gf2Error::Dependent) };
            for (r, cb) in c.reduced.iter_mut().zip(c.combos.iter_mut()) {
                if r.get(p) {
                    r.xor_assign(&x);
                    cb.xor_assign(&combo);
                }
            }
            c.pivots.push(p);
            c.reduced.push(x);
            c.combos.push(combo);
        }
        Ok(c)
    }

    fn reduce(&self, x: &mut BitVec, combo: &mut BitVec) {
        for ((p, r), cb) in self.pivots.iter().zip(&self.reduced).zip(&self.combos) {
            if x.get(*p) {
                x.xor_assign(r);
                combo.xor_assign(cb);
            }
        }
    }

    /// Number of vectors in the family.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Length of the vectors.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Coefficients of `x` in the family, or `None` if `x` is outside its span.
    pub fn coords(&self, x: &BitVec) -> Option<BitVec> {
        let mut y = x.clone();
        let mut combo = BitVec::zeros(self.size);
        self.reduce(&mut y, &mut combo);
        if y.is_zero() {
            Some(combo)
        } else {
            None
        }
    }

    /// Like [`Coordinates::coords`] but panics outside the span.
    pub fn coords_in_span(&self, x: &BitVec) -> BitVec {
        self.coords(x).expect("vector outside the span of the coordinate family")
    }
}

// ---------------------------------------------------------------------------
// Subspace
// ---------------------------------------------------------------------------

/// A linear subspace of `F2^n`, stored by its reduced echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: BitMatrix,
}

impl Subspace {
    /// The span of the given vectors.
    pub fn span(ambient: usize, vectors: &[BitVec]) -> Self {
        let m = BitMatrix::from_rows(ambient, vectors);
        Self::row_space(&m)
    }

    /// The span of the rows of `m`.
    pub fn row_space(m: &BitMatrix) -> Self {
        let (basis, _) = m.rref();
        Self { ambient: m.cols(), basis }
    }

    /// The span of the columns of `m`.
    pub fn column_space(m: &BitMatrix) -> Self {
        Self::row_space(&m.transpose())
    }

    /// The null space of `m`.
    pub fn kernel_of(m: &BitMatrix) -> Self {
        Self::row_space(&m.kernel())
    }

    /// The zero subspace.
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: BitMatrix::zeros(0, ambient) }
    }

    /// The whole space.
    pub fn whole(ambient: usize) -> Self {
        Self { ambient, basis: BitMatrix::identity(ambient) }
    }

    /// Dimension of the ambient space.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// True for the zero subspace.
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// True for the whole space.
    pub fn is_whole(&self) -> bool {
        self.dim() == self.ambient
    }

    /// The canonical basis matrix (rows, reduced echelon form).
    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    /// The canonical basis as vectors.
    pub fn vectors(&self) -> Vec<BitVec> {
        self.basis.row_vecs()
    }

    /// The canonical basis as the columns of an `ambient x dim` matrix.
    pub fn basis_columns(&self) -> BitMatrix {
        self.basis.transpose()
    }

    fn check(&self, other: &Subspace) -> Result<(), Gf2Error> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Gf2Error::AmbientMismatch(self.ambient, other.ambient))
        }
    }

    /// Membership test.
    pub fn contains(&self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.ambient, "membership ambient mismatch");
        let mut x = v.clone();
        for r in 0..self.basis.rows() {
            let row = self.basis.row(r);
            let p = row.first_one().expect("echelon rows are nonzero");
            if x.get(p) {
                x.xor_assign(&row);
            }
        }
        x.is_zero()
    }

    /// Inclusion test.
    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.vectors().iter().all(|v| other.contains(v))
    }

    /// Sum of subspaces.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.check(other)?;
        Ok(Self::row_space(&self.basis.vstack(&other.basis)))
    }

    /// The annihilator `{y : y . s = 0 for all s}`.
    pub fn annihilator(&self) -> Subspace {
        Self::kernel_of(&self.basis)
    }

    /// Intersection of subspaces.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.check(other)?;
        let ann = self.annihilator().sum(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    /// A complement spanned by the non-pivot coordinate vectors.
    pub fn complement(&self) -> Subspace {
        let mut is_pivot = vec![false; self.ambient];
        for r in 0..self.basis.rows() {
            is_pivot[self.basis.row(r).first_one().expect("nonzero echelon row")] = true;
        }
        let vs: Vec<BitVec> = (0..self.ambient).filter(|&i| !is_pivot[i]).map(|i| BitVec::unit(self.ambient, i)).collect();
        Self::span(self.ambient, &vs)
    }

    /// Image under a linear map.
    pub fn image(&self, m: &BitMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient, "image ambient mismatch");
        let imgs: Vec<BitVec> = self.vectors().iter().map(|v| m.mul_vec(v)).collect();
        Self::span(m.rows(), &imgs)
    }

    /// Preimage `{x : m x in self}`.
    pub fn preimage(&self, m: &BitMatrix) -> Subspace {
        assert_eq!(m.rows(), self.ambient, "preimage ambient mismatch");
        let ann = self.annihilator();
        Self::kernel_of(&ann.basis.mul(m))
    }

    /// Tensor product of subspaces inside the Kronecker ambient.
    pub fn kron(&self, other: &Subspace) -> Subspace {
        let mut vs = Vec::with_capacity(self.dim() * other.dim());
        for a in self.vectors() {
            for b in other.vectors() {
                vs.push(a.kron(&b));
            }
        }
        Self::span(self.ambient * other.ambient, &vs)
    }

    /// `self (+) other` inside the direct sum of the ambients.
    pub fn direct_sum(&self, other: &Subspace) -> Subspace {
        let n = self.ambient + other.ambient;
        let mut vs = Vec::new();
        for a in self.vectors() {
            vs.push(a.concat(&BitVec::zeros(other.ambient)));
        }
        for b in other.vectors() {
            vs.push(BitVec::zeros(self.ambient).concat(&b));
        }
        Self::span(n, &vs)
    }

    /// True if `m` maps the subspace into itself.
    pub fn is_stable_under(&self, m: &BitMatrix) -> bool {
        self.image(m).is_subspace_of(self)
    }

    /// A deterministic basis of a complement of `sub` inside `self`.
    ///
    /// Walks the canonical basis of `self` and keeps every vector that is
    /// independent of `sub` and of the vectors kept so far, so for a pure layer
    /// (`self` whole, `sub` zero) this returns the standard basis in order.
    pub fn complement_in(&self, sub: &Subspace) -> Vec<BitVec> {
        assert!(sub.is_subspace_of(self), "complement_in needs a subspace");
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for v in self.vectors() {
            if !acc.contains(&v) {
                acc = acc.sum(&Subspace::span(self.ambient, std::slice::from_ref(&v))).expect("same ambient");
                out.push(v);
            }
        }
        out
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(ambient {}, basis {:?})", self.ambient, self.basis)
    }
}

// ---------------------------------------------------------------------------
// C2Module
// ---------------------------------------------------------------------------

/// A finite-dimensional F2[C2]-module: a vector space with an involution sigma.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct C2Module {
    sigma: BitMatrix,
}

impl C2Module {
    /// Wraps an involution, checking `sigma^2 = 1`.
    pub fn new(sigma: BitMatrix) -> Result<Self, Gf2Error> {
        if sigma.rows() != sigma.cols() {
            return Err(Gf2Error::DimensionMismatch(format!("sigma of shape {:?}", sigma.shape())));
        }
        if !sigma.mul(&sigma).is_identity() {
            return Err(Gf2Error::NotInvolution);
        }
        Ok(Self { sigma })
    }

    /// The trivial module `k^n`.
    pub fn trivial(n: usize) -> Self {
        Self { sigma: BitMatrix::identity(n) }
    }

    /// The regular module `kC2` with basis `(1, sigma)`.
    pub fn regular() -> Self {
        Self { sigma: BitMatrix::from_str_rows(&["01", "10"]) }
    }

    /// The zero module.
    pub fn zero() -> Self {
        Self::trivial(0)
    }

    /// Dimension over F2.
    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    /// The involution.
    pub fn sigma(&self) -> &BitMatrix {
        &self.sigma
    }

    /// The norm element `1 + sigma`.
    pub fn norm(&self) -> BitMatrix {
        self.sigma.add(&BitMatrix::identity(self.dim()))
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &C2Module) -> C2Module {
        Self { sigma: self.sigma.block_diag(&other.sigma) }
    }

    /// Tensor product with the diagonal action.
    pub fn tensor(&self, other: &C2Module) -> C2Module {
        Self { sigma: self.sigma.kron(&other.sigma) }
    }

    /// Contragredient module (sigma acts by its transpose).
    pub fn dual(&self) -> C2Module {
        Self { sigma: self.sigma.transpose() }
    }

    /// True if `f: self -> target` commutes with the involutions.
    pub fn is_equivariant(&self, f: &BitMatrix, target: &C2Module) -> bool {
        f.shape() == (target.dim(), self.dim()) && target.sigma.mul(f) == f.mul(&self.sigma)
    }

    /// Fixed vectors `ker(1 + sigma)`.
    pub fn fixed_points(&self) -> Subspace {
        Subspace::kernel_of(&self.norm())
    }

    /// Norm image `im(1 + sigma)`.
    pub fn norm_image(&self) -> Subspace {
        Subspace::column_space(&self.norm())
    }

    /// The restriction of sigma to a stable subspace, in the coordinates of
    /// the given basis vectors.
    pub fn restrict(&self, basis: &[BitVec]) -> C2Module {
        let coords = Coordinates::new(self.dim(), basis).expect("restriction basis must be independent");
        let cols: Vec<BitVec> = basis.iter().map(|b| coords.coords_in_span(&self.sigma.mul_vec(b))).collect();
        Self { sigma: BitMatrix::from_cols(basis.len(), &cols) }
    }

    /// Multiplicities `(a, b)` with `M = k^a (+) kC2^b`.
    pub fn split(&self) -> (usize, usize) {
        let b = self.norm().rank();
        (self.dim() - 2 * b, b)
    }

    /// A basis adapted to `k^a (+) kC2^b`, returned as the columns of an
    /// invertible matrix: first the `a` trivial lines, then the pairs
    /// `(x_i, sigma x_i)`.
    pub fn adapted_basis(&self) -> (BitMatrix, usize, usize) {
        let n = self.dim();
        let norm = self.norm();
        let ker = Subspace::kernel_of(&norm);
        // Generators x_i: a complement of ker(N), so N x_i is a basis of im(N).
        let gens = Subspace::whole(n).complement_in(&ker);
        let b = gens.len();
        let img = Subspace::span(n, &gens.iter().map(|x| norm.mul_vec(x)).collect::<Vec<_>>());
        let triv = ker.complement_in(&img);
        let a = triv.len();
        let mut cols = triv;
        for x in &gens {
            cols.push(x.clone());
            cols.push(self.sigma.mul_vec(x));
        }
        (BitMatrix::from_cols(n, &cols), a, b)
    }
}

/// Multiplicities `(a, b)` of `k` and `kC2` in a module, with `b = rank(1 + sigma)`.
pub fn module_split(m: &C2Module) -> (usize, usize) {
    m.split()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small_cases() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::from_str_rows(&["11", "11"]).rank(), 1);
        assert_eq!(BitMatrix::zeros(3, 4).rank(), 0);
    }

    #[test]
    fn solve_norm_of_regular_module() {
        let n = C2Module::regular().norm();
        assert_eq!(n, BitMatrix::from_str_rows(&["11", "11"]));
        let x = n.solve(&BitVec::from_bit_str("11")).unwrap().unwrap();
        assert_eq!(n.mul_vec(&x), BitVec::from_bit_str("11"));
        assert_eq!(x, BitVec::from_bit_str("10"));
        assert_eq!(n.solve(&BitVec::from_bit_str("10")).unwrap(), None);
        let b = BitVec::from_bit_str("101");
        assert_eq!(BitMatrix::identity(3).solve(&b).unwrap(), Some(b));
    }

    #[test]
    fn solve_rejects_bad_shape() {
        assert!(BitMatrix::identity(2).solve(&BitVec::zeros(3)).is_err());
    }

    #[test]
    fn subspace_basics() {
        let s = Subspace::span(3, &[BitVec::from_bit_str("110")]);
        assert_eq!(s.intersection(&Subspace::whole(3)).unwrap(), s);
        assert_eq!(s.sum(&s.complement()).unwrap(), Subspace::whole(3));
        let k = Subspace::kernel_of(&C2Module::regular().norm());
        assert_eq!(k, Subspace::span(2, &[BitVec::from_bit_str("11")]));
        assert!(s.sum(&Subspace::zero(2)).is_err());
    }

    #[test]
    fn module_split_examples() {
        assert_eq!(module_split(&C2Module::regular()), (0, 1));
        assert_eq!(module_split(&C2Module::trivial(1)), (1, 0));
        let m = C2Module::trivial(2).direct_sum(&C2Module::regular());
        assert_eq!(module_split(&m), (2, 1));
        assert_eq!(C2Module::new(BitMatrix::from_str_rows(&["11", "00"])), Err(Gf2Error::NotInvolution));
    }

    #[test]
    fn adapted_basis_conjugates_to_standard_form() {
        let m = C2Module::regular().tensor(&C2Module::regular()).direct_sum(&C2Module::trivial(1));
        let (p, a, b) = m.adapted_basis();
        assert_eq!((a, b), (1, 2));
        let pinv = p.inverse().unwrap();
        let std = C2Module::trivial(1).direct_sum(&C2Module::regular()).direct_sum(&C2Module::regular());
        assert_eq!(pinv.mul(m.sigma()).mul(&p), *std.sigma());
    }

    #[test]
    fn coordinates_roundtrip() {
        let fam = vec![BitVec::from_bit_str("1100"), BitVec::from_bit_str("0110"), BitVec::from_bit_str("0011")];
        let c = Coordinates::new(4, &fam).unwrap();
        let x = fam[0].xor(&fam[2]);
        assert_eq!(c.coords(&x), Some(BitVec::from_bit_str("101")));
        assert_eq!(c.coords(&BitVec::from_bit_str("1000")), None);
        assert!(Coordinates::new(4, &[fam[0].clone(), fam[0].clone()]).is_err());
    }
}
