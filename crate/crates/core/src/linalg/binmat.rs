//! Bit-packed matrices and vectors over GF(2). Rows are stored as runs of
//! 64-bit words; bits beyond the column count stay zero so whole-word
//! operations (XOR, AND + popcount) need no masking.

use rand::Rng;

use super::LinalgError;
use crate::bits;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; bits::words_for(len)],
        }
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(bits::words_for(len), 0);
        bits::mask_tail(&mut words, len);
        BitVec { len, words }
    }

    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        Self::from_words(len, (0..bits::words_for(len)).map(|_| rng.gen()).collect())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        bits::get_bit(&self.words, i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        bits::set_bit(&mut self.words, i, value);
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        bits::flip_bit(&mut self.words, i);
    }

    pub fn weight(&self) -> usize {
        bits::weight(&self.words)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn xor_in(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    w: usize,
    data: Vec<u64>,
}

/// Result of full Gauss-Jordan reduction.
pub struct Rref {
    pub matrix: BinMatrix,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows, increasing.
    pub pivots: Vec<usize>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let w = bits::words_for(cols).max(1);
        BinMatrix {
            rows,
            cols,
            w,
            data: vec![0; rows * w],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVec]) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.row_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            let row = BitVec::random(cols, rng);
            m.row_mut(i).copy_from_slice(row.words());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        bits::get_bit(self.row(r), c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = self.w;
        bits::set_bit(&mut self.data[r * w..(r + 1) * w], c, value);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.w..(r + 1) * self.w]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.w..(r + 1) * self.w]
    }

    pub fn row_bitvec(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row(r).to_vec())
    }

    pub fn set_row(&mut self, r: usize, v: &BitVec) {
        assert_eq!(v.len(), self.cols);
        self.row_mut(r).copy_from_slice(v.words());
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.w;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * w);
        head[lo * w..(lo + 1) * w].swap_with_slice(&mut tail[..w]);
    }

    /// `row[target] ^= row[source]`.
    pub fn xor_rows(&mut self, target: usize, source: usize) {
        assert_ne!(target, source);
        let w = self.w;
        let (lo, hi) = (target.min(source), target.max(source));
        let (head, tail) = self.data.split_at_mut(hi * w);
        let lo_row = &mut head[lo * w..(lo + 1) * w];
        let hi_row = &mut tail[..w];
        if target < source {
            for (t, s) in lo_row.iter_mut().zip(hi_row.iter()) {
                *t ^= s;
            }
        } else {
            for (t, s) in hi_row.iter_mut().zip(lo_row.iter()) {
                *t ^= s;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|w| *w == 0)
    }

    /// Reduced row echelon form; pivots chosen left to right, first
    /// available row (deterministic).
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..m.cols {
            if next_row == m.rows {
                break;
            }
            let Some(pivot) = (next_row..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(next_row, pivot);
            for r in 0..m.rows {
                if r != next_row && m.get(r, col) {
                    m.xor_rows(r, next_row);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        Rref {
            rank: pivots.len(),
            matrix: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// A basis of the right kernel `{ v : M v^T = 0 }`.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let reduced = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &reduced.pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - reduced.rank);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (row, &col) in reduced.pivots.iter().enumerate() {
                if reduced.matrix.get(row, free) {
                    v.set(col, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    pub fn mul(&self, rhs: &BinMatrix) -> Result<BinMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                operation: "matrix product",
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        let mut out = BinMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let w = out.w;
                    let (src, dst_start) = (rhs.row(k), i * w);
                    for (j, word) in src.iter().enumerate() {
                        out.data[dst_start + j] ^= word;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `M v^T`, the syndrome map.
    pub fn mul_bitvec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len());
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if bits::parity_of_and(self.row(i), v.words()) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn transpose(&self) -> BinMatrix {
        let mut out = BinMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<BinMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch {
                operation: "inverse",
                left: format!("{}x{}", self.rows, self.cols),
                right: "square".into(),
            });
        }
        let n = self.rows;
        let mut aug = BinMatrix::zeros(n, 2 * n);
        for r in 0..n {
            bits::xor_bit_range(aug.row_mut(r), 0, self.row(r), 0, n.max(1));
            bits::set_bit(aug.row_mut(r), n + r, true);
        }
        let reduced = aug.rref();
        if reduced.rank < n || reduced.pivots.iter().take(n).copied().ne(0..n) {
            return Err(LinalgError::Singular);
        }
        let mut inv = BinMatrix::zeros(n, n);
        for r in 0..n {
            bits::xor_bit_range(inv.row_mut(r), 0, reduced.matrix.row(r), n, n);
        }
        Ok(inv)
    }

    /// New matrix whose column `j` is column `map[j]` of `self`.
    pub fn select_columns(&self, map: &[usize]) -> BinMatrix {
        let mut out = BinMatrix::zeros(self.rows, map.len());
        for r in 0..self.rows {
            for (j, &src) in map.iter().enumerate() {
                if self.get(r, src) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    pub fn vstack(&self, below: &BinMatrix) -> BinMatrix {
        assert_eq!(self.cols, below.cols);
        let mut out = BinMatrix::zeros(self.rows + below.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&below.data);
        out
    }
}
