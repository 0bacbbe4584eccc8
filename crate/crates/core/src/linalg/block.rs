//! Matrices over `R_p`, i.e. block matrices whose `p x p` blocks are all
//! circulant. `expand` realizes such a matrix as a plain binary matrix
//! (row `r` of a block is `x^r * m`), and `collapse` inverts that map,
//! checking circulant structure block by block.

use super::{BinMatrix, LinalgError};
use crate::bits;
use crate::poly::RingPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCirculantMatrix {
    p: usize,
    block_rows: usize,
    block_cols: usize,
    blocks: Vec<RingPoly>,
}

impl BlockCirculantMatrix {
    pub fn zeros(p: usize, block_rows: usize, block_cols: usize) -> Self {
        BlockCirculantMatrix {
            p,
            block_rows,
            block_cols,
            blocks: vec![RingPoly::zero(p); block_rows * block_cols],
        }
    }

    pub fn identity(p: usize, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            *m.block_mut(i, i) = RingPoly::one(p);
        }
        m
    }

    pub fn from_blocks(p: usize, block_rows: usize, block_cols: usize, blocks: Vec<RingPoly>) -> Self {
        assert_eq!(blocks.len(), block_rows * block_cols);
        assert!(blocks.iter().all(|b| b.p() == p), "mixed moduli in block matrix");
        BlockCirculantMatrix {
            p,
            block_rows,
            block_cols,
            blocks,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn block(&self, i: usize, j: usize) -> &RingPoly {
        &self.blocks[i * self.block_cols + j]
    }

    pub fn block_mut(&mut self, i: usize, j: usize) -> &mut RingPoly {
        &mut self.blocks[i * self.block_cols + j]
    }

    pub fn row_blocks(&self, i: usize) -> &[RingPoly] {
        &self.blocks[i * self.block_cols..(i + 1) * self.block_cols]
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(rhs, "block sum")?;
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(Self::from_blocks(self.p, self.block_rows, self.block_cols, blocks))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.block_cols != rhs.block_rows || self.p != rhs.p {
            return Err(LinalgError::DimensionMismatch {
                operation: "block product",
                left: format!("{}x{} over x^{}-1", self.block_rows, self.block_cols, self.p),
                right: format!("{}x{} over x^{}-1", rhs.block_rows, rhs.block_cols, rhs.p),
            });
        }
        let mut out = Self::zeros(self.p, self.block_rows, rhs.block_cols);
        for i in 0..self.block_rows {
            for k in 0..self.block_cols {
                let a = self.block(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.block_cols {
                    let term = a.mul(rhs.block(k, j))?;
                    let acc = out.block_mut(i, j);
                    *acc = acc.add(&term);
                }
            }
        }
        Ok(out)
    }

    /// Matrix transpose: blocks transpose individually (reciprocal
    /// polynomial) and swap across the diagonal.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.p, self.block_cols, self.block_rows);
        for i in 0..self.block_rows {
            for j in 0..self.block_cols {
                *out.block_mut(j, i) = self.block(i, j).reciprocal();
            }
        }
        out
    }

    /// The underlying binary matrix, `block_rows*p` by `block_cols*p`.
    pub fn expand(&self) -> BinMatrix {
        let p = self.p;
        let mut out = BinMatrix::zeros(self.block_rows * p, self.block_cols * p);
        for bi in 0..self.block_rows {
            for bj in 0..self.block_cols {
                let mut current = self.block(bi, bj).clone();
                if current.is_zero() {
                    continue;
                }
                for r in 0..p {
                    bits::xor_bit_range(out.row_mut(bi * p + r), bj * p, current.words(), 0, p);
                    if r + 1 < p {
                        current = current.mul_xpow(1);
                    }
                }
            }
        }
        out
    }

    /// Reads a binary matrix back as a block-circulant one, failing on the
    /// first block that is not circulant.
    pub fn collapse(bin: &BinMatrix, p: usize) -> Result<Self, LinalgError> {
        if p == 0 || bin.rows() % p != 0 || bin.cols() % p != 0 {
            return Err(LinalgError::DimensionMismatch {
                operation: "collapse",
                left: format!("{}x{}", bin.rows(), bin.cols()),
                right: format!("multiple of block size {p}"),
            });
        }
        let block_rows = bin.rows() / p;
        let block_cols = bin.cols() / p;
        let mut out = Self::zeros(p, block_rows, block_cols);
        for bi in 0..block_rows {
            for bj in 0..block_cols {
                let read_row = |r: usize| {
                    let mut words = vec![0u64; bits::words_for(p)];
                    bits::xor_bit_range(&mut words, 0, bin.row(bi * p + r), bj * p, p);
                    RingPoly::from_words(p, words)
                };
                let first = read_row(0);
                let mut expected = first.clone();
                for r in 1..p {
                    expected = expected.mul_xpow(1);
                    if read_row(r) != expected {
                        return Err(LinalgError::NotBlockCirculant {
                            block_row: bi,
                            block_col: bj,
                        });
                    }
                }
                *out.block_mut(bi, bj) = first;
            }
        }
        Ok(out)
    }

    /// Determinant over `R_p` by cofactor expansion (characteristic 2, so
    /// no signs). Kept to small block counts, which is all the schemes use.
    pub fn poly_det(&self) -> Result<RingPoly, LinalgError> {
        self.check_square("determinant")?;
        if self.block_rows > 4 {
            return Err(LinalgError::UnsupportedBlockCount {
                limit: 4,
                got: self.block_rows,
            });
        }
        Ok(det_rec(&self.blocks, self.block_rows, self.p))
    }

    /// Inverse over `R_p`. Small matrices go through adjugate over the
    /// ring (fast even for large `p`); anything bigger falls back to the
    /// binary expansion route.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        self.check_square("inverse")?;
        if self.block_rows > 4 {
            return self.inverse_via_expansion();
        }
        let n = self.block_rows;
        let det = self.poly_det()?;
        let det_inv = det.inv().map_err(|_| LinalgError::Singular)?;
        let mut out = Self::zeros(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                // adj(M)_{ij} = det of the minor at (j, i); char 2 drops signs.
                let minor = self.minor(j, i);
                *out.block_mut(i, j) = det_rec(&minor, n - 1, self.p).mul(&det_inv)?;
            }
        }
        debug_assert!(self
            .mul(&out)
            .map(|prod| prod == Self::identity(self.p, n))
            .unwrap_or(false));
        Ok(out)
    }

    /// Inverse via expand -> binary inverse -> collapse. The collapse step
    /// doubles as a structural check on the result.
    pub fn inverse_via_expansion(&self) -> Result<Self, LinalgError> {
        self.check_square("inverse")?;
        let inv = self.expand().inverse()?;
        Self::collapse(&inv, self.p)
    }

    /// Whether the expansion is invertible, i.e. gcd(det, x^p - 1) = 1.
    pub fn is_invertible(&self) -> bool {
        if self.block_rows != self.block_cols {
            return false;
        }
        if self.block_rows <= 4 {
            self.poly_det().map(|d| d.inv().is_ok()).unwrap_or(false)
        } else {
            self.expand().inverse().is_ok()
        }
    }

    /// The sub-matrix of whole blocks `rows x cols` anchored at (0, 0).
    pub fn leading_blocks(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.block_rows && cols <= self.block_cols);
        let mut out = Self::zeros(self.p, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *out.block_mut(i, j) = self.block(i, j).clone();
            }
        }
        out
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Vec<RingPoly> {
        let n = self.block_rows;
        let mut out = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                out.push(self.block(i, j).clone());
            }
        }
        out
    }

    fn check_square(&self, operation: &'static str) -> Result<(), LinalgError> {
        if self.block_rows != self.block_cols {
            return Err(LinalgError::DimensionMismatch {
                operation,
                left: format!("{}x{}", self.block_rows, self.block_cols),
                right: "square".into(),
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, rhs: &Self, operation: &'static str) -> Result<(), LinalgError> {
        if self.block_rows != rhs.block_rows || self.block_cols != rhs.block_cols || self.p != rhs.p {
            return Err(LinalgError::DimensionMismatch {
                operation,
                left: format!("{}x{} over x^{}-1", self.block_rows, self.block_cols, self.p),
                right: format!("{}x{} over x^{}-1", rhs.block_rows, rhs.block_cols, rhs.p),
            });
        }
        Ok(())
    }
}

/// First-row cofactor expansion of an `n x n` block list (row-major).
fn det_rec(blocks: &[RingPoly], n: usize, p: usize) -> RingPoly {
    if n == 0 {
        return RingPoly::one(p);
    }
    if n == 1 {
        return blocks[0].clone();
    }
    let mut acc = RingPoly::zero(p);
    for j in 0..n {
        if blocks[j].is_zero() {
            continue;
        }
        let minor: Vec<RingPoly> = (1..n)
            .flat_map(|i| (0..n).filter(|&c| c != j).map(move |c| blocks[i * n + c].clone()))
            .collect();
        let term = blocks[j].mul(&det_rec(&minor, n - 1, p)).unwrap();
        acc = acc.add(&term);
    }
    acc
}
