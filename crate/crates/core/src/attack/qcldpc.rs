//! Key recovery against the LDPC-based scheme.
//!
//! Inverting the first `n0 - 1` block columns of the public generator
//! exposes `diag(Q) x S`, whose rows factor as `g_{i,j} = q_i s_{i,j}`
//! with both factors sparse. Once those rows are factored, multiplying
//! the public matrix back into systematic form exposes the last block
//! column up to rotation, and the sparse parity row falls out of it as
//! a low-weight codeword of a small derived code.

use rand::Rng;

use crate::isd::{for_each_combination, stern_search, SternParams};
use crate::linalg::{BlockCirculantMatrix, LinalgError};
use crate::poly::{PolyError, RingPoly, Support};
use crate::qcldpc::{
    assemble_public, s_weights, split_blocks, QcLdpcError, QcLdpcParams, QcLdpcPublicKey,
    QcLdpcSecretKey,
};
use crate::rng;

/// Fresh low-weight searches to run before giving up on a target.
const RETRY_BUDGET: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum LdpcAttackError {
    #[error("the attack needs at least three circulant blocks, got n0 = {n0}")]
    TooFewBlocks { n0: usize },
    #[error("no weight-{weight} factor found by subset enumeration")]
    EnumerationExhausted { weight: usize },
    #[error("low-weight search gave up after {attempts} fresh starts")]
    SearchExhausted { attempts: usize },
    #[error("no invertible block available in {what}")]
    NoInvertibleBlock { what: &'static str },
    #[error("factored rows do not bring the public matrix to systematic form")]
    InconsistentRows,
    #[error("factoring row {row} of the inverted prefix failed: {source}")]
    RowFailed {
        row: usize,
        #[source]
        source: Box<LdpcAttackError>,
    },
    #[error(transparent)]
    Scheme(#[from] QcLdpcError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How to factor each row of the inverted public prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorStrategy {
    /// Enumerate candidate supports for the diagonal block directly.
    Enumerate,
    /// Recover scrambler rows as low-weight words of a derived code.
    LowWeight,
}

/// One factored row `g_j = q * s_j` of the inverted public prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowFactorization {
    pub q: RingPoly,
    pub s_row: Vec<RingPoly>,
}

impl RowFactorization {
    /// True iff `q * s_j` reproduces every supplied block.
    pub fn verify(&self, g_row: &[RingPoly]) -> bool {
        self.s_row.len() == g_row.len()
            && self
                .s_row
                .iter()
                .zip(g_row)
                .all(|(s, g)| matches!(self.q.mul(s), Ok(prod) if prod == *g))
    }

    /// The representative with the diagonal factor rotated to canonical
    /// form. Factorizations are unique only up to opposite rotations of
    /// the two factors, so canonical representatives are comparable
    /// across independent recoveries.
    pub fn canonicalized(&self) -> RowFactorization {
        let (canon, e) = self.q.canonical_rotation();
        RowFactorization {
            q: canon,
            s_row: self.s_row.iter().map(|s| s.mul_xpow(e)).collect(),
        }
    }
}

/// Invert the first `n0 - 1` block columns of the public generator.
/// Row `i` of the result is `(q_i s_{i,1} .. q_i s_{i,n0-1})`.
pub fn invert_public_prefix(
    public: &QcLdpcPublicKey,
) -> Result<BlockCirculantMatrix, LdpcAttackError> {
    let d = public.params.n0 - 1;
    Ok(public.matrix.leading_blocks(d, d).inverse()?)
}

/// Factor one prefix row by enumerating `q_weight`-subsets of a block's
/// support as candidate copies of the diagonal factor. This works when
/// some block keeps an uncancelled copy of that support, the common
/// case quantified by the bounds in [`crate::prob`].
pub fn enumerate_factor(
    g_row: &[RingPoly],
    q_weight: usize,
    expected: &[usize],
) -> Result<RowFactorization, LdpcAttackError> {
    let mut columns: Vec<usize> = (0..g_row.len()).collect();
    columns.sort_by_key(|&j| g_row[j].weight());
    for &src in &columns {
        let sup = g_row[src].support();
        let exps = sup.exponents();
        if exps.len() < q_weight {
            continue;
        }
        let mut found: Option<RowFactorization> = None;
        for_each_combination(exps.len(), q_weight, |pick| {
            if found.is_some() {
                return;
            }
            let support: Vec<usize> = pick.iter().map(|&i| exps[i]).collect();
            let cand = RingPoly::from_support(g_row[src].p(), &Support::new(support).unwrap())
                .expect("support exponents are in range");
            let Ok(inv) = cand.inv() else { return };
            let s_row: Vec<RingPoly> = g_row
                .iter()
                .map(|g| inv.mul(g).expect("matching moduli"))
                .collect();
            if s_row.iter().zip(expected).all(|(s, &w)| s.weight() == w) {
                found = Some(RowFactorization { q: cand, s_row });
            }
        });
        if let Some(fac) = found {
            return Ok(fac);
        }
    }
    Err(LdpcAttackError::EnumerationExhausted { weight: q_weight })
}

/// Factor one prefix row without touching the diagonal factor at all:
/// dividing the row by one invertible block cancels `q_i`, and the row
/// span of `(I | g_{j0}^{-1} g_j ..)` then contains every rotation of
/// the scrambler row `(s_{j0} | s_j ..)` as a word of known low weight.
pub fn low_weight_factor(
    g_row: &[RingPoly],
    q_weight: usize,
    expected: &[usize],
    stern: &SternParams,
    retries: usize,
    rng: &mut impl Rng,
) -> Result<RowFactorization, LdpcAttackError> {
    let p = g_row[0].p();
    let j0 = g_row
        .iter()
        .position(|g| g.inv().is_ok())
        .ok_or(LdpcAttackError::NoInvertibleBlock {
            what: "a row of the inverted prefix",
        })?;
    let j0_inv = g_row[j0].inv()?;
    let mut cols = vec![j0];
    cols.extend((0..g_row.len()).filter(|&j| j != j0));
    let mut derived = BlockCirculantMatrix::zeros(p, 1, cols.len());
    *derived.block_mut(0, 0) = RingPoly::one(p);
    for (idx, &j) in cols.iter().enumerate().skip(1) {
        *derived.block_mut(0, idx) = g_row[j].mul(&j0_inv)?;
    }
    let gen = derived.expand();
    let w: usize = expected.iter().sum();

    let mut attempts = 0;
    for _ in 0..retries {
        attempts += 1;
        let Some(word) = stern_search(&gen, w, stern, rng) else {
            continue;
        };
        let blocks = split_blocks(&word, p);
        let Ok(c0_inv) = blocks[0].inv() else {
            continue;
        };
        let q = g_row[j0].mul(&c0_inv)?;
        if q.weight() != q_weight {
            continue;
        }
        let mut s_row = vec![RingPoly::zero(p); g_row.len()];
        for (idx, &j) in cols.iter().enumerate() {
            s_row[j] = blocks[idx].clone();
        }
        let fac = RowFactorization { q, s_row };
        if fac.s_row.iter().zip(expected).all(|(s, &w)| s.weight() == w) && fac.verify(g_row) {
            return Ok(fac);
        }
    }
    Err(LdpcAttackError::SearchExhausted { attempts })
}

/// Multiplies the factored scrambler rows back onto the public matrix.
/// The prefix block columns must collapse to the identity — anything
/// else means the supplied factorizations do not belong to this key —
/// and the remaining column, the image of the systematic column of the
/// secret code, is returned.
pub fn systematic_column(
    public: &QcLdpcPublicKey,
    rows: &[RowFactorization],
) -> Result<Vec<RingPoly>, LdpcAttackError> {
    let params = public.params;
    let p = params.p;
    let d = params.n0 - 1;
    assert_eq!(rows.len(), d, "one factored row per scrambler row");

    let mut a_col = Vec::with_capacity(d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = RingPoly::zero(p);
            for l in 0..d {
                acc = acc.add(&rows[i].s_row[l].mul(public.matrix.block(l, j))?);
            }
            let scaled = acc.mul(&rows[j].q)?;
            let ok = if i == j {
                scaled.is_one()
            } else {
                scaled.is_zero()
            };
            if !ok {
                return Err(LdpcAttackError::InconsistentRows);
            }
        }
        let mut acc = RingPoly::zero(p);
        for l in 0..d {
            acc = acc.add(&rows[i].s_row[l].mul(public.matrix.block(l, d))?);
        }
        a_col.push(acc);
    }
    Ok(a_col)
}

/// Recovers the first `n0 - 1` sparse parity blocks from the systematic
/// column. Each column block is the matching parity block times one
/// hidden invertible factor shared by the whole column, so the code
/// generated by the reciprocals of the column contains
/// `(h_1 .. h_{n0-1})`, all blocks rotated in step, as a single word of
/// weight `(n0-1) dv`. Taking reciprocals instead of quotients keeps
/// the construction valid even when no column block is invertible. A
/// found word is accepted only if every block has weight `dv` and all
/// pairwise cross-products with the column agree on the hidden factor.
pub fn recover_parity_prefix(
    a_col: &[RingPoly],
    dv: usize,
    stern: &SternParams,
    retries: usize,
    rng: &mut impl Rng,
) -> Result<Vec<RingPoly>, LdpcAttackError> {
    let d = a_col.len();
    let p = a_col[0].p();
    let mut derived = BlockCirculantMatrix::zeros(p, 1, d);
    for (i, a) in a_col.iter().enumerate() {
        *derived.block_mut(0, i) = a.reciprocal();
    }
    let gen = derived.expand();
    let w = d * dv;

    let mut attempts = 0;
    'search: for _ in 0..retries {
        attempts += 1;
        let Some(word) = stern_search(&gen, w, stern, rng) else {
            continue;
        };
        let blocks = split_blocks(&word, p);
        if blocks.iter().any(|b| b.weight() != dv) {
            continue 'search;
        }
        let h = blocks;
        // Every quotient a_i / h_i^* sees the same hidden last blocks,
        // so cross-multiplied pairs must agree.
        for i in 0..d {
            for j in (i + 1)..d {
                let lhs = a_col[i].mul(&h[j].reciprocal())?;
                let rhs = a_col[j].mul(&h[i].reciprocal())?;
                if lhs != rhs {
                    continue 'search;
                }
            }
        }
        return Ok(h);
    }
    Err(LdpcAttackError::SearchExhausted { attempts })
}

/// Recover the complete secret key from factored prefix rows.
///
/// The systematic column fixes the parity prefix, via
/// [`recover_parity_prefix`], and what is then left of the column is a
/// single product of the last parity and diagonal blocks. That product
/// splits by trying every `q_weight`-subset of its support as the
/// diagonal part, and a candidate split is accepted only if the
/// reassembled public key matches the real one bit for bit.
pub fn extract_secret(
    public: &QcLdpcPublicKey,
    rows: &[RowFactorization],
    stern: &SternParams,
    retries: usize,
    rng: &mut impl Rng,
) -> Result<QcLdpcSecretKey, LdpcAttackError> {
    let params = public.params;
    let p = params.p;
    let d = params.n0 - 1;
    let a_col = systematic_column(public, rows)?;

    let mut attempts = 0;
    for _ in 0..retries {
        attempts += 1;
        let h = match recover_parity_prefix(&a_col, params.dv, stern, 1, rng) {
            Ok(h) => h,
            Err(LdpcAttackError::SearchExhausted { .. }) => continue,
            Err(other) => return Err(other),
        };
        let Some(pivot) = (0..d).find(|&i| h[i].inv().is_ok() && a_col[i].inv().is_ok()) else {
            continue;
        };
        let shared = h[pivot].reciprocal().inv()?.mul(&a_col[pivot])?;
        let Ok(twist) = shared.inv() else {
            continue;
        };

        // `twist` is a rotation of `h_{n0}^* q_{n0}`; peel it apart by
        // trying every support subset as the diagonal part.
        let sup = twist.support();
        let exps = sup.exponents();
        if exps.len() < params.q_weight {
            continue;
        }
        let mut recovered: Option<QcLdpcSecretKey> = None;
        for_each_combination(exps.len(), params.q_weight, |pick| {
            if recovered.is_some() {
                return;
            }
            let support: Vec<usize> = pick.iter().map(|&i| exps[i]).collect();
            let cand = RingPoly::from_support(p, &Support::new(support).unwrap())
                .expect("support exponents are in range");
            let Ok(cand_inv) = cand.inv() else { return };
            let last_h = match cand_inv.mul(&twist) {
                Ok(u) if u.weight() == params.dv => u.reciprocal(),
                _ => return,
            };
            let mut h_full = h.clone();
            h_full.push(last_h);
            let mut q: Vec<RingPoly> = rows.iter().map(|r| r.q.clone()).collect();
            q.push(cand);
            let mut s = BlockCirculantMatrix::zeros(p, d, d);
            for i in 0..d {
                for j in 0..d {
                    *s.block_mut(i, j) = rows[i].s_row[j].clone();
                }
            }
            let (h_full, s, q) = canonicalize(&params, h_full, s, q);
            if let Ok(m) = assemble_public(&params, &h_full, &s, &q) {
                if m == public.matrix {
                    recovered = Some(QcLdpcSecretKey {
                        params,
                        h: h_full,
                        s,
                        q,
                    });
                }
            }
        });
        if let Some(sk) = recovered {
            return Ok(sk);
        }
    }
    Err(LdpcAttackError::SearchExhausted { attempts })
}

/// Rotate every parity block to canonical form, then the last diagonal
/// block too, compensating through the other components so that the
/// assembled public key is unchanged. Recovery is unique exactly up to
/// these rotations, so canonicalizing makes independent recoveries of
/// the same key bit-identical.
fn canonicalize(
    params: &QcLdpcParams,
    h: Vec<RingPoly>,
    s: BlockCirculantMatrix,
    q: Vec<RingPoly>,
) -> (Vec<RingPoly>, BlockCirculantMatrix, Vec<RingPoly>) {
    let p = params.p;
    let d = params.n0 - 1;
    let mut shifts = Vec::with_capacity(h.len());
    let mut h_out = Vec::with_capacity(h.len());
    for block in &h {
        let (canon, e) = block.canonical_rotation();
        h_out.push(canon);
        shifts.push((p - e) % p); // canon = x^shift * block
    }
    let mut q_out: Vec<RingPoly> = q
        .iter()
        .zip(&shifts)
        .map(|(qj, &sh)| qj.mul_xpow(sh))
        .collect();
    let mut s_out = BlockCirculantMatrix::zeros(p, d, d);
    for i in 0..d {
        let undo = (p - shifts[i]) % p;
        for j in 0..d {
            *s_out.block_mut(i, j) = s.block(i, j).mul_xpow(undo);
        }
    }
    // One global rotation is still free; pin it to the last diagonal.
    let (canon, e) = q_out[d].canonical_rotation();
    let tau = (p - e) % p;
    q_out[d] = canon;
    for qj in q_out.iter_mut().take(d) {
        *qj = qj.mul_xpow(tau);
    }
    let undo_tau = (p - tau) % p;
    for i in 0..d {
        for j in 0..d {
            *s_out.block_mut(i, j) = s_out.block(i, j).mul_xpow(undo_tau);
        }
    }
    (h_out, s_out, q_out)
}

/// Stern parameters sized for the derived codes this attack searches:
/// one circulant row of `n0 - 1` blocks, so length `(n0-1)p` and
/// dimension `p`.
fn default_stern(params: &QcLdpcParams) -> SternParams {
    let redundancy = (params.n0 - 2) * params.p;
    SternParams::new(2, redundancy.min(14).max(1), 400)
}

/// End-to-end key recovery from the public key alone. The returned key
/// is canonicalized, reassembles to the exact public matrix, and is a
/// drop-in replacement for the original secret key.
pub fn recover_secret(
    public: &QcLdpcPublicKey,
    strategy: FactorStrategy,
    seed: u64,
) -> Result<QcLdpcSecretKey, LdpcAttackError> {
    let params = public.params;
    if params.n0 < 3 {
        return Err(LdpcAttackError::TooFewBlocks { n0: params.n0 });
    }
    let d = params.n0 - 1;
    let prefix = invert_public_prefix(public)?;
    let weights = s_weights(&params);
    let stern = default_stern(&params);
    let mut rows = Vec::with_capacity(d);
    for i in 0..d {
        let g_row = prefix.row_blocks(i);
        let factored = match strategy {
            FactorStrategy::Enumerate => enumerate_factor(g_row, params.q_weight, &weights[i]),
            FactorStrategy::LowWeight => {
                let mut rng = rng::stream(seed, "qcldpc-attack-row", i as u64);
                low_weight_factor(
                    g_row,
                    params.q_weight,
                    &weights[i],
                    &stern,
                    RETRY_BUDGET,
                    &mut rng,
                )
            }
        };
        rows.push(factored.map_err(|e| LdpcAttackError::RowFailed {
            row: i,
            source: Box::new(e),
        })?);
    }
    let mut rng = rng::stream(seed, "qcldpc-attack-extract", 0);
    extract_secret(public, &rows, &stern, RETRY_BUDGET, &mut rng)
}

/// True iff two sparse parity rows define the same code after rotating
/// every block to canonical form. Key recovery is unique only up to
/// per-block rotations, which leave the public key unchanged, so this
/// is the right notion of "same secret code".
pub fn same_code_up_to_block_rotations(a: &[RingPoly], b: &[RingPoly]) -> bool {
    if a.len() != b.len() || a.is_empty() {
        return false;
    }
    let p = a[0].p();
    let row_space = |blocks: &[RingPoly]| {
        let mut m = BlockCirculantMatrix::zeros(p, 1, blocks.len());
        for (j, block) in blocks.iter().enumerate() {
            *m.block_mut(0, j) = block.canonical_rotation().0;
        }
        m.expand().rref().matrix
    };
    row_space(a) == row_space(b)
}
