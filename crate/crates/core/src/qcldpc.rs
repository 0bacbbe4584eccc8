//! A McEliece variant built on quasi-cyclic LDPC codes. The secret code
//! is the kernel of a single block row `H = (H_1 .. H_{n0})` of sparse
//! circulants; the public generator hides its systematic form behind a
//! dense block-circulant scrambler `S` and a sparse diagonal `Q`.

use std::collections::HashMap;

use rand::Rng;

use crate::linalg::{BitVec, BlockCirculantMatrix, LinalgError};
use crate::poly::{PolyError, RingPoly};

const REDRAW_BUDGET: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum QcLdpcError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("failed to draw {what} after {attempts} attempts")]
    GenerationFailed { what: &'static str, attempts: usize },
    #[error("bit-flipping did not converge after {iterations} iterations (residual syndrome weight {residual})")]
    DecodingFailed { iterations: usize, residual: usize },
    #[error("key file: {0}")]
    Parse(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `q_weight` is the row weight of each diagonal block of `Q` (called `m`
/// in the original proposal); `t_prime` is the sender's error weight and
/// must satisfy `t_prime * q_weight <= t`, the decoder's error budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcLdpcParams {
    pub p: usize,
    pub n0: usize,
    pub dv: usize,
    pub q_weight: usize,
    pub t: usize,
    pub t_prime: usize,
}

impl QcLdpcParams {
    pub fn new(
        p: usize,
        n0: usize,
        dv: usize,
        q_weight: usize,
        t: usize,
        t_prime: usize,
    ) -> Result<Self, QcLdpcError> {
        let params = QcLdpcParams {
            p,
            n0,
            dv,
            q_weight,
            t,
            t_prime,
        };
        params.validate()?;
        Ok(params)
    }

    /// The parameter set from the original proposal.
    pub fn proposed() -> Self {
        QcLdpcParams {
            p: 4032,
            n0: 4,
            dv: 13,
            q_weight: 7,
            t: 190,
            t_prime: 27,
        }
    }

    /// Small parameters for fast end-to-end runs of the attack.
    pub fn desk() -> Self {
        QcLdpcParams {
            p: 101,
            n0: 4,
            dv: 5,
            q_weight: 3,
            t: 6,
            t_prime: 2,
        }
    }

    pub fn validate(&self) -> Result<(), QcLdpcError> {
        let fail = |msg: String| Err(QcLdpcError::InvalidParameters(msg));
        if self.n0 < 2 {
            return fail(format!("need at least two circulant blocks, got {}", self.n0));
        }
        if self.dv % 2 == 0 || self.dv < 3 || self.dv >= self.p {
            return fail(format!(
                "column weight dv must be odd and within 3..p={}, got {}",
                self.p, self.dv
            ));
        }
        if self.q_weight % 2 == 0 || self.q_weight < 3 || self.q_weight >= self.p {
            return fail(format!(
                "q_weight must be odd and within 3..p={}, got {}",
                self.p, self.q_weight
            ));
        }
        if self.t_prime == 0 || self.t_prime * self.q_weight > self.t {
            return fail(format!(
                "error weight t_prime={} must be positive with t_prime * q_weight <= t={}",
                self.t_prime, self.t
            ));
        }
        if self.t >= self.p {
            return fail(format!("t={} out of range for p={}", self.t, self.p));
        }
        Ok(())
    }

    pub fn code_length(&self) -> usize {
        self.p * self.n0
    }

    pub fn dimension(&self) -> usize {
        self.p * (self.n0 - 1)
    }
}

/// Weight-parity pattern for the scrambler `S`: an entry marked `true`
/// gets an odd-weight polynomial, `false` an even-weight one. The
/// pattern's F2 determinant is 1, which makes the weight of `det(S)(x)`
/// odd and so keeps `x - 1` from dividing it; an all-odd pattern would
/// force `S` to be singular.
pub fn s_pattern(d: usize) -> Vec<Vec<bool>> {
    if d == 3 {
        return vec![
            vec![true, true, true],
            vec![true, false, true],
            vec![false, true, true],
        ];
    }
    // Unitriangular fallback: ones on the diagonal and superdiagonal.
    (0..d)
        .map(|i| (0..d).map(|j| j == i || j == i + 1).collect())
        .collect()
}

/// Entry weights for `S`: `q_weight` where the pattern is odd and
/// `q_weight - 1` where it is even.
pub fn s_weights(params: &QcLdpcParams) -> Vec<Vec<usize>> {
    s_pattern(params.n0 - 1)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|odd| if odd { params.q_weight } else { params.q_weight - 1 })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct QcLdpcSecretKey {
    pub params: QcLdpcParams,
    /// Defining polynomials of the parity-check blocks `H_1 .. H_{n0}`;
    /// the last one is invertible.
    pub h: Vec<RingPoly>,
    /// Dense scrambler, `(n0 - 1) x (n0 - 1)` blocks.
    pub s: BlockCirculantMatrix,
    /// Diagonal blocks of `Q`, all invertible.
    pub q: Vec<RingPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcLdpcPublicKey {
    pub params: QcLdpcParams,
    /// `S^{-1} x (I | A) x Q^{-1}` as `(n0 - 1) x n0` blocks.
    pub matrix: BlockCirculantMatrix,
}

impl QcLdpcSecretKey {
    pub fn public_key(&self) -> Result<QcLdpcPublicKey, QcLdpcError> {
        Ok(QcLdpcPublicKey {
            params: self.params,
            matrix: assemble_public(&self.params, &self.h, &self.s, &self.q)?,
        })
    }
}

/// Systematic generator `(I | A)` of the secret code, with
/// `A_i = (H_{n0}^{-1} H_i)^T`.
pub fn code_generator(params: &QcLdpcParams, h: &[RingPoly]) -> Result<BlockCirculantMatrix, QcLdpcError> {
    let d = params.n0 - 1;
    let last_inv = h[d].inv()?;
    let mut gen = BlockCirculantMatrix::zeros(params.p, d, params.n0);
    for i in 0..d {
        *gen.block_mut(i, i) = RingPoly::one(params.p);
        *gen.block_mut(i, d) = last_inv.mul(&h[i])?.reciprocal();
    }
    Ok(gen)
}

/// The public generator `S^{-1} x (I | A) x Q^{-1}` computed block-wise.
pub fn assemble_public(
    params: &QcLdpcParams,
    h: &[RingPoly],
    s: &BlockCirculantMatrix,
    q: &[RingPoly],
) -> Result<BlockCirculantMatrix, QcLdpcError> {
    let d = params.n0 - 1;
    let s_inv = s.inverse()?;
    let last_inv = h[d].inv()?;
    let a: Vec<RingPoly> = (0..d)
        .map(|i| Ok(last_inv.mul(&h[i])?.reciprocal()))
        .collect::<Result<_, PolyError>>()?;
    let mut pub_blocks = BlockCirculantMatrix::zeros(params.p, d, params.n0);
    for i in 0..d {
        for j in 0..d {
            *pub_blocks.block_mut(i, j) = s_inv.block(i, j).mul(&q[j].inv()?)?;
        }
        let mut acc = RingPoly::zero(params.p);
        for l in 0..d {
            acc = acc.add(&s_inv.block(i, l).mul(&a[l])?);
        }
        *pub_blocks.block_mut(i, d) = acc.mul(&q[d].inv()?)?;
    }
    Ok(pub_blocks)
}

fn draw_invertible(p: usize, weight: usize, what: &'static str, rng: &mut impl Rng) -> Result<RingPoly, QcLdpcError> {
    for _ in 0..REDRAW_BUDGET {
        let cand = RingPoly::random_weight(p, weight, rng);
        if cand.inv().is_ok() {
            return Ok(cand);
        }
    }
    Err(QcLdpcError::GenerationFailed {
        what,
        attempts: REDRAW_BUDGET,
    })
}

pub fn keygen(
    params: &QcLdpcParams,
    rng: &mut impl Rng,
) -> Result<(QcLdpcSecretKey, QcLdpcPublicKey), QcLdpcError> {
    params.validate()?;
    let d = params.n0 - 1;

    let mut h: Vec<RingPoly> = (0..d)
        .map(|_| RingPoly::random_weight(params.p, params.dv, rng))
        .collect();
    h.push(draw_invertible(params.p, params.dv, "invertible parity block", rng)?);

    let weights = s_weights(params);
    let mut s = BlockCirculantMatrix::zeros(params.p, d, d);
    let mut s_ok = false;
    for _ in 0..REDRAW_BUDGET {
        for i in 0..d {
            for j in 0..d {
                *s.block_mut(i, j) = RingPoly::random_weight(params.p, weights[i][j], rng);
            }
        }
        if s.is_invertible() {
            s_ok = true;
            break;
        }
    }
    if !s_ok {
        return Err(QcLdpcError::GenerationFailed {
            what: "invertible scrambler",
            attempts: REDRAW_BUDGET,
        });
    }

    let q: Vec<RingPoly> = (0..params.n0)
        .map(|_| draw_invertible(params.p, params.q_weight, "invertible diagonal block", rng))
        .collect::<Result<_, _>>()?;

    let secret = QcLdpcSecretKey {
        params: *params,
        h,
        s,
        q,
    };
    let public = secret.public_key()?;
    Ok((secret, public))
}

pub(crate) fn split_blocks(word: &BitVec, p: usize) -> Vec<RingPoly> {
    assert_eq!(word.len() % p, 0);
    (0..word.len() / p)
        .map(|j| {
            let mut poly = RingPoly::zero(p);
            for pos in 0..p {
                if word.get(j * p + pos) {
                    poly.set_coeff(pos, true);
                }
            }
            poly
        })
        .collect()
}

fn join_blocks(blocks: &[RingPoly]) -> BitVec {
    let p = blocks[0].p();
    let mut out = BitVec::zeros(p * blocks.len());
    for (j, block) in blocks.iter().enumerate() {
        for pos in block.support().iter() {
            out.set(j * p + pos, true);
        }
    }
    out
}

/// `x G + e` with a fresh error of weight exactly `t_prime`.
pub fn encrypt(public: &QcLdpcPublicKey, msg: &BitVec, rng: &mut impl Rng) -> BitVec {
    let params = &public.params;
    assert_eq!(msg.len(), params.dimension(), "message length mismatch");
    let msg_blocks = split_blocks(msg, params.p);
    let mut ct_blocks = Vec::with_capacity(params.n0);
    for j in 0..params.n0 {
        let mut acc = RingPoly::zero(params.p);
        for (i, m) in msg_blocks.iter().enumerate() {
            acc = acc.add(&m.mul(public.matrix.block(i, j)).expect("matching moduli"));
        }
        ct_blocks.push(acc);
    }
    let mut ct = join_blocks(&ct_blocks);
    let mut error = std::collections::BTreeSet::new();
    while error.len() < params.t_prime {
        error.insert(rng.gen_range(0..ct.len()));
    }
    for pos in error {
        ct.flip(pos);
    }
    ct
}

/// Syndrome of `word` against the sparse parity row: `sum_j w_j h_j^*`.
pub fn syndrome(h: &[RingPoly], blocks: &[RingPoly]) -> RingPoly {
    let p = h[0].p();
    let mut syn = RingPoly::zero(p);
    for (block, hj) in blocks.iter().zip(h) {
        syn = syn.add(&block.mul(&hj.reciprocal()).expect("matching moduli"));
    }
    syn
}

/// Default iteration budget for [`bitflip_decode`].
pub const DEFAULT_BITFLIP_MAX_ITER: usize = 50;

/// Bit flipping by steepest descent on the syndrome weight: each round flips
/// the single bit involved in the most unsatisfied parity checks, updating the
/// syndrome incrementally.  One flip per round keeps the search stable at high
/// check density, where flipping every majority-unsatisfied bit at once would
/// introduce more fresh errors than it clears.  Once the residual syndrome is
/// small the decoder switches to an exact finish: it looks for up to four bits
/// whose check patterns XOR to the whole syndrome, which resolves clusters of
/// error bits with heavily overlapping checks that single flips cannot split.
pub fn bitflip_decode(
    h: &[RingPoly],
    word: &BitVec,
    max_iter: usize,
) -> Result<BitVec, QcLdpcError> {
    let p = h[0].p();
    let dv = h[0].weight();
    let supports: Vec<Vec<usize>> = h.iter().map(|hj| hj.support().iter().collect()).collect();
    let flip_syndrome = |syn: &mut RingPoly, j: usize, pos: usize| {
        for &e in &supports[j] {
            let idx = (pos + p - e) % p;
            let on = syn.coeff(idx);
            syn.set_coeff(idx, !on);
        }
    };
    let mut blocks = split_blocks(word, p);
    let mut syn = syndrome(h, &blocks);
    for _ in 0..max_iter {
        if syn.is_zero() {
            return Ok(join_blocks(&blocks));
        }
        if syn.weight() <= 4 * dv {
            if let Some(flips) = complete_small_tail(&supports, &syn, p) {
                for (j, pos) in flips {
                    let cur = blocks[j].coeff(pos);
                    blocks[j].set_coeff(pos, !cur);
                    flip_syndrome(&mut syn, j, pos);
                }
                debug_assert!(syn.is_zero());
                return Ok(join_blocks(&blocks));
            }
        }
        // Steepest descent: flip the bit with the most unsatisfied checks.
        let mut best = (0usize, 0usize, 0usize);
        for (j, support) in supports.iter().enumerate() {
            for pos in 0..p {
                let unsat = support
                    .iter()
                    .filter(|&&e| syn.coeff((pos + p - e) % p))
                    .count();
                if unsat > best.0 {
                    best = (unsat, j, pos);
                }
            }
        }
        let (unsat, j, pos) = best;
        if 2 * unsat <= dv {
            // No flip lowers the syndrome weight and the exact finish found
            // nothing: declare failure instead of oscillating.
            break;
        }
        let cur = blocks[j].coeff(pos);
        blocks[j].set_coeff(pos, !cur);
        flip_syndrome(&mut syn, j, pos);
    }
    Err(QcLdpcError::DecodingFailed {
        iterations: max_iter,
        residual: syn.weight(),
    })
}

/// Find up to four positions whose parity-check patterns XOR exactly to the
/// residual syndrome, via a meet-in-the-middle over bit-packed patterns.
/// Only candidates touching at least one unsatisfied check are considered.
/// Requires `p` ≤ 128 to pack each pattern into one word; returns `None`
/// otherwise, leaving larger instances to plain descent.
fn complete_small_tail(
    supports: &[Vec<usize>],
    syn: &RingPoly,
    p: usize,
) -> Option<Vec<(usize, usize)>> {
    if p > 128 {
        return None;
    }
    let target: u128 = syn.support().iter().fold(0, |acc, i| acc | 1 << i);
    let mut candidates: Vec<(usize, usize, u128)> = Vec::new();
    for (j, support) in supports.iter().enumerate() {
        for pos in 0..p {
            let pattern: u128 = support
                .iter()
                .map(|&e| 1u128 << ((pos + p - e) % p))
                .fold(0, |acc, bit| acc | bit);
            if pattern & target != 0 {
                candidates.push((j, pos, pattern));
            }
        }
    }
    for &(j, pos, pattern) in &candidates {
        if pattern == target {
            return Some(vec![(j, pos)]);
        }
    }
    let mut pair_sums: HashMap<u128, (usize, usize)> = HashMap::new();
    let mut pairs: Vec<(usize, usize, u128)> = Vec::new();
    for a in 0..candidates.len() {
        for b in a + 1..candidates.len() {
            let sum = candidates[a].2 ^ candidates[b].2;
            pair_sums.entry(sum).or_insert((a, b));
            pairs.push((a, b, sum));
        }
    }
    let locate = |indices: &[usize]| -> Vec<(usize, usize)> {
        indices
            .iter()
            .map(|&i| (candidates[i].0, candidates[i].1))
            .collect()
    };
    if let Some(&(a, b)) = pair_sums.get(&target) {
        return Some(locate(&[a, b]));
    }
    for (i, &(_, _, pattern)) in candidates.iter().enumerate() {
        if let Some(&(a, b)) = pair_sums.get(&(target ^ pattern)) {
            if a != i && b != i {
                return Some(locate(&[i, a, b]));
            }
        }
    }
    for &(a, b, sum) in &pairs {
        if let Some(&(c, d)) = pair_sums.get(&(target ^ sum)) {
            if c != a && c != b && d != a && d != b {
                return Some(locate(&[a, b, c, d]));
            }
        }
    }
    None
}

/// Invert the channel transform, decode, and unscramble.
///
/// The primary path decodes the channel-twisted word `c·Q`, whose error has
/// weight up to `t_prime·q_weight`.  If that fails, the same syndrome can be
/// read against the equivalent parity row `(q_j^*·h_j)_j` without twisting,
/// where the error still has the sender's weight `t_prime`; the exact-finish
/// stage of the decoder then pins it down directly.
pub fn decrypt(secret: &QcLdpcSecretKey, ct: &BitVec) -> Result<BitVec, QcLdpcError> {
    let params = &secret.params;
    assert_eq!(ct.len(), params.code_length(), "ciphertext length mismatch");
    let d = params.n0 - 1;
    let ct_blocks = split_blocks(ct, params.p);
    let twist = |blocks: &[RingPoly]| -> Vec<RingPoly> {
        blocks
            .iter()
            .zip(&secret.q)
            .map(|(c, qj)| c.mul(qj).expect("matching moduli"))
            .collect()
    };
    let decoded = bitflip_decode(
        &secret.h,
        &join_blocks(&twist(&ct_blocks)),
        DEFAULT_BITFLIP_MAX_ITER,
    )
    .or_else(|primary_failure| {
        let equivalent: Vec<RingPoly> = secret
            .h
            .iter()
            .zip(&secret.q)
            .map(|(hj, qj)| qj.reciprocal().mul(hj).expect("matching moduli"))
            .collect();
        let corrected = bitflip_decode(&equivalent, ct, DEFAULT_BITFLIP_MAX_ITER)
            .map_err(|_| primary_failure)?;
        Ok::<_, QcLdpcError>(join_blocks(&twist(&split_blocks(&corrected, params.p))))
    })?;
    let z = split_blocks(&decoded, params.p);
    let mut msg_blocks = Vec::with_capacity(d);
    for i in 0..d {
        let mut acc = RingPoly::zero(params.p);
        for (l, zl) in z.iter().take(d).enumerate() {
            acc = acc.add(&zl.mul(secret.s.block(l, i))?);
        }
        msg_blocks.push(acc);
    }
    Ok(join_blocks(&msg_blocks))
}

pub fn write_secret_key(secret: &QcLdpcSecretKey) -> String {
    let params = &secret.params;
    let mut out = format!(
        "qcldpc {} {} {} {} {} {}\n",
        params.p, params.n0, params.dv, params.q_weight, params.t, params.t_prime
    );
    for hj in &secret.h {
        out.push_str(&format!("{hj}\n"));
    }
    for i in 0..params.n0 - 1 {
        for j in 0..params.n0 - 1 {
            out.push_str(&format!("{}\n", secret.s.block(i, j)));
        }
    }
    for qj in &secret.q {
        out.push_str(&format!("{qj}\n"));
    }
    out
}

pub fn parse_secret_key(text: &str) -> Result<QcLdpcSecretKey, QcLdpcError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| QcLdpcError::Parse("empty key file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 7 || fields[0] != "qcldpc" {
        return Err(QcLdpcError::Parse(format!(
            "expected header `qcldpc p n0 dv q_weight t t_prime`, got {header:?}"
        )));
    }
    let nums: Vec<usize> = fields[1..]
        .iter()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|e| QcLdpcError::Parse(format!("bad header field {f:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let params = QcLdpcParams::new(nums[0], nums[1], nums[2], nums[3], nums[4], nums[5])?;
    let d = params.n0 - 1;

    let mut next_poly = |what: &str| -> Result<RingPoly, QcLdpcError> {
        let line = lines
            .next()
            .ok_or_else(|| QcLdpcError::Parse(format!("missing {what}")))?;
        RingPoly::parse(params.p, line)
            .map_err(|e| QcLdpcError::Parse(format!("bad {what}: {e}")))
    };

    let mut h = Vec::with_capacity(params.n0);
    for idx in 0..params.n0 {
        let block = next_poly(&format!("parity block {}", idx + 1))?;
        if block.weight() != params.dv {
            return Err(QcLdpcError::Parse(format!(
                "parity block {} has weight {}, expected {}",
                idx + 1,
                block.weight(),
                params.dv
            )));
        }
        h.push(block);
    }

    let weights = s_weights(&params);
    let mut s = BlockCirculantMatrix::zeros(params.p, d, d);
    for i in 0..d {
        for j in 0..d {
            let block = next_poly(&format!("scrambler block ({},{})", i + 1, j + 1))?;
            if block.weight() != weights[i][j] {
                return Err(QcLdpcError::Parse(format!(
                    "scrambler block ({},{}) has weight {}, expected {}",
                    i + 1,
                    j + 1,
                    block.weight(),
                    weights[i][j]
                )));
            }
            *s.block_mut(i, j) = block;
        }
    }

    let mut q = Vec::with_capacity(params.n0);
    for idx in 0..params.n0 {
        let block = next_poly(&format!("diagonal block {}", idx + 1))?;
        if block.weight() != params.q_weight {
            return Err(QcLdpcError::Parse(format!(
                "diagonal block {} has weight {}, expected {}",
                idx + 1,
                block.weight(),
                params.q_weight
            )));
        }
        q.push(block);
    }

    if lines.next().is_some() {
        return Err(QcLdpcError::Parse("trailing content after key".into()));
    }
    Ok(QcLdpcSecretKey { params, h, s, q })
}

/// Serializes a public key: parameter header, then the `n0 - 1` generator
/// rows, one line of `n0` exponent-list blocks each.
pub fn write_public_key(public: &QcLdpcPublicKey) -> String {
    let params = &public.params;
    let mut out = format!(
        "qcldpc-public {} {} {} {} {} {}\n",
        params.p, params.n0, params.dv, params.q_weight, params.t, params.t_prime
    );
    for i in 0..params.n0 - 1 {
        let blocks: Vec<String> = (0..params.n0)
            .map(|j| public.matrix.block(i, j).to_string())
            .collect();
        out.push_str(&blocks.join(" "));
        out.push('\n');
    }
    out
}

fn parse_block_row(line: &str, p: usize, n0: usize) -> Result<Vec<RingPoly>, QcLdpcError> {
    let mut blocks = Vec::new();
    let mut rest = line.trim();
    while !rest.is_empty() {
        if !rest.starts_with('[') {
            return Err(QcLdpcError::Parse(format!(
                "expected `[` at {:?}",
                &rest[..rest.len().min(12)]
            )));
        }
        let close = rest
            .find(']')
            .ok_or_else(|| QcLdpcError::Parse("unbalanced `[`".into()))?;
        blocks.push(RingPoly::parse(p, &rest[..=close]).map_err(|e| {
            QcLdpcError::Parse(format!("bad block {}: {e}", blocks.len() + 1))
        })?);
        rest = rest[close + 1..].trim_start();
    }
    if blocks.len() != n0 {
        return Err(QcLdpcError::Parse(format!(
            "row holds {} blocks, expected {n0}",
            blocks.len()
        )));
    }
    Ok(blocks)
}

pub fn parse_public_key(text: &str) -> Result<QcLdpcPublicKey, QcLdpcError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| QcLdpcError::Parse("empty key file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 7 || fields[0] != "qcldpc-public" {
        return Err(QcLdpcError::Parse(format!(
            "expected header `qcldpc-public p n0 dv q_weight t t_prime`, got {header:?}"
        )));
    }
    let nums: Vec<usize> = fields[1..]
        .iter()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|e| QcLdpcError::Parse(format!("bad header field {f:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let params = QcLdpcParams::new(nums[0], nums[1], nums[2], nums[3], nums[4], nums[5])?;
    let d = params.n0 - 1;
    let mut matrix = BlockCirculantMatrix::zeros(params.p, d, params.n0);
    for i in 0..d {
        let line = lines
            .next()
            .ok_or_else(|| QcLdpcError::Parse(format!("expected {d} generator rows")))?;
        for (j, block) in parse_block_row(line, params.p, params.n0)?
            .into_iter()
            .enumerate()
        {
            *matrix.block_mut(i, j) = block;
        }
    }
    if lines.next().is_some() {
        return Err(QcLdpcError::Parse("trailing content after key".into()));
    }
    Ok(QcLdpcPublicKey { params, matrix })
}

/// The worked example shipped with the original cryptanalysis: a complete
/// secret key at the proposed parameters.
pub fn reference_example() -> QcLdpcSecretKey {
    parse_secret_key(include_str!("../fixtures/qcldpc_paper.key"))
        .expect("bundled reference key parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{BinMatrix, Rref};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn pattern_determinant_is_one() {
        for d in 1..=6 {
            let pattern = s_pattern(d);
            let mut m = BinMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    m.set(i, j, pattern[i][j]);
                }
            }
            assert_eq!(m.rank(), d, "pattern {d}x{d} is singular");
        }
        assert_eq!(
            s_pattern(3),
            vec![
                vec![true, true, true],
                vec![true, false, true],
                vec![false, true, true],
            ]
        );
    }

    #[test]
    fn keygen_produces_consistent_pair() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        assert_eq!(pk.matrix.block_rows(), 3);
        assert_eq!(pk.matrix.block_cols(), 4);
        // Every row of G x Q must lie in the kernel of the parity row.
        for i in 0..3 {
            let mut acc = RingPoly::zero(params.p);
            for j in 0..4 {
                let twisted = pk.matrix.block(i, j).mul(&sk.q[j]).unwrap();
                acc = acc.add(&twisted.mul(&sk.h[j].reciprocal()).unwrap());
            }
            assert!(acc.is_zero(), "public row {i} escapes the secret code");
        }
        // The inverse of the leading k columns factors as diag(q) x S.
        let lead = pk.matrix.leading_blocks(3, 3);
        let lead_inv = lead.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = sk.q[i].mul(sk.s.block(i, j)).unwrap();
                assert_eq!(lead_inv.block(i, j), &expect, "block ({i},{j})");
            }
        }
    }

    fn random_codeword(
        params: &QcLdpcParams,
        gen: &BlockCirculantMatrix,
        rng: &mut ChaCha12Rng,
    ) -> BitVec {
        let z = BitVec::random(params.dimension(), rng);
        let z_blocks = split_blocks(&z, params.p);
        let mut cw_blocks = Vec::new();
        for j in 0..params.n0 {
            let mut acc = RingPoly::zero(params.p);
            for (i, zi) in z_blocks.iter().enumerate() {
                acc = acc.add(&zi.mul(gen.block(i, j)).unwrap());
            }
            cw_blocks.push(acc);
        }
        join_blocks(&cw_blocks)
    }

    #[test]
    fn round_trip_audit_over_100_seeds() {
        let params = QcLdpcParams::desk();
        let mut recovered = 0;
        for seed in 0..100 {
            let mut rng = ChaCha12Rng::seed_from_u64(1000 + seed);
            let (sk, pk) = keygen(&params, &mut rng).unwrap();
            let msg = BitVec::random(params.dimension(), &mut rng);
            let ct = encrypt(&pk, &msg, &mut rng);
            assert_ne!(ct.len(), 0);
            if decrypt(&sk, &ct).map(|back| back == msg).unwrap_or(false) {
                recovered += 1;
            }
        }
        assert!(recovered >= 99, "only {recovered}/100 round trips succeeded");
    }

    #[test]
    fn zero_error_ciphertext_decrypts_exactly() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        let msg = BitVec::random(params.dimension(), &mut rng);
        let msg_blocks = split_blocks(&msg, params.p);
        let mut ct_blocks = Vec::new();
        for j in 0..params.n0 {
            let mut acc = RingPoly::zero(params.p);
            for (i, m) in msg_blocks.iter().enumerate() {
                acc = acc.add(&m.mul(pk.matrix.block(i, j)).unwrap());
            }
            ct_blocks.push(acc);
        }
        let clean = join_blocks(&ct_blocks);
        assert_eq!(decrypt(&sk, &clean).unwrap(), msg);
    }

    #[test]
    fn heavy_tampering_fails_or_garbles_without_panicking() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        let msg = BitVec::random(params.dimension(), &mut rng);
        let mut ct = encrypt(&pk, &msg, &mut rng);
        let mut flipped = std::collections::BTreeSet::new();
        while flipped.len() < params.p {
            let pos = rng.gen_range(0..ct.len());
            if flipped.insert(pos) {
                ct.flip(pos);
            }
        }
        match decrypt(&sk, &ct) {
            // A wrong message is acceptable under this much tampering.
            Ok(_) => {}
            Err(QcLdpcError::DecodingFailed { .. }) => {}
            Err(other) => panic!("unexpected error class: {other}"),
        }
    }

    #[test]
    fn encryption_adds_exact_error_weight() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let (_, pk) = keygen(&params, &mut rng).unwrap();
        let msg = BitVec::random(params.dimension(), &mut rng);
        let clean = {
            let blocks = split_blocks(&msg, params.p);
            let mut ct_blocks = Vec::new();
            for j in 0..params.n0 {
                let mut acc = RingPoly::zero(params.p);
                for (i, m) in blocks.iter().enumerate() {
                    acc = acc.add(&m.mul(pk.matrix.block(i, j)).unwrap());
                }
                ct_blocks.push(acc);
            }
            join_blocks(&ct_blocks)
        };
        for _ in 0..10 {
            let ct = encrypt(&pk, &msg, &mut rng);
            let mut diff = ct.clone();
            diff.xor_in(&clean);
            assert_eq!(diff.weight(), params.t_prime);
        }
    }

    #[test]
    fn bitflip_corrects_every_single_bit_error() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let (sk, _) = keygen(&params, &mut rng).unwrap();
        let gen = code_generator(&params, &sk.h).unwrap();
        let clean = random_codeword(&params, &gen, &mut rng);
        assert!(
            syndrome(&sk.h, &split_blocks(&clean, params.p)).is_zero(),
            "not a codeword"
        );
        for pos in 0..clean.len() {
            let mut noisy = clean.clone();
            noisy.set(pos, !noisy.get(pos));
            let fixed = bitflip_decode(&sk.h, &noisy, DEFAULT_BITFLIP_MAX_ITER)
                .unwrap_or_else(|e| panic!("position {pos}: {e}"));
            assert_eq!(fixed, clean, "position {pos}");
        }
    }

    // The correction budget t is an empirical capability estimate for the
    // decoder, not a worst-case guarantee: audit the success rate on uniform
    // weight-t errors instead of demanding perfection.
    #[test]
    fn bitflip_capability_audit_at_error_budget() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let (sk, _) = keygen(&params, &mut rng).unwrap();
        let gen = code_generator(&params, &sk.h).unwrap();
        let mut corrected = 0;
        for _ in 0..100 {
            let clean = random_codeword(&params, &gen, &mut rng);
            let mut noisy = clean.clone();
            let mut flipped = std::collections::BTreeSet::new();
            while flipped.len() < params.t {
                let pos = rng.gen_range(0..noisy.len());
                if flipped.insert(pos) {
                    noisy.set(pos, !noisy.get(pos));
                }
            }
            if bitflip_decode(&sk.h, &noisy, DEFAULT_BITFLIP_MAX_ITER)
                .map(|fixed| fixed == clean)
                .unwrap_or(false)
            {
                corrected += 1;
            }
        }
        assert!(
            corrected >= 75,
            "decoder corrected only {corrected}/100 weight-{} errors",
            params.t
        );
    }

    #[test]
    fn reference_key_matches_shipped_text() {
        let key = reference_example();
        assert_eq!(key.params, QcLdpcParams::proposed());
        assert_eq!(key.h.len(), 4);
        assert!(key.h.iter().all(|hj| hj.weight() == 13));
        assert_eq!(key.s.block(1, 1).weight(), 6);
        assert_eq!(key.s.block(2, 0).weight(), 6);
        assert!(key.q.iter().all(|qj| qj.weight() == 7));
        assert!(key.h[3].inv().is_ok());
        let regenerated = write_secret_key(&key);
        assert_eq!(regenerated, include_str!("../fixtures/qcldpc_paper.key"));
    }

    #[test]
    fn key_file_round_trips_and_rejects_corruption() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let (sk, _) = keygen(&params, &mut rng).unwrap();
        let text = write_secret_key(&sk);
        let parsed = parse_secret_key(&text).unwrap();
        assert_eq!(parsed.h, sk.h);
        assert_eq!(parsed.q, sk.q);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(parsed.s.block(i, j), sk.s.block(i, j));
            }
        }
        assert_eq!(write_secret_key(&parsed), text);

        let truncated: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            parse_secret_key(&truncated),
            Err(QcLdpcError::Parse(_))
        ));
        let padded = format!("{text}[ 1, 2 ]\n");
        assert!(matches!(parse_secret_key(&padded), Err(QcLdpcError::Parse(_))));
    }

    #[test]
    fn public_key_file_round_trips_and_rejects_corruption() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        let text = write_public_key(&pk);
        let parsed = parse_public_key(&text).unwrap();
        assert_eq!(parsed.params, pk.params);
        assert_eq!(parsed.matrix.expand(), pk.matrix.expand());
        assert_eq!(write_public_key(&parsed), text);
        // The parsed key is usable: encrypt under it, decrypt with the
        // matching secret key.
        let msg = BitVec::random(params.dimension(), &mut rng);
        let ct = encrypt(&parsed, &msg, &mut rng);
        assert_eq!(decrypt(&sk, &ct).unwrap(), msg);

        assert!(parse_public_key("").is_err());
        assert!(parse_public_key(&text.replacen("qcldpc-public", "qcldpc", 1)).is_err());
        let truncated: String = text.lines().take(2).collect::<Vec<_>>().join("\n");
        assert!(parse_public_key(&truncated).is_err());
        let padded = format!("{text}[ 1 ] [ 2 ] [ 3 ] [ 4 ]\n");
        assert!(parse_public_key(&padded).is_err());
    }

    #[test]
    fn parameter_validation_rejects_bad_sets() {
        assert!(QcLdpcParams::new(101, 4, 4, 3, 6, 2).is_err()); // even dv
        assert!(QcLdpcParams::new(101, 4, 5, 3, 5, 2).is_err()); // t' q > t
        assert!(QcLdpcParams::new(101, 1, 5, 3, 6, 2).is_err()); // single block
        assert!(QcLdpcParams::new(101, 4, 5, 3, 6, 2).is_ok());
        QcLdpcParams::proposed().validate().unwrap();
        QcLdpcParams::desk().validate().unwrap();
    }

    // S only mixes rows, so undoing the column twist by Q must map the
    // public row space back onto the secret code exactly.
    #[test]
    fn public_code_is_q_twist_of_secret_code() {
        let params = QcLdpcParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        let gen = code_generator(&params, &sk.h).unwrap();
        // Twist each public column j by q_j and compare row spaces.
        let mut twisted = BlockCirculantMatrix::zeros(params.p, 3, 4);
        for i in 0..3 {
            for j in 0..4 {
                *twisted.block_mut(i, j) = pk.matrix.block(i, j).mul(&sk.q[j]).unwrap();
            }
        }
        let Rref { matrix: a, .. } = twisted.expand().rref();
        let Rref { matrix: b, .. } = gen.expand().rref();
        assert_eq!(a, b);
    }
}

