//! A McEliece variant whose secret code is spanned by shift orbits inside
//! a primitive BCH code, published behind a secret permutation of the
//! circulant blocks.
//!
//! The orbit construction: a codeword of the length-`n = p * n0` cyclic
//! code together with its `p - 1` shifts by `n0` positions spans a
//! quasi-cyclic subcode. Reindexing coordinates by `a*n0 + b -> b*p + a`
//! turns each such orbit into one row of circulant blocks, so `k0 - 1`
//! codewords give a `(k0-1) x n0` generator over `F2[x]/(x^p - 1)`.

use rand::Rng;

use crate::bch::{self, BchError};
use crate::linalg::{BitVec, BlockCirculantMatrix, LinalgError, Permutation};
use crate::poly::{PolyError, RingPoly};

const REDRAW_BUDGET: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum QcBchError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("orbit matrix stayed rank-deficient after {attempts} redraws (got {achieved}, need {needed})")]
    RankDeficient {
        achieved: usize,
        needed: usize,
        attempts: usize,
    },
    #[error("key file: {0}")]
    Parse(String),
    #[error(transparent)]
    Bch(#[from] BchError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcBchParams {
    /// Field extension degree; the code length is `2^m - 1`.
    pub m: u32,
    /// Designed error-correction capability of the BCH code.
    pub t: usize,
    /// Circulant block size.
    pub p: usize,
    /// Number of blocks, `n = p * n0`.
    pub n0: usize,
    /// Secret generators count plus one; the public code has `p * (k0 - 1)` rows.
    pub k0: usize,
}

impl QcBchParams {
    pub fn new(m: u32, t: usize, p: usize, n0: usize, k0: usize) -> Result<Self, QcBchError> {
        let params = QcBchParams { m, t, p, n0, k0 };
        params.validate()?;
        Ok(params)
    }

    /// Proposed 2^100-security parameters.
    pub fn parameters_a() -> Self {
        QcBchParams {
            m: 12,
            t: 26,
            p: 91,
            n0: 45,
            k0: 43,
        }
    }

    /// Proposed 2^80-security parameters.
    pub fn parameters_b() -> Self {
        QcBchParams {
            m: 11,
            t: 31,
            p: 89,
            n0: 23,
            k0: 21,
        }
    }

    /// Small parameters for fast end-to-end runs of the attack.
    ///
    /// `k0 = 5` is forced by the structure of the length-63 code as a
    /// module over F2[x]/(x^9 - 1). The defining cosets {1,2,4,8,16,32}
    /// and {3,6,12,24,48,33} reduce mod 9 to one zero in each of the six
    /// order-9 residue classes and three zeros in each of {3, 6}, so the
    /// code splits over the irreducible factors of x^9 - 1 (degrees
    /// 1, 2, 6) into components of dimension (7, 4, 6). Five shift
    /// orbits therefore cap at rank 5 + 4*2 + 5*6 = 43 < 45 and k0 = 6
    /// keys cannot exist (see
    /// `five_orbits_cannot_reach_full_rank_with_two_cosets`), while four
    /// orbits generically reach the full 36. Four orbits also supply
    /// 4*3*2 + 4*1*6 = 48 independent constraints on the 49 permutation
    /// unknowns, exactly enough for the attack's kernel to collapse to
    /// dimension one.
    pub fn desk() -> Self {
        QcBchParams {
            m: 6,
            t: 2,
            p: 9,
            n0: 7,
            k0: 5,
        }
    }

    pub fn validate(&self) -> Result<(), QcBchError> {
        let fail = |msg: String| Err(QcBchError::InvalidParameters(msg));
        if !(bch::MIN_EXT_DEGREE..=bch::MAX_EXT_DEGREE).contains(&self.m) {
            return fail(format!("extension degree {} out of range", self.m));
        }
        let n = (1usize << self.m) - 1;
        if self.p * self.n0 != n {
            return fail(format!(
                "block shape {} x {} does not cover length {n}",
                self.p, self.n0
            ));
        }
        if self.p <= self.n0 {
            return fail(format!(
                "need more shifts than blocks (p > n0), got p={} n0={}",
                self.p, self.n0
            ));
        }
        if self.k0 < 2 || self.k0 > self.n0 {
            return fail(format!("k0={} out of range 2..=n0={}", self.k0, self.n0));
        }
        if self.t == 0 || 2 * self.t >= n {
            return fail(format!("designed correction t={} out of range", self.t));
        }
        Ok(())
    }

    pub fn code_length(&self) -> usize {
        self.p * self.n0
    }

    /// Rows of the public generator.
    pub fn public_rows(&self) -> usize {
        self.p * (self.k0 - 1)
    }
}

/// Reindex a length-`p * n0` word by `a*n0 + b -> b*p + a` and split it
/// into `n0` ring elements of modulus `p`.
pub fn reorder_to_blocks(word: &RingPoly, n0: usize) -> Vec<RingPoly> {
    let n = word.p();
    assert_eq!(n % n0, 0, "length must split into {n0} blocks");
    let p = n / n0;
    let mut blocks = vec![RingPoly::zero(p); n0];
    for idx in word.support().iter() {
        blocks[idx % n0].set_coeff(idx / n0, true);
    }
    blocks
}

/// Inverse of `reorder_to_blocks`.
pub fn blocks_to_codeword(blocks: &[RingPoly]) -> RingPoly {
    let n0 = blocks.len();
    let p = blocks[0].p();
    let mut word = RingPoly::zero(p * n0);
    for (b, block) in blocks.iter().enumerate() {
        for a in block.support().iter() {
            word.set_coeff(a * n0 + b, true);
        }
    }
    word
}

#[derive(Debug, Clone)]
pub struct QcBchSecretKey {
    pub params: QcBchParams,
    /// Defining polynomial of the secret field representation.
    pub prim_poly: u64,
    /// Secret block permutation applied to the generator columns.
    pub perm: Permutation,
    /// Reordered blocks of the `k0 - 1` secret codewords.
    pub rows: Vec<Vec<RingPoly>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcBchPublicKey {
    pub params: QcBchParams,
    /// `(k0 - 1) x n0` circulant blocks, columns permuted.
    pub matrix: BlockCirculantMatrix,
}

impl QcBchSecretKey {
    pub fn public_key(&self) -> QcBchPublicKey {
        let params = &self.params;
        let mut blocks = BlockCirculantMatrix::zeros(params.p, params.k0 - 1, params.n0);
        for (i, row) in self.rows.iter().enumerate() {
            for j in 0..params.n0 {
                *blocks.block_mut(i, j) = row[self.perm.apply(j)].clone();
            }
        }
        QcBchPublicKey {
            params: *params,
            matrix: blocks,
        }
    }

    /// The unpermuted generator, one block row per secret codeword.
    pub fn generator(&self) -> BlockCirculantMatrix {
        let params = &self.params;
        let mut blocks = BlockCirculantMatrix::zeros(params.p, params.k0 - 1, params.n0);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, block) in row.iter().enumerate() {
                *blocks.block_mut(i, j) = block.clone();
            }
        }
        blocks
    }
}

pub fn keygen(
    params: &QcBchParams,
    rng: &mut impl Rng,
) -> Result<(QcBchSecretKey, QcBchPublicKey), QcBchError> {
    params.validate()?;
    let candidates = bch::enumerate_primitive_polys(params.m)?;
    let prim_poly = candidates[rng.gen_range(0..candidates.len())];
    keygen_with_field(params, prim_poly, rng)
}

/// Key generation with a pinned field representation.
pub fn keygen_with_field(
    params: &QcBchParams,
    prim_poly: u64,
    rng: &mut impl Rng,
) -> Result<(QcBchSecretKey, QcBchPublicKey), QcBchError> {
    params.validate()?;
    let code = bch::bch_generator(params.m, params.t, prim_poly)?;
    let needed = params.public_rows();
    if needed > code.dim {
        return Err(QcBchError::InvalidParameters(format!(
            "subcode needs rank {needed} but the BCH code has dimension {}",
            code.dim
        )));
    }

    let mut achieved = 0;
    for _ in 0..REDRAW_BUDGET {
        let rows: Vec<Vec<RingPoly>> = (0..params.k0 - 1)
            .map(|_| reorder_to_blocks(&code.random_codeword(rng), params.n0))
            .collect();
        let mut gen = BlockCirculantMatrix::zeros(params.p, params.k0 - 1, params.n0);
        for (i, row) in rows.iter().enumerate() {
            for (j, block) in row.iter().enumerate() {
                *gen.block_mut(i, j) = block.clone();
            }
        }
        achieved = gen.expand().rank();
        if achieved == needed {
            let perm = Permutation::random(params.n0, rng);
            let secret = QcBchSecretKey {
                params: *params,
                prim_poly,
                perm,
                rows,
            };
            let public = secret.public_key();
            return Ok((secret, public));
        }
    }
    Err(QcBchError::RankDeficient {
        achieved,
        needed,
        attempts: REDRAW_BUDGET,
    })
}

/// `x G + e` with an error of weight exactly `t`.
pub fn encrypt(public: &QcBchPublicKey, msg: &BitVec, rng: &mut impl Rng) -> BitVec {
    let params = &public.params;
    assert_eq!(msg.len(), params.public_rows(), "message length mismatch");
    let p = params.p;
    let mut ct_blocks = vec![RingPoly::zero(p); params.n0];
    for i in 0..params.k0 - 1 {
        let mut m_i = RingPoly::zero(p);
        for r in 0..p {
            if msg.get(i * p + r) {
                m_i.set_coeff(r, true);
            }
        }
        for (j, ct) in ct_blocks.iter_mut().enumerate() {
            *ct = ct.add(&m_i.mul(public.matrix.block(i, j)).expect("matching moduli"));
        }
    }
    let mut ct = BitVec::zeros(params.code_length());
    for (j, block) in ct_blocks.iter().enumerate() {
        for a in block.support().iter() {
            ct.set(j * p + a, true);
        }
    }
    let mut error = std::collections::BTreeSet::new();
    while error.len() < params.t {
        error.insert(rng.gen_range(0..ct.len()));
    }
    for pos in error {
        ct.flip(pos);
    }
    ct
}

pub fn write_secret_key(secret: &QcBchSecretKey) -> String {
    let params = &secret.params;
    let mut out = format!(
        "qcbch {} {} {} {} {} {:#x}\n",
        params.m, params.t, params.p, params.n0, params.k0, secret.prim_poly
    );
    let images: Vec<String> = secret
        .perm
        .images()
        .iter()
        .map(|&j| (j + 1).to_string())
        .collect();
    out.push_str(&format!("perm {}\n", images.join(" ")));
    for row in &secret.rows {
        let blocks: Vec<String> = row.iter().map(|b| b.to_string()).collect();
        out.push_str(&blocks.join(" "));
        out.push('\n');
    }
    out
}

fn parse_block_row(line: &str, p: usize, n0: usize) -> Result<Vec<RingPoly>, QcBchError> {
    let mut blocks = Vec::new();
    let mut rest = line.trim();
    while !rest.is_empty() {
        if !rest.starts_with('[') {
            return Err(QcBchError::Parse(format!(
                "expected `[` at {:?}",
                &rest[..rest.len().min(12)]
            )));
        }
        let close = rest
            .find(']')
            .ok_or_else(|| QcBchError::Parse("unbalanced `[`".into()))?;
        blocks.push(RingPoly::parse(p, &rest[..=close]).map_err(|e| {
            QcBchError::Parse(format!("bad block {}: {e}", blocks.len() + 1))
        })?);
        rest = rest[close + 1..].trim_start();
    }
    if blocks.len() != n0 {
        return Err(QcBchError::Parse(format!(
            "row holds {} blocks, expected {n0}",
            blocks.len()
        )));
    }
    Ok(blocks)
}

pub fn parse_secret_key(text: &str) -> Result<QcBchSecretKey, QcBchError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| QcBchError::Parse("empty key file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 7 || fields[0] != "qcbch" {
        return Err(QcBchError::Parse(format!(
            "expected header `qcbch m t p n0 k0 poly`, got {header:?}"
        )));
    }
    let int = |f: &str| -> Result<usize, QcBchError> {
        f.parse::<usize>()
            .map_err(|e| QcBchError::Parse(format!("bad header field {f:?}: {e}")))
    };
    let params = QcBchParams::new(
        int(fields[1])? as u32,
        int(fields[2])?,
        int(fields[3])?,
        int(fields[4])?,
        int(fields[5])?,
    )?;
    let poly_text = fields[6]
        .strip_prefix("0x")
        .ok_or_else(|| QcBchError::Parse(format!("field polynomial {} lacks 0x", fields[6])))?;
    let prim_poly = u64::from_str_radix(poly_text, 16)
        .map_err(|e| QcBchError::Parse(format!("bad field polynomial: {e}")))?;
    if bch::GaloisField::new(params.m, prim_poly).is_err() {
        return Err(QcBchError::Parse(format!(
            "{:#x} is not primitive of degree {}",
            prim_poly, params.m
        )));
    }

    let perm_line = lines
        .next()
        .ok_or_else(|| QcBchError::Parse("missing permutation".into()))?;
    let perm_fields: Vec<&str> = perm_line.split_whitespace().collect();
    if perm_fields.first() != Some(&"perm") || perm_fields.len() != params.n0 + 1 {
        return Err(QcBchError::Parse(format!(
            "expected `perm` with {} images",
            params.n0
        )));
    }
    let mut images = Vec::with_capacity(params.n0);
    for f in &perm_fields[1..] {
        let img = int(f)?;
        if img == 0 || img > params.n0 {
            return Err(QcBchError::Parse(format!("image {img} out of 1..={}", params.n0)));
        }
        images.push(img - 1);
    }
    let perm = Permutation::from_images(images)
        .ok_or_else(|| QcBchError::Parse("images do not form a permutation".into()))?;

    let mut rows = Vec::with_capacity(params.k0 - 1);
    for _ in 0..params.k0 - 1 {
        let line = lines
            .next()
            .ok_or_else(|| QcBchError::Parse(format!("expected {} generator rows", params.k0 - 1)))?;
        rows.push(parse_block_row(line, params.p, params.n0)?);
    }
    if lines.next().is_some() {
        return Err(QcBchError::Parse("trailing content after key".into()));
    }
    Ok(QcBchSecretKey {
        params,
        prim_poly,
        perm,
        rows,
    })
}

/// Serializes a public key: parameter header (no field polynomial — that
/// is secret material), then the `k0 - 1` permuted generator rows, one
/// line of `n0` exponent-list blocks each.
pub fn write_public_key(public: &QcBchPublicKey) -> String {
    let params = &public.params;
    let mut out = format!(
        "qcbch-public {} {} {} {} {}\n",
        params.m, params.t, params.p, params.n0, params.k0
    );
    for i in 0..params.k0 - 1 {
        let blocks: Vec<String> = (0..params.n0)
            .map(|j| public.matrix.block(i, j).to_string())
            .collect();
        out.push_str(&blocks.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_public_key(text: &str) -> Result<QcBchPublicKey, QcBchError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| QcBchError::Parse("empty key file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "qcbch-public" {
        return Err(QcBchError::Parse(format!(
            "expected header `qcbch-public m t p n0 k0`, got {header:?}"
        )));
    }
    let int = |f: &str| -> Result<usize, QcBchError> {
        f.parse::<usize>()
            .map_err(|e| QcBchError::Parse(format!("bad header field {f:?}: {e}")))
    };
    let params = QcBchParams::new(
        int(fields[1])? as u32,
        int(fields[2])?,
        int(fields[3])?,
        int(fields[4])?,
        int(fields[5])?,
    )?;
    let mut matrix = BlockCirculantMatrix::zeros(params.p, params.k0 - 1, params.n0);
    for i in 0..params.k0 - 1 {
        let line = lines.next().ok_or_else(|| {
            QcBchError::Parse(format!("expected {} generator rows", params.k0 - 1))
        })?;
        for (j, block) in parse_block_row(line, params.p, params.n0)?
            .into_iter()
            .enumerate()
        {
            *matrix.block_mut(i, j) = block;
        }
    }
    if lines.next().is_some() {
        return Err(QcBchError::Parse("trailing content after key".into()));
    }
    Ok(QcBchPublicKey { params, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn reorder_round_trips_and_tracks_orbit_shifts() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..50 {
            let word = RingPoly::random_dense(63, &mut rng);
            let blocks = reorder_to_blocks(&word, 7);
            assert_eq!(blocks.len(), 7);
            assert_eq!(blocks_to_codeword(&blocks), word);
            // A shift by n0 becomes a shift by one inside every block.
            let shifted_blocks = reorder_to_blocks(&word.mul_xpow(7), 7);
            for (orig, shifted) in blocks.iter().zip(&shifted_blocks) {
                assert_eq!(&orig.mul_xpow(1), shifted);
            }
        }
    }

    #[test]
    fn keygen_spans_full_orbit_rank_and_stays_inside_the_code() {
        let params = QcBchParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        assert_eq!(pk.matrix.expand().rank(), params.public_rows());

        let code = bch::bch_generator(params.m, params.t, sk.prim_poly).unwrap();
        let expanded = pk.matrix.expand();
        for r in 0..params.public_rows() {
            let mut bits = BitVec::zeros(params.code_length());
            for c in 0..params.code_length() {
                bits.set(c, crate::bits::get_bit(expanded.row(r), c));
            }
            let permuted = split_word(&bits, params.p);
            // Undo the block permutation, then the reordering.
            let mut original = vec![RingPoly::zero(params.p); params.n0];
            for (j, block) in permuted.iter().enumerate() {
                original[sk.perm.apply(j)] = block.clone();
            }
            let word = blocks_to_codeword(&original);
            assert!(code.contains(&word), "public row {r} leaves the BCH code");
        }
    }

    // With two defining cosets (t = 2) the orbit span has a structural
    // rank ceiling of 43 at these block sizes, so demanding the full 45
    // must fail regardless of how many codewords are drawn.
    #[test]
    fn five_orbits_cannot_reach_full_rank_with_two_cosets() {
        let params = QcBchParams::new(6, 2, 9, 7, 6).unwrap();
        for seed in [4u64, 5, 6] {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            match keygen(&params, &mut rng) {
                Err(QcBchError::RankDeficient {
                    achieved, needed, ..
                }) => {
                    assert!(achieved <= 43, "seed {seed}: rank {achieved} above ceiling");
                    assert_eq!(needed, 45);
                }
                Err(e) => panic!("seed {seed}: expected rank-deficient keygen, got {e}"),
                Ok(_) => panic!("seed {seed}: keygen unexpectedly reached rank 45"),
            }
        }
    }

    fn split_word(bits: &BitVec, p: usize) -> Vec<RingPoly> {
        (0..bits.len() / p)
            .map(|j| {
                let mut poly = RingPoly::zero(p);
                for a in 0..p {
                    if bits.get(j * p + a) {
                        poly.set_coeff(a, true);
                    }
                }
                poly
            })
            .collect()
    }

    #[test]
    fn keygen_is_deterministic_per_seed() {
        let params = QcBchParams::desk();
        let run = || {
            let mut rng = ChaCha12Rng::seed_from_u64(8);
            let (sk, pk) = keygen(&params, &mut rng).unwrap();
            (sk.prim_poly, sk.perm.images().to_vec(), pk)
        };
        let (poly_a, perm_a, pk_a) = run();
        let (poly_b, perm_b, pk_b) = run();
        assert_eq!(poly_a, poly_b);
        assert_eq!(perm_a, perm_b);
        assert_eq!(pk_a, pk_b);
    }

    #[test]
    fn oversized_subcode_is_rejected() {
        // p * (k0 - 1) = 54 exceeds the desk BCH dimension 51.
        let params = QcBchParams::new(6, 2, 9, 7, 7).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        match keygen(&params, &mut rng) {
            Err(QcBchError::InvalidParameters(msg)) => {
                assert!(msg.contains("dimension"), "{msg}")
            }
            other => panic!("expected dimension rejection, got {other:?}"),
        }
    }

    #[test]
    fn encryption_adds_exact_error_weight() {
        let params = QcBchParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let (_, pk) = keygen(&params, &mut rng).unwrap();
        let msg = BitVec::random(params.public_rows(), &mut rng);
        let expanded = pk.matrix.expand();
        let clean = expanded.transpose().mul_bitvec(&msg);
        for _ in 0..5 {
            let ct = encrypt(&pk, &msg, &mut rng);
            let mut diff = ct.clone();
            diff.xor_in(&clean);
            assert_eq!(diff.weight(), params.t);
        }
    }

    #[test]
    fn key_file_round_trips_and_rejects_corruption() {
        let params = QcBchParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let (sk, _) = keygen(&params, &mut rng).unwrap();
        let text = write_secret_key(&sk);
        let parsed = parse_secret_key(&text).unwrap();
        assert_eq!(parsed.prim_poly, sk.prim_poly);
        assert_eq!(parsed.perm.images(), sk.perm.images());
        assert_eq!(parsed.rows, sk.rows);
        assert_eq!(write_secret_key(&parsed), text);

        let bad_perm = text.replacen("perm ", "perm 9 ", 1);
        assert!(parse_secret_key(&bad_perm).is_err());
        let truncated: String = text.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(parse_secret_key(&truncated).is_err());
        let bad_poly = text.replacen("0x", "0y", 1);
        assert!(parse_secret_key(&bad_poly).is_err());
    }

    #[test]
    fn public_key_file_round_trips_and_rejects_corruption() {
        let params = QcBchParams::desk();
        let mut rng = ChaCha12Rng::seed_from_u64(32);
        let (_, pk) = keygen(&params, &mut rng).unwrap();
        let text = write_public_key(&pk);
        let parsed = parse_public_key(&text).unwrap();
        assert_eq!(parsed.params, pk.params);
        assert_eq!(parsed.matrix.expand(), pk.matrix.expand());
        assert_eq!(write_public_key(&parsed), text);

        assert!(parse_public_key("").is_err());
        assert!(parse_public_key(&text.replacen("qcbch-public", "qcbch", 1)).is_err());
        let truncated: String = text.lines().take(2).collect::<Vec<_>>().join("\n");
        assert!(parse_public_key(&truncated).is_err());
        let padded = format!("{text}[ 1 ] [ 2 ] [ 3 ] [ 4 ] [ 5 ] [ 6 ] [ 0 ]\n");
        assert!(parse_public_key(&padded).is_err());
    }

    #[test]
    fn parameter_presets_validate() {
        QcBchParams::parameters_a().validate().unwrap();
        QcBchParams::parameters_b().validate().unwrap();
        QcBchParams::desk().validate().unwrap();
        assert!(QcBchParams::new(6, 2, 7, 9, 6).is_err()); // p < n0
        assert!(QcBchParams::new(6, 2, 21, 3, 2).is_ok());
        assert!(QcBchParams::new(6, 2, 9, 7, 1).is_err()); // k0 too small
        assert!(QcBchParams::new(7, 2, 9, 7, 6).is_err()); // wrong length split
    }
}
