//! Primitive binary BCH codes of length `2^m - 1`: field tables, the
//! enumeration of primitive polynomials that defines the candidate key
//! space, generator polynomials via cyclotomic cosets, and the expanded
//! parity-check matrix over F2.

use crate::f2x;
use crate::linalg::BinMatrix;
use crate::poly::RingPoly;

pub const MIN_EXT_DEGREE: u32 = 2;
pub const MAX_EXT_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BchError {
    #[error("extension degree {0} outside supported range {MIN_EXT_DEGREE}..={MAX_EXT_DEGREE}")]
    ExtensionDegreeOutOfRange(u32),
    #[error("0x{poly:x} is not a primitive polynomial of degree {m}")]
    NotPrimitive { poly: u64, m: u32 },
    #[error("designed distance 2t+1 = {0} exceeds the code length {1}")]
    DesignedDistanceTooLarge(usize, usize),
}

/// Multiplication in `F2[x]/(f)` for `deg f = m <= 16`, operands as bit
/// masks.
fn f2_mulmod(mut a: u64, mut b: u64, f: u64, m: u32) -> u64 {
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= f;
        }
    }
    acc
}

fn f2_powmod(base: u64, mut exp: u64, f: u64, m: u32) -> u64 {
    let mut acc = 1u64;
    let mut sq = base;
    while exp != 0 {
        if exp & 1 == 1 {
            acc = f2_mulmod(acc, sq, f, m);
        }
        sq = f2_mulmod(sq, sq, f, m);
        exp >>= 1;
    }
    acc
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `f` (degree `m`, constant term 1) is primitive iff `x` has
/// multiplicative order exactly `2^m - 1` modulo `f`; the order condition
/// alone forces irreducibility.
fn is_primitive(f: u64, m: u32, prime_factors: &[u64]) -> bool {
    let n = (1u64 << m) - 1;
    if f & 1 == 0 {
        return false;
    }
    if f2_powmod(2, n, f, m) != 1 {
        return false;
    }
    prime_factors.iter().all(|&q| f2_powmod(2, n / q, f, m) != 1)
}

/// All primitive polynomials of degree `m`, ascending as bit masks.
pub fn enumerate_primitive_polys(m: u32) -> Result<Vec<u64>, BchError> {
    if !(MIN_EXT_DEGREE..=MAX_EXT_DEGREE).contains(&m) {
        return Err(BchError::ExtensionDegreeOutOfRange(m));
    }
    let n = (1u64 << m) - 1;
    let factors = distinct_prime_factors(n);
    let mut out = Vec::new();
    for middle in 0..1u64 << (m - 1) {
        let f = 1 << m | middle << 1 | 1;
        if is_primitive(f, m, &factors) {
            out.push(f);
        }
    }
    Ok(out)
}

/// Log/antilog tables for `GF(2^m)` defined by a primitive polynomial.
pub struct GaloisField {
    m: u32,
    prim_poly: u64,
    /// `antilog[i]` = bits of `alpha^i`, `i` in `0..2^m - 1`.
    antilog: Vec<u32>,
    /// `log[e]` for nonzero element bits `e`.
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(m: u32, prim_poly: u64) -> Result<Self, BchError> {
        if !(MIN_EXT_DEGREE..=MAX_EXT_DEGREE).contains(&m) {
            return Err(BchError::ExtensionDegreeOutOfRange(m));
        }
        let n = (1usize << m) - 1;
        let factors = distinct_prime_factors(n as u64);
        if !is_primitive(prim_poly, m, &factors) {
            return Err(BchError::NotPrimitive { poly: prim_poly, m });
        }
        let mut antilog = vec![0u32; n];
        let mut log = vec![0u32; 1 << m];
        let mut cur = 1u64;
        for (i, slot) in antilog.iter_mut().enumerate() {
            *slot = cur as u32;
            log[cur as usize] = i as u32;
            cur <<= 1;
            if cur >> m & 1 == 1 {
                cur ^= prim_poly;
            }
        }
        Ok(GaloisField {
            m,
            prim_poly,
            antilog,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn prim_poly(&self) -> u64 {
        self.prim_poly
    }

    /// Multiplicative group order `2^m - 1`.
    pub fn order(&self) -> usize {
        self.antilog.len()
    }

    pub fn alpha_pow(&self, i: usize) -> u32 {
        self.antilog[i % self.order()]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let i = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.antilog[i % self.order()]
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    /// Cyclotomic coset of `j` modulo `2^m - 1`, starting at its least
    /// member.
    pub fn cyclotomic_coset(&self, j: usize) -> Vec<usize> {
        let n = self.order();
        let start = j % n;
        let mut coset = vec![start];
        let mut cur = start * 2 % n;
        while cur != start {
            coset.push(cur);
            cur = cur * 2 % n;
        }
        let least = *coset.iter().min().unwrap();
        let pos = coset.iter().position(|&x| x == least).unwrap();
        coset.rotate_left(pos);
        coset
    }

    /// Minimal polynomial of `alpha^j` over F2, as a bit mask.
    pub fn minimal_poly(&self, j: usize) -> u64 {
        let coset = self.cyclotomic_coset(j);
        // Multiply out prod (x + alpha^i) over the coset, in GF(2^m)[x].
        let mut coeffs: Vec<u32> = vec![1];
        for &i in &coset {
            let root = self.alpha_pow(i);
            let mut next = vec![0u32; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] ^= c;
                next[k] ^= self.mul(root, c);
            }
            coeffs = next;
        }
        let mut mask = 0u64;
        for (k, &c) in coeffs.iter().enumerate() {
            debug_assert!(c <= 1, "coefficients of a minimal polynomial lie in F2");
            if c == 1 {
                mask |= 1 << k;
            }
        }
        mask
    }
}

/// A primitive BCH code of designed distance `2t + 1`.
pub struct BchCode {
    pub m: u32,
    pub t: usize,
    pub prim_poly: u64,
    pub n: usize,
    pub dim: usize,
    /// Generator polynomial, an element of `R_n`.
    pub generator: RingPoly,
    /// Expanded parity check: `2tm` binary rows, one block of `m` per
    /// power `alpha^j`, `j = 1..=2t`. Rows are kept unreduced.
    pub parity: BinMatrix,
}

/// Builds the code for one primitive polynomial: the generator is the
/// product of the distinct minimal polynomials of `alpha^1 .. alpha^{2t}`.
pub fn bch_generator(m: u32, t: usize, prim_poly: u64) -> Result<BchCode, BchError> {
    let field = GaloisField::new(m, prim_poly)?;
    let n = field.order();
    if 2 * t + 1 > n {
        return Err(BchError::DesignedDistanceTooLarge(2 * t + 1, n));
    }
    let mut seen_cosets: Vec<usize> = Vec::new();
    let mut gen: Vec<u64> = vec![1];
    for j in 1..=2 * t {
        let rep = field.cyclotomic_coset(j)[0];
        if seen_cosets.contains(&rep) {
            continue;
        }
        seen_cosets.push(rep);
        gen = f2x::mul(&gen, &[field.minimal_poly(j)]);
    }
    let deg = f2x::degree(&gen).unwrap();
    debug_assert!({
        let (_, rem) = f2x::divrem(&f2x::x_n_plus_1(n), &gen);
        f2x::is_zero(&rem)
    });
    let parity = bch_parity_check(&field, t);
    Ok(BchCode {
        m,
        t,
        prim_poly,
        n,
        dim: n - deg,
        generator: RingPoly::from_words(n, gen),
        parity,
    })
}

/// The parity-check matrix whose GF(2^m) row `j` is `(alpha^{j i})_i`,
/// expanded over F2: entry bit `b` of `alpha^{j i}` lands in row
/// `(j-1) m + b`, column `i`.
pub fn bch_parity_check(field: &GaloisField, t: usize) -> BinMatrix {
    let n = field.order();
    let m = field.m() as usize;
    let mut h = BinMatrix::zeros(2 * t * m, n);
    for j in 1..=2 * t {
        for i in 0..n {
            let e = field.alpha_pow(j * i % n);
            for b in 0..m {
                if e >> b & 1 == 1 {
                    h.set((j - 1) * m + b, i, true);
                }
            }
        }
    }
    h
}

impl BchCode {
    pub fn contains(&self, word: &RingPoly) -> bool {
        assert_eq!(word.p(), self.n);
        let v = crate::linalg::BitVec::from_words(self.n, word.words().to_vec());
        self.parity.mul_bitvec(&v).is_zero()
    }

    /// A uniformly random codeword: random message times the generator.
    pub fn random_codeword(&self, rng: &mut impl rand::Rng) -> RingPoly {
        let mut msg = RingPoly::zero(self.n);
        for i in 0..self.dim {
            if rng.gen() {
                msg.set_coeff(i, true);
            }
        }
        msg.mul(&self.generator).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{BinMatrix, BitVec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn euler_phi(mut n: u64) -> u64 {
        let mut phi = n;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                phi -= phi / d;
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            phi -= phi / n;
        }
        phi
    }

    #[test]
    fn degree_four_primitive_polys_are_the_classic_pair() {
        let polys = enumerate_primitive_polys(4).unwrap();
        // x^4 + x + 1 and x^4 + x^3 + 1.
        assert_eq!(polys, vec![0b10011, 0b11001]);
    }

    #[test]
    fn irreducible_but_imprimitive_poly_excluded() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible with x of order 5.
        let polys = enumerate_primitive_polys(4).unwrap();
        assert!(!polys.contains(&0b11111));
        assert_eq!(f2_powmod(2, 5, 0b11111, 4), 1);
    }

    #[test]
    fn primitive_counts_match_totient_formula() {
        for m in MIN_EXT_DEGREE..=12 {
            let count = enumerate_primitive_polys(m).unwrap().len() as u64;
            let n = (1u64 << m) - 1;
            assert_eq!(count, euler_phi(n) / m as u64, "degree {m}");
        }
    }

    #[test]
    fn degree_eleven_count_is_176() {
        assert_eq!(enumerate_primitive_polys(11).unwrap().len(), 176);
    }

    #[test]
    fn out_of_range_degrees_rejected() {
        assert!(matches!(
            enumerate_primitive_polys(1),
            Err(BchError::ExtensionDegreeOutOfRange(1))
        ));
        assert!(matches!(
            enumerate_primitive_polys(17),
            Err(BchError::ExtensionDegreeOutOfRange(17))
        ));
        assert!(matches!(
            GaloisField::new(4, 0b11111),
            Err(BchError::NotPrimitive { poly: 0b11111, m: 4 })
        ));
    }

    #[test]
    fn field_tables_are_consistent() {
        let f = GaloisField::new(8, 0b100011101).unwrap();
        assert_eq!(f.alpha_pow(0), 1);
        assert_eq!(f.alpha_pow(f.order()), 1);
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..200 {
            let i = rng.gen_range(0..f.order());
            let j = rng.gen_range(0..f.order());
            assert_eq!(
                f.mul(f.alpha_pow(i), f.alpha_pow(j)),
                f.alpha_pow((i + j) % f.order())
            );
        }
    }

    #[test]
    fn minimal_polys_match_the_known_gf16_table() {
        let f = GaloisField::new(4, 0b10011).unwrap();
        assert_eq!(f.minimal_poly(1), 0b10011);
        assert_eq!(f.minimal_poly(2), 0b10011); // conjugate of alpha
        assert_eq!(f.minimal_poly(3), 0b11111);
        assert_eq!(f.minimal_poly(5), 0b111); // coset {5, 10}
        assert_eq!(f.cyclotomic_coset(3), vec![3, 6, 12, 9]);
    }

    #[test]
    fn hamming_code_from_t_equals_one() {
        let code = bch_generator(4, 1, 0b10011).unwrap();
        assert_eq!((code.n, code.dim), (15, 11));
        assert_eq!(code.generator, RingPoly::from_words(15, vec![0b10011]));
    }

    #[test]
    fn two_error_bch_of_length_15() {
        let code = bch_generator(4, 2, 0b10011).unwrap();
        assert_eq!((code.n, code.dim), (15, 7));
        // (x^4 + x + 1)(x^4 + x^3 + x^2 + x + 1) = x^8 + x^7 + x^6 + x^4 + 1
        assert_eq!(code.generator, RingPoly::from_words(15, vec![0x1d1]));
    }

    #[test]
    fn desk_scale_code_has_dimension_51() {
        let prim = enumerate_primitive_polys(6).unwrap()[0];
        let code = bch_generator(6, 2, prim).unwrap();
        assert_eq!((code.n, code.dim), (63, 51));
    }

    #[test]
    fn parity_check_annihilates_exactly_the_codewords() {
        let code = bch_generator(4, 2, 0b10011).unwrap();
        assert_eq!(code.parity.rows(), 2 * 2 * 4);
        assert_eq!(code.parity.cols(), 15);

        // Every cyclic shift of the generator is a codeword.
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for s in 0..code.n {
            assert!(code.contains(&code.generator.mul_xpow(s)));
        }
        for _ in 0..50 {
            assert!(code.contains(&code.random_codeword(&mut rng)));
        }
        // No weight-1 vector is a codeword.
        for i in 0..code.n {
            let e = RingPoly::monomial(code.n, i);
            assert!(!code.contains(&e));
        }
        // The parity rows span the full dual: rank = n - dim.
        assert_eq!(code.parity.rank(), code.n - code.dim);
    }

    #[test]
    fn syndrome_map_distinguishes_close_words() {
        let code = bch_generator(4, 2, 0b10011).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let c = code.random_codeword(&mut rng);
        let tampered = c.add(&RingPoly::monomial(code.n, 3));
        let v = BitVec::from_words(code.n, tampered.words().to_vec());
        assert!(!code.parity.mul_bitvec(&v).is_zero());
        let _: &BinMatrix = &code.parity;
    }
}
