//! Arithmetic in `R_p = F2[x]/(x^p - 1)`.
//!
//! Elements are bit-packed, little-endian: bit `i` of the word vector is
//! the coefficient of `x^i`. The ring is in bijection with circulant
//! `p x p` matrices over F2 (the matrix whose row `r` is `x^r * m`), so
//! every statement about quasi-cyclic codes here is a statement about
//! these polynomials.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits;
use crate::f2x;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("operands live in different rings: x^{left} - 1 vs x^{right} - 1")]
    ModulusMismatch { left: usize, right: usize },
    #[error("element is not invertible; gcd with the modulus is {gcd}")]
    NotInvertible { gcd: Support },
    #[error("exponent {exponent} out of range for modulus x^{modulus} - 1")]
    ExponentOutOfRange { exponent: usize, modulus: usize },
    #[error("malformed exponent list: {0}")]
    Parse(String),
}

/// A sorted list of exponents, the sparse text form `[ e1, e2, ..., ek ]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Support(Vec<usize>);

impl Support {
    /// Accepts only strictly increasing exponent lists.
    pub fn new(exponents: Vec<usize>) -> Result<Self, PolyError> {
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PolyError::Parse(
                "exponents must be strictly increasing".into(),
            ));
        }
        Ok(Support(exponents))
    }

    pub fn exponents(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "[]");
        }
        write!(f, "[ ")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, " ]")
    }
}

impl FromStr for Support {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, PolyError> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| PolyError::Parse(format!("expected [ ... ], got {t:?}")))?
            .trim();
        if inner.is_empty() {
            return Ok(Support(Vec::new()));
        }
        let exponents = inner
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|e| PolyError::Parse(format!("bad exponent {:?}: {e}", part.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Support::new(exponents)
    }
}

/// An element of `F2[x]/(x^p - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingPoly {
    p: usize,
    words: Vec<u64>,
}

impl RingPoly {
    pub fn zero(p: usize) -> Self {
        assert!(p >= 1, "modulus degree must be positive");
        RingPoly {
            p,
            words: vec![0; bits::words_for(p)],
        }
    }

    pub fn one(p: usize) -> Self {
        Self::monomial(p, 0)
    }

    pub fn monomial(p: usize, e: usize) -> Self {
        let mut out = Self::zero(p);
        out.set_coeff(e % p, true);
        out
    }

    pub fn from_support(p: usize, support: &Support) -> Result<Self, PolyError> {
        let mut out = Self::zero(p);
        for &e in support.exponents() {
            if e >= p {
                return Err(PolyError::ExponentOutOfRange {
                    exponent: e,
                    modulus: p,
                });
            }
            out.set_coeff(e, true);
        }
        Ok(out)
    }

    /// Parses the sparse text form against a known modulus.
    pub fn parse(p: usize, text: &str) -> Result<Self, PolyError> {
        Self::from_support(p, &text.parse()?)
    }

    pub(crate) fn from_words(p: usize, mut words: Vec<u64>) -> Self {
        words.resize(bits::words_for(p), 0);
        bits::mask_tail(&mut words, p);
        RingPoly { p, words }
    }

    /// Uniformly random element of exact weight `w`.
    pub fn random_weight(p: usize, w: usize, rng: &mut impl Rng) -> Self {
        assert!(w <= p);
        let mut out = Self::zero(p);
        let mut placed = 0;
        while placed < w {
            let e = rng.gen_range(0..p);
            if !out.coeff(e) {
                out.set_coeff(e, true);
                placed += 1;
            }
        }
        out
    }

    /// Random element with independent fair-coin coefficients.
    pub fn random_dense(p: usize, rng: &mut impl Rng) -> Self {
        let mut words: Vec<u64> = (0..bits::words_for(p)).map(|_| rng.gen()).collect();
        bits::mask_tail(&mut words, p);
        RingPoly { p, words }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn coeff(&self, e: usize) -> bool {
        bits::get_bit(&self.words, e)
    }

    pub fn set_coeff(&mut self, e: usize, value: bool) {
        assert!(e < self.p);
        bits::set_bit(&mut self.words, e, value);
    }

    pub fn weight(&self) -> usize {
        bits::weight(&self.words)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.weight() == 1 && self.coeff(0)
    }

    pub fn support(&self) -> Support {
        Support((0..self.p).filter(|&e| self.coeff(e)).collect())
    }

    fn check_modulus(&self, rhs: &Self) -> Result<(), PolyError> {
        if self.p != rhs.p {
            return Err(PolyError::ModulusMismatch {
                left: self.p,
                right: rhs.p,
            });
        }
        Ok(())
    }

    /// Ring addition (coefficient-wise XOR). Both operands must share `p`.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "ring addition across different moduli");
        let words = self
            .words
            .iter()
            .zip(&rhs.words)
            .map(|(a, b)| a ^ b)
            .collect();
        RingPoly { p: self.p, words }
    }

    /// Multiplication by `x^s`, a cyclic left rotation of the coefficients.
    pub fn mul_xpow(&self, s: usize) -> Self {
        let s = s % self.p;
        let mut out = Self::zero(self.p);
        xor_shift_into(&mut out.words, &self.words, s, self.p);
        out
    }

    /// Ring multiplication, shift-and-add over the sparser operand.
    pub fn mul(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_modulus(rhs)?;
        let (sparse, dense) = if self.weight() <= rhs.weight() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = Self::zero(self.p);
        for (wi, mut word) in sparse.words.iter().copied().enumerate() {
            while word != 0 {
                let e = wi * 64 + word.trailing_zeros() as usize;
                xor_shift_into(&mut out.words, &dense.words, e, self.p);
                word &= word - 1;
            }
        }
        Ok(out)
    }

    /// The star product: coefficient-wise AND. Its support is the
    /// intersection of the operand supports.
    pub fn star(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_modulus(rhs)?;
        let words = self
            .words
            .iter()
            .zip(&rhs.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(RingPoly { p: self.p, words })
    }

    /// Inverse modulo `x^p - 1` via extended Euclid; fails with the gcd
    /// when the element shares a factor with the modulus.
    pub fn inv(&self) -> Result<Self, PolyError> {
        let modulus = f2x::x_n_plus_1(self.p);
        let (g, u) = f2x::half_ext_gcd(&self.words, &modulus);
        if f2x::degree(&g) != Some(0) {
            let gcd_exponents = (0..=self.p)
                .filter(|&e| e < g.len() * 64 && bits::get_bit(&g, e))
                .collect();
            return Err(PolyError::NotInvertible {
                gcd: Support(gcd_exponents),
            });
        }
        let (_, reduced) = f2x::divrem(&u, &modulus);
        Ok(Self::from_words(self.p, reduced))
    }

    /// The reciprocal `x -> x^{-1}` substitution: exponent `i` maps to
    /// `(p - i) mod p`. As a matrix statement, transposing a circulant
    /// replaces its defining polynomial by this.
    pub fn reciprocal(&self) -> Self {
        let mut out = Self::zero(self.p);
        for e in 0..self.p {
            if self.coeff(e) {
                out.set_coeff((self.p - e) % self.p, true);
            }
        }
        out
    }

    /// The rotation of `self` whose support list is lexicographically
    /// least among all `p` rotations, together with the exponent of `self`
    /// that the chosen rotation moves to position zero.
    ///
    /// Nonzero inputs always canonicalize to a support containing 0, so
    /// two elements are rotations of each other iff their canonical forms
    /// are equal.
    pub fn canonical_rotation(&self) -> (Self, usize) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        let mut best: Option<(Vec<usize>, usize)> = None;
        for &e in self.support().exponents() {
            let rotated = self.mul_xpow(self.p - e);
            let sup = rotated.support().0;
            match &best {
                Some((b, _)) if *b <= sup => {}
                _ => best = Some((sup, e)),
            }
        }
        let (sup, e) = best.unwrap();
        (RingPoly::from_support(self.p, &Support(sup)).unwrap(), e)
    }
}

impl fmt::Display for RingPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.support().fmt(f)
    }
}

/// `acc ^= x^e * src` in `R_p`, without temporaries.
fn xor_shift_into(acc: &mut [u64], src: &[u64], e: usize, p: usize) {
    if e == 0 {
        for (a, s) in acc.iter_mut().zip(src) {
            *a ^= s;
        }
    } else {
        bits::xor_bit_range(acc, e, src, 0, p - e);
        bits::xor_bit_range(acc, 0, src, p - e, e);
    }
}
