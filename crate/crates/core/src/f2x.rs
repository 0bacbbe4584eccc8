//! Minimal plain `F2[x]` arithmetic, used internally for extended Euclid
//! (ring inversion) and for assembling BCH generator polynomials. Bit `i`
//! of the word vector is the coefficient of `x^i`.

pub fn degree(a: &[u64]) -> Option<usize> {
    for (i, w) in a.iter().enumerate().rev() {
        if *w != 0 {
            return Some(i * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

pub fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|w| *w == 0)
}

fn trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

pub fn mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let (da, db) = match (degree(a), degree(b)) {
        (Some(da), Some(db)) => (da, db),
        _ => return vec![0],
    };
    let mut out = vec![0u64; crate::bits::words_for(da + db + 2)];
    for i in 0..=da {
        if crate::bits::get_bit(a, i) {
            crate::bits::xor_bit_range(&mut out, i, b, 0, db + 1);
        }
    }
    trim(&mut out);
    out
}

/// Returns `(quotient, remainder)` with `a = q * b + r`, `deg r < deg b`.
pub fn divrem(a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let db = degree(b).expect("division by zero polynomial");
    let mut rem = a.to_vec();
    let mut quot = vec![0u64; a.len().max(1)];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let shift = dr - db;
        crate::bits::flip_bit(&mut quot, shift);
        crate::bits::xor_bit_range(&mut rem, shift, b, 0, db + 1);
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

/// Extended Euclid: returns `(g, u)` with `u * a = g (mod b)` and
/// `g = gcd(a, b)`.
pub fn half_ext_gcd(a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut u0: Vec<u64> = vec![1];
    let mut u1: Vec<u64> = vec![0];
    while !is_zero(&r1) {
        let (q, r) = divrem(&r0, &r1);
        let qu = mul(&q, &u1);
        let next_u = xor(&u0, &qu);
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, next_u);
    }
    trim(&mut r0);
    (r0, u0)
}

pub fn xor(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, w) in a.iter().enumerate() {
        out[i] ^= w;
    }
    for (i, w) in b.iter().enumerate() {
        out[i] ^= w;
    }
    trim(&mut out);
    out
}

/// The modulus `x^n + 1` (over F2 this equals `x^n - 1`).
pub fn x_n_plus_1(n: usize) -> Vec<u64> {
    let mut m = vec![0u64; crate::bits::words_for(n + 1)];
    crate::bits::flip_bit(&mut m, 0);
    crate::bits::flip_bit(&mut m, n);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reassembles() {
        // (x^5 + x^2 + 1) / (x^2 + x): q*b + r must equal a.
        let a = vec![0b100101u64];
        let b = vec![0b110u64];
        let (q, r) = divrem(&a, &b);
        let back = xor(&mul(&q, &b), &r);
        assert_eq!(back, vec![0b100101]);
        assert!(degree(&r) < degree(&b));
    }

    #[test]
    fn ext_gcd_bezout_coefficient() {
        // gcd(x^7 - 1, x^3 + x + 1) = x^3 + x + 1 divides x^7 - 1.
        let m = x_n_plus_1(7);
        let f = vec![0b1011u64];
        let (g, u) = half_ext_gcd(&f, &m);
        assert_eq!(g, f);
        // u * f = g (mod m)
        let (_, r) = divrem(&xor(&mul(&u, &f), &g), &m);
        assert!(is_zero(&r));
    }
}
