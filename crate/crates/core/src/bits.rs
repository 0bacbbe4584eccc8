//! Word-level helpers shared by the packed polynomial and matrix types.
//! All bit vectors are little-endian: bit `i` lives in word `i / 64` at
//! position `i % 64`, and bits at positions `>= len` are kept zero.

pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

pub fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

pub fn set_bit(words: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i % 64);
    if value {
        words[i / 64] |= mask;
    } else {
        words[i / 64] &= !mask;
    }
}

pub fn flip_bit(words: &mut [u64], i: usize) {
    words[i / 64] ^= 1 << (i % 64);
}

/// Clears any bits at positions `len..` in the final word.
pub fn mask_tail(words: &mut [u64], len: usize) {
    if len % 64 != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << (len % 64)) - 1;
        }
    }
}

pub fn weight(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

pub fn parity_of_and(a: &[u64], b: &[u64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() % 2 == 1
}

/// XORs `len` bits of `src` starting at `src_start` into `dst` starting at
/// `dst_start`. Ranges may straddle word boundaries but must fit both slices.
pub fn xor_bit_range(dst: &mut [u64], dst_start: usize, src: &[u64], src_start: usize, len: usize) {
    let mut done = 0;
    while done < len {
        let s = src_start + done;
        let d = dst_start + done;
        // Take the largest chunk that stays inside one source and one
        // destination word.
        let chunk = (64 - s % 64).min(64 - d % 64).min(len - done);
        let bits = src[s / 64] >> (s % 64) & ones(chunk);
        dst[d / 64] ^= bits << (d % 64);
        done += chunk;
    }
}

/// Reads `len <= 64` bits starting at `start` into a single word.
#[cfg(test)]
pub fn read_bits(src: &[u64], start: usize, len: usize) -> u64 {
    debug_assert!(len <= 64);
    let mut out = [0u64; 2];
    xor_bit_range(&mut out, 0, src, start, len);
    out[0]
}

fn ones(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_range_xor_matches_bitwise_loop() {
        let src = [0x9e3779b97f4a7c15u64, 0xbf58476d1ce4e5b9];
        for (src_start, dst_start, len) in [(0, 0, 64), (3, 17, 60), (63, 1, 64), (40, 70, 50)] {
            let mut fast = [0u64; 3];
            xor_bit_range(&mut fast, dst_start, &src, src_start, len);
            let mut slow = [0u64; 3];
            for i in 0..len {
                if get_bit(&src, src_start + i) {
                    flip_bit(&mut slow, dst_start + i);
                }
            }
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn read_bits_roundtrip() {
        let src = [0xdeadbeefcafef00du64, 0x12345678];
        assert_eq!(read_bits(&src, 0, 16), 0xf00d);
        assert_eq!(read_bits(&src, 60, 8), (src[0] >> 60 | src[1] << 4) & 0xff);
    }
}
