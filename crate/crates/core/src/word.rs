//! Plain-text form for messages, errors, and ciphertexts: a length
//! header followed by the sorted support, e.g. `word 63 [ 0, 12, 40 ]`.

use std::str::FromStr;

use crate::linalg::BitVec;
use crate::poly::Support;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("malformed word: {0}")]
    Parse(String),
    #[error("position {position} out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },
}

pub fn write_word(word: &BitVec) -> String {
    let support = Support::new(word.support()).expect("BitVec support is sorted");
    format!("word {} {}\n", word.len(), support)
}

pub fn parse_word(text: &str) -> Result<BitVec, WordError> {
    let line = text.trim();
    if line.lines().count() > 1 {
        return Err(WordError::Parse("expected a single line".into()));
    }
    let rest = line
        .strip_prefix("word")
        .ok_or_else(|| WordError::Parse(format!("expected `word len [ ... ]`, got {line:?}")))?
        .trim_start();
    let (len_text, support_text) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| WordError::Parse("missing support after the length".into()))?;
    let len: usize = len_text
        .parse()
        .map_err(|e| WordError::Parse(format!("bad length {len_text:?}: {e}")))?;
    let support =
        Support::from_str(support_text).map_err(|e| WordError::Parse(e.to_string()))?;
    let mut word = BitVec::zeros(len);
    for position in support.iter() {
        if position >= len {
            return Err(WordError::PositionOutOfRange { position, len });
        }
        word.set(position, true);
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use super::*;

    #[test]
    fn round_trips_random_words() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for len in [1usize, 5, 63, 64, 65, 404] {
            for _ in 0..20 {
                let word = BitVec::random(len, &mut rng);
                let text = write_word(&word);
                assert_eq!(parse_word(&text).unwrap(), word);
            }
        }
    }

    #[test]
    fn zero_and_full_words_round_trip() {
        let zero = BitVec::zeros(10);
        assert_eq!(parse_word(&write_word(&zero)).unwrap(), zero);
        let mut full = BitVec::zeros(10);
        for i in 0..10 {
            full.set(i, true);
        }
        assert_eq!(parse_word(&write_word(&full)).unwrap(), full);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_word("").is_err());
        assert!(parse_word("word").is_err());
        assert!(parse_word("word ten [ 1 ]").is_err());
        assert!(parse_word("word 5 [ 1, 1 ]").is_err());
        assert!(parse_word("word 5 1 2").is_err());
        assert!(parse_word("word 5 [ 0 ]\nword 5 [ 1 ]").is_err());
        assert_eq!(
            parse_word("word 5 [ 5 ]"),
            Err(WordError::PositionOutOfRange { position: 5, len: 5 })
        );
    }
}
