//! Keyed strategy adapters.
//!
//! A strategy is an infinite sequence of component indices in `1..=l`. It is
//! derived from the secret key and the message only, never from the cover.
//! The seed is FNV-1a over the key bytes followed by the packed message; the
//! indices come from xorshift64* with rejection sampling, which keeps them
//! exactly uniform on `1..=l`.

use crate::bitcore::BitStream;
use crate::error::{Error, Result};

const FNV_OFFSET_BASIS: u64 = 14695981039346656037;
const FNV_PRIME: u64 = 1099511628211;
const XORSHIFT_MULTIPLIER: u64 = 2685821657736338717;

/// The embedding key. Never empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SecretKey(Vec<u8>);

impl SecretKey {
    pub fn new(bytes: Vec<u8>) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(Self(bytes))
    }

    /// Parses hexadecimal bytes, e.g. `"00ff10"`.
    pub fn from_hex(text: &str) -> Result<Self> {
        let text = text.trim();
        let bytes = hex::decode(text)
            .map_err(|e| Error::InvalidParameter(format!("invalid hex key {text:?}: {e}")))?;
        Self::new(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SecretKey({} bytes)", self.0.len())
    }
}

/// 64-bit FNV-1a, with a zero result replaced by the offset basis.
pub fn fnv1a64(chunks: &[&[u8]]) -> u64 {
    let hash = chunks
        .iter()
        .flat_map(|c| c.iter())
        .fold(FNV_OFFSET_BASIS, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME));
    if hash == 0 {
        FNV_OFFSET_BASIS
    } else {
        hash
    }
}

/// Seed of the strategy for `(key, message)`.
pub fn derive_seed(key: &SecretKey, message: &BitStream) -> u64 {
    fnv1a64(&[key.as_bytes(), &message.to_bytes()])
}

/// xorshift64* (shifts 12, 25, 27), output multiplied by
/// 2685821657736338717. The state is never zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xorshift64Star {
    state: u64,
}

impl Xorshift64Star {
    /// A zero seed is replaced by the FNV offset basis.
    pub fn new(seed: u64) -> Self {
        Self { state: if seed == 0 { FNV_OFFSET_BASIS } else { seed } }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(XORSHIFT_MULTIPLIER)
    }

    /// Uniform value in `0..bound` by rejection: words at or above
    /// `2^64 - (2^64 mod bound)` are discarded.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        // 2^64 mod bound, computed without 128-bit arithmetic
        let excess = (u64::MAX % bound + 1) % bound;
        loop {
            let w = self.next_u64();
            if excess == 0 || w < excess.wrapping_neg() {
                return w % bound;
            }
        }
    }
}

/// A replayable strategy `S_y` with terms in `1..=l`. Iterating it never
/// ends.
#[derive(Debug, Clone)]
pub struct StrategyStream {
    rng: Xorshift64Star,
    l: usize,
    emitted: u64,
}

impl StrategyStream {
    pub fn from_seed(seed: u64, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("strategy range must be at least 1".into()));
        }
        Ok(Self { rng: Xorshift64Star::new(seed), l, emitted: 0 })
    }

    pub fn range(&self) -> usize {
        self.l
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn next_index(&mut self) -> usize {
        self.emitted += 1;
        self.rng.next_below(self.l as u64) as usize + 1
    }
}

impl Iterator for StrategyStream {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        Some(self.next_index())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (usize::MAX, None)
    }
}

/// The strategy adapter instantiated with `(key, message)` at range `l`.
pub fn make_strategy(key: &SecretKey, message: &BitStream, l: usize) -> Result<StrategyStream> {
    StrategyStream::from_seed(derive_seed(key, message), l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(bytes: &[u8]) -> SecretKey {
        SecretKey::new(bytes.to_vec()).unwrap()
    }

    #[test]
    fn seed_vectors() {
        assert_eq!(derive_seed(&key(&[0x61]), &BitStream::default()), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(&[]), 0xcbf29ce484222325);
        let msg = BitStream::from_bytes(b"hello");
        assert_eq!(derive_seed(&key(b"k"), &msg), derive_seed(&key(b"k"), &msg));
        // key and message bytes are absorbed as one stream
        assert_eq!(derive_seed(&key(b"ab"), &BitStream::from_bytes(b"c")), fnv1a64(&[b"abc"]));
    }

    #[test]
    fn message_bits_are_zero_padded() {
        let three = BitStream::new(vec![true, false, true]);
        assert_eq!(derive_seed(&key(b"k"), &three), fnv1a64(&[b"k", &[0xA0]]));
    }

    #[test]
    fn empty_key_rejected() {
        assert!(matches!(SecretKey::new(vec![]), Err(Error::EmptyKey)));
        assert!(matches!(SecretKey::from_hex(""), Err(Error::EmptyKey)));
        assert!(SecretKey::from_hex("abc").is_err());
        assert!(SecretKey::from_hex("zz").is_err());
        assert_eq!(SecretKey::from_hex("00ff10").unwrap().as_bytes(), &[0x00, 0xff, 0x10]);
    }

    #[test]
    fn raw_word_from_state_one() {
        // straight-line evaluation of the recurrence
        let mut x: u64 = 1;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        let expected = x.wrapping_mul(2685821657736338717);
        assert_eq!(expected, 0x47e4ce4b896cdd1d);
        assert_eq!(Xorshift64Star::new(1).next_u64(), expected);
    }

    #[test]
    fn regression_vector_seed_one() {
        let s = StrategyStream::from_seed(1, 4).unwrap();
        assert_eq!(s.take(8).collect::<Vec<_>>(), vec![2, 2, 4, 2, 1, 2, 2, 2]);
        let s = StrategyStream::from_seed(1, 3).unwrap();
        assert_eq!(s.take(8).collect::<Vec<_>>(), vec![2, 3, 2, 1, 3, 2, 1, 2]);
    }

    #[test]
    fn single_index_range() {
        for seed in [0, 1, 42, u64::MAX] {
            let s = StrategyStream::from_seed(seed, 1).unwrap();
            assert!(s.take(100).all(|i| i == 1));
        }
        assert!(StrategyStream::from_seed(1, 0).is_err());
    }

    #[test]
    fn rejection_discards_top_words() {
        // bound 3: 2^64 mod 3 = 1, so only u64::MAX is rejected
        let mut rng = Xorshift64Star::new(7);
        for _ in 0..1000 {
            assert!(rng.next_below(3) < 3);
        }
        // powers of two never reject, so the raw stream is consumed one word per draw
        let mut a = Xorshift64Star::new(9);
        let mut b = Xorshift64Star::new(9);
        for _ in 0..100 {
            assert_eq!(a.next_below(256), b.next_u64() % 256);
        }
    }

    #[test]
    fn keys_give_different_strategies() {
        let msg = BitStream::from_bytes(b"message");
        let a: Vec<_> = make_strategy(&key(b"alpha"), &msg, 8).unwrap().take(64).collect();
        let b: Vec<_> = make_strategy(&key(b"bravo"), &msg, 8).unwrap().take(64).collect();
        assert_ne!(a, b);
        let a2: Vec<_> = make_strategy(&key(b"alpha"), &msg, 8).unwrap().take(1000).collect();
        let a3: Vec<_> = make_strategy(&key(b"alpha"), &msg, 8).unwrap().take(1000).collect();
        assert_eq!(a2, a3);
        assert_eq!(&a2[..64], &a[..]);
    }

    #[test]
    fn range_contract() {
        let s = make_strategy(&key(b"k"), &BitStream::default(), 3).unwrap();
        assert!(s.take(100_000).all(|i| (1..=3).contains(&i)));
    }

    #[test]
    fn chi_square_uniformity() {
        // 8 bins, 80000 draws, critical value 18.48 (7 dof, alpha 0.01)
        let passing = (1..=20u64)
            .filter(|&seed| {
                let mut counts = [0u64; 8];
                for i in StrategyStream::from_seed(seed, 8).unwrap().take(80_000) {
                    counts[i - 1] += 1;
                }
                let chi2: f64 =
                    counts.iter().map(|&c| (c as f64 - 10_000.0).powi(2) / 10_000.0).sum();
                chi2 < 18.48
            })
            .count();
        assert!(passing >= 18, "only {passing} of 20 seeds passed");
    }
}
