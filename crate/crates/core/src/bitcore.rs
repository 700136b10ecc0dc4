//! Bit-level configurations and bit streams.
//!
//! Convention used throughout the crate: component `x_1` of a configuration
//! is the least significant bit of its decimal index, so
//! `deci(x) = sum x_i * 2^(i-1)`. Truth tables, Markov indices and strategy
//! indices all follow it.

use crate::error::{Error, Result};

/// A state of an `l`-component Boolean system. Components are addressed
/// 1-based, as `x_1 .. x_l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    bits: Vec<bool>,
}

impl Configuration {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![false; len])
    }

    /// Builds a configuration from 0/1 integers, mostly handy in tests.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        Self::new(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.bits.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.bits.len() });
        }
        Ok(())
    }

    /// Component `x_i`, 1-based.
    pub fn get(&self, i: usize) -> Result<bool> {
        self.check_index(i)?;
        Ok(self.bits[i - 1])
    }

    pub(crate) fn set_unchecked(&mut self, i: usize, value: bool) {
        self.bits[i - 1] = value;
    }

    /// Decimal index of the configuration.
    ///
    /// # Panics
    ///
    /// Panics if the configuration is longer than 64 bits.
    pub fn deci(&self) -> u64 {
        assert!(self.bits.len() <= 64, "deci is limited to 64-bit configurations");
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    /// Inverse of [`Configuration::deci`].
    pub fn undeci(value: u64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyConfiguration);
        }
        if len > 64 {
            return Err(Error::Capacity { n: len, limit: 64 });
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::ValueOutOfRange { value, bits: len });
        }
        Ok(Self { bits: (0..len).map(|i| (value >> i) & 1 == 1).collect() })
    }

    /// Returns a copy with component `i` complemented.
    pub fn flip(&self, i: usize) -> Result<Self> {
        let mut out = self.clone();
        out.flip_in_place(i)?;
        Ok(out)
    }

    pub fn flip_in_place(&mut self, i: usize) -> Result<()> {
        self.check_index(i)?;
        self.bits[i - 1] = !self.bits[i - 1];
        Ok(())
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
            + self.bits.len().abs_diff(other.bits.len())
    }
}

/// Free-function form of [`Configuration::deci`].
pub fn deci(x: &Configuration) -> u64 {
    x.deci()
}

/// Free-function form of [`Configuration::undeci`].
pub fn undeci(value: u64, len: usize) -> Result<Configuration> {
    Configuration::undeci(value, len)
}

/// A finite bit sequence indexed from 0: hosts, messages and marked media
/// before decomposition. Bytes are unpacked most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitStream {
    bits: Vec<bool>,
}

impl BitStream {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let bits = bytes
            .iter()
            .flat_map(|&byte| (0..8).rev().map(move |shift| (byte >> shift) & 1 == 1))
            .collect();
        Self { bits }
    }

    /// Packs 8 bits per byte, first bit most significant, zero-padding the
    /// last byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn get(&self, k: usize) -> Option<bool> {
        self.bits.get(k).copied()
    }
}

impl From<Vec<bool>> for BitStream {
    fn from(bits: Vec<bool>) -> Self {
        Self::new(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn deci_examples() {
        assert_eq!(Configuration::from_bits(&[0, 0]).unwrap().deci(), 0);
        assert_eq!(Configuration::from_bits(&[1, 0]).unwrap().deci(), 1);
        assert_eq!(Configuration::from_bits(&[1, 1, 0, 1]).unwrap().deci(), 11);
    }

    #[test]
    fn undeci_examples() {
        assert_eq!(undeci(0, 3).unwrap(), Configuration::from_bits(&[0, 0, 0]).unwrap());
        assert_eq!(undeci(1, 3).unwrap(), Configuration::from_bits(&[1, 0, 0]).unwrap());
        assert_eq!(undeci(11, 4).unwrap(), Configuration::from_bits(&[1, 1, 0, 1]).unwrap());
    }

    #[test]
    fn undeci_rejects_out_of_range() {
        assert!(matches!(undeci(8, 3), Err(Error::ValueOutOfRange { value: 8, bits: 3 })));
        assert!(matches!(undeci(0, 0), Err(Error::EmptyConfiguration)));
        assert!(undeci(u64::MAX, 64).is_ok());
    }

    #[test]
    fn flip_examples() {
        let x = Configuration::from_bits(&[0, 0]).unwrap();
        assert_eq!(x.flip(1).unwrap(), Configuration::from_bits(&[1, 0]).unwrap());
        let x = Configuration::from_bits(&[1, 1]).unwrap();
        assert_eq!(x.flip(2).unwrap(), Configuration::from_bits(&[1, 0]).unwrap());
        let x = Configuration::from_bits(&[1, 0, 1]).unwrap();
        assert_eq!(x.flip(2).unwrap().flip(2).unwrap(), x);
    }

    #[test]
    fn flip_index_bounds() {
        let x = Configuration::from_bits(&[1, 0, 1]).unwrap();
        assert!(matches!(x.flip(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(x.flip(4), Err(Error::IndexOutOfRange { index: 4, len: 3 })));
    }

    #[test]
    fn empty_configuration_rejected() {
        assert!(matches!(Configuration::new(vec![]), Err(Error::EmptyConfiguration)));
    }

    #[test]
    fn deci_undeci_exhaustive_up_to_12() {
        for l in 1..=12usize {
            for i in 0..(1u64 << l) {
                let x = undeci(i, l).unwrap();
                assert_eq!(x.len(), l);
                assert_eq!(x.deci(), i);
                assert_eq!(undeci(x.deci(), l).unwrap(), x);
            }
        }
    }

    #[test]
    fn bitstream_byte_order() {
        let s = BitStream::from_bytes(&[0x80, 0x03]);
        assert_eq!(s.len(), 16);
        assert!(s.bits()[0]);
        assert!(s.bits()[14] && s.bits()[15]);
        assert_eq!(s.to_bytes(), vec![0x80, 0x03]);
        // partial trailing byte is zero padded
        assert_eq!(BitStream::new(vec![true, false, true]).to_bytes(), vec![0xA0]);
    }

    proptest! {
        #[test]
        fn flip_changes_exactly_one_bit(bits in prop::collection::vec(any::<bool>(), 1..40), pick in any::<prop::sample::Index>()) {
            let x = Configuration::new(bits).unwrap();
            let i = pick.index(x.len()) + 1;
            let y = x.flip(i).unwrap();
            prop_assert_eq!(x.hamming_distance(&y), 1);
            prop_assert_eq!(y.flip(i).unwrap(), x);
        }

        #[test]
        fn bytes_round_trip(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
            let s = BitStream::from_bytes(&bytes);
            prop_assert_eq!(s.len(), 8 * bytes.len());
            prop_assert_eq!(s.to_bytes(), bytes);
        }
    }
}
