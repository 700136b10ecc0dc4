//! Signification functions and the split of a host into most significant,
//! least significant and passive coefficients.
//!
//! Bit positions are 0-based; position 0 is the most significant bit of the
//! first byte. A position `k` is an MSC when `u^k >= M`, an LSC when
//! `u^k <= m`, passive otherwise.

use crate::bitcore::BitStream;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SignificationFunction {
    /// `u^k = 8 - (k mod 8)`: bit planes of 8-bit samples packed MSB first.
    Bitplane8,
    /// An explicit finite table, `u^k = values[k]`.
    Explicit(Vec<f64>),
}

impl SignificationFunction {
    pub fn value(&self, k: usize) -> Option<f64> {
        match self {
            SignificationFunction::Bitplane8 => Some((8 - (k % 8)) as f64),
            SignificationFunction::Explicit(values) => values.get(k).copied(),
        }
    }
}

/// The pair `(m, M)` with `m < M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    lsc_max: f64,
    msc_min: f64,
}

impl Thresholds {
    /// `lsc_max` is `m`, `msc_min` is `M`.
    pub fn new(lsc_max: f64, msc_min: f64) -> Result<Self> {
        if lsc_max.is_nan() || msc_min.is_nan() || lsc_max >= msc_min {
            return Err(Error::InvalidParameter(format!(
                "thresholds must satisfy m < M, got m = {lsc_max}, M = {msc_min}"
            )));
        }
        Ok(Self { lsc_max, msc_min })
    }

    pub fn lsc_max(&self) -> f64 {
        self.lsc_max
    }

    pub fn msc_min(&self) -> f64 {
        self.msc_min
    }
}

/// Index sets of the three coefficient classes, each strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Classification {
    pub msc: Vec<usize>,
    pub lsc: Vec<usize>,
    pub passive: Vec<usize>,
}

pub fn classify(
    u: &SignificationFunction,
    thresholds: Thresholds,
    total_bits: usize,
) -> Result<Classification> {
    let mut out = Classification::default();
    for k in 0..total_bits {
        let v = u.value(k).ok_or_else(|| {
            Error::InvalidParameter(format!("signification function undefined at position {k}"))
        })?;
        if v >= thresholds.msc_min {
            out.msc.push(k);
        } else if v <= thresholds.lsc_max {
            out.lsc.push(k);
        } else {
            out.passive.push(k);
        }
    }
    debug_assert_eq!(out.msc.len() + out.lsc.len() + out.passive.len(), total_bits);
    Ok(out)
}

/// `(u_M, u_m, u_p, phi_M, phi_m, phi_p)` plus the host length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposedHost {
    pub msc: Vec<usize>,
    pub lsc: Vec<usize>,
    pub passive: Vec<usize>,
    pub msc_bits: Vec<bool>,
    pub lsc_bits: Vec<bool>,
    pub passive_bits: Vec<bool>,
    pub total_bits: usize,
}

impl DecomposedHost {
    /// Checks that the index sets partition `0..total_bits` and that every
    /// index set matches its bit vector in length.
    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("msc", &self.msc, &self.msc_bits),
            ("lsc", &self.lsc, &self.lsc_bits),
            ("passive", &self.passive, &self.passive_bits),
        ];
        let mut seen = vec![false; self.total_bits];
        for (name, indices, bits) in pairs {
            if indices.len() != bits.len() {
                return Err(Error::Structure(format!(
                    "{name}: {} indices but {} bits",
                    indices.len(),
                    bits.len()
                )));
            }
            for &k in indices {
                match seen.get_mut(k) {
                    None => {
                        return Err(Error::Structure(format!(
                            "{name}: position {k} beyond host length {}",
                            self.total_bits
                        )))
                    }
                    Some(true) => {
                        return Err(Error::Structure(format!("position {k} appears twice")))
                    }
                    Some(slot) => *slot = true,
                }
            }
        }
        if let Some(k) = seen.iter().position(|&s| !s) {
            return Err(Error::Structure(format!("position {k} belongs to no class")));
        }
        Ok(())
    }
}

pub fn decompose(
    x: &BitStream,
    u: &SignificationFunction,
    thresholds: Thresholds,
) -> Result<DecomposedHost> {
    let classes = classify(u, thresholds, x.len())?;
    let read = |indices: &[usize]| indices.iter().map(|&k| x.bits()[k]).collect::<Vec<_>>();
    Ok(DecomposedHost {
        msc_bits: read(&classes.msc),
        lsc_bits: read(&classes.lsc),
        passive_bits: read(&classes.passive),
        msc: classes.msc,
        lsc: classes.lsc,
        passive: classes.passive,
        total_bits: x.len(),
    })
}

pub fn recompose(d: &DecomposedHost) -> Result<BitStream> {
    d.validate()?;
    let mut bits = vec![false; d.total_bits];
    for (indices, values) in
        [(&d.msc, &d.msc_bits), (&d.lsc, &d.lsc_bits), (&d.passive, &d.passive_bits)]
    {
        for (&k, &b) in indices.iter().zip(values) {
            bits[k] = b;
        }
    }
    Ok(BitStream::new(bits))
}

/// Recomposes the host with `w` in place of its least significant
/// coefficients.
pub fn embed_coefficients(d: &DecomposedHost, w: &[bool]) -> Result<BitStream> {
    if w.len() != d.lsc.len() {
        return Err(Error::LengthMismatch { expected: d.lsc.len(), actual: w.len() });
    }
    let replaced = DecomposedHost { lsc_bits: w.to_vec(), ..d.clone() };
    recompose(&replaced)
}
