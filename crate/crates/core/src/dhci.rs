//! Dissimulation and non-blind verification.
//!
//! Embedding decomposes the host, iterates the mode `q` times on the least
//! significant coefficients along the strategy derived from `(key, message)`
//! and writes the final configuration back. Checking recomputes that
//! configuration from the original host and compares it with the candidate's
//! least significant coefficients.

use crate::bitcore::{BitStream, Configuration};
use crate::dynamics::iterate;
use crate::error::{Error, Result};
use crate::modes::ModeSpec;
use crate::significance::{decompose, embed_coefficients, DecomposedHost, SignificationFunction, Thresholds};
use crate::strategy::{make_strategy, SecretKey};

pub const DEFAULT_Q: u64 = 17;
pub const DEFAULT_TAU: f64 = 0.95;

#[derive(Debug, Clone)]
pub struct EmbeddingParams {
    pub mode: ModeSpec,
    pub signification: SignificationFunction,
    pub thresholds: Thresholds,
    pub q: u64,
    pub key: SecretKey,
    pub tau: f64,
}

impl EmbeddingParams {
    pub fn new(
        mode: ModeSpec,
        signification: SignificationFunction,
        thresholds: Thresholds,
        q: u64,
        key: SecretKey,
        tau: f64,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("q must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidParameter(format!("tau must lie in [0, 1], got {tau}")));
        }
        Ok(Self { mode, signification, thresholds, q, key, tau })
    }

    /// Bit-plane signification with `m = 2`, `M = 6`, `q = 17`, `tau = 0.95`.
    pub fn with_defaults(mode: ModeSpec, key: SecretKey) -> Self {
        Self {
            mode,
            signification: SignificationFunction::Bitplane8,
            thresholds: Thresholds::new(2.0, 6.0).expect("2 < 6"),
            q: DEFAULT_Q,
            key,
            tau: DEFAULT_TAU,
        }
    }

    pub fn decompose(&self, x: &BitStream) -> Result<DecomposedHost> {
        decompose(x, &self.signification, self.thresholds)
    }
}

fn watermark_for(d: &DecomposedHost, y: &BitStream, p: &EmbeddingParams) -> Result<Vec<bool>> {
    let l = d.lsc.len();
    if l == 0 {
        return Err(Error::EmptyLsc);
    }
    let f = p.mode.instantiate(l)?;
    let strategy = make_strategy(&p.key, y, l)?;
    let start = Configuration::new(d.lsc_bits.clone())?;
    Ok(iterate(&f, strategy, &start, p.q)?.into_bits())
}

/// The `q`-th iterate `y_hat` for host `x` and message `y`.
pub fn compute_watermark(x: &BitStream, y: &BitStream, p: &EmbeddingParams) -> Result<Vec<bool>> {
    watermark_for(&p.decompose(x)?, y, p)
}

/// Embeds `y` into `x`. The output has the same length as `x` and differs
/// from it only at least significant positions.
pub fn dhci_embed(x: &BitStream, y: &BitStream, p: &EmbeddingParams) -> Result<BitStream> {
    let d = p.decompose(x)?;
    let watermark = watermark_for(&d, y, p)?;
    embed_coefficients(&d, &watermark)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOutcome {
    /// Fraction of least significant positions agreeing with `y_hat`.
    pub similarity: f64,
    pub marked: bool,
    /// Number of least significant coefficients compared.
    pub lsc_count: usize,
}

/// Decides whether `z` carries `y`, given the original host `x`.
pub fn dhci_check(
    x: &BitStream,
    z: &BitStream,
    y: &BitStream,
    p: &EmbeddingParams,
) -> Result<CheckOutcome> {
    if z.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: z.len() });
    }
    let d = p.decompose(x)?;
    let expected = watermark_for(&d, y, p)?;
    let agree = d
        .lsc
        .iter()
        .zip(&expected)
        .filter(|(&k, &bit)| z.bits()[k] == bit)
        .count();
    let similarity = agree as f64 / expected.len() as f64;
    Ok(CheckOutcome { similarity, marked: similarity >= p.tau, lsc_count: expected.len() })
}
