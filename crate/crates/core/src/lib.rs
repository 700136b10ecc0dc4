//! Information hiding by chaotic asynchronous Boolean iterations.
//!
//! A host is split into most significant, least significant and passive
//! coefficients. The least significant ones are iterated under a Boolean
//! *mode* `f_l: B^l -> B^l`, one component at a time, following a strategy
//! derived from a secret key and the message. The resulting configuration
//! replaces the original coefficients. Verification is non-blind: the checker
//! recomputes the expected coefficients from the original host.
//!
//! Besides the embedding pipeline the crate contains the analysis tooling
//! needed to certify a mode: the asynchronous iteration graph and its strong
//! connectivity, the exact Markov matrix of the uniform-strategy dynamics,
//! doubly stochastic and primitivity checks, mixing times and an empirical
//! chi-square uniformity experiment.

pub mod analysis;
pub mod bitcore;
pub mod dhci;
pub mod dynamics;
mod error;
pub mod markov;
pub mod media_io;
pub mod modes;
pub mod significance;
pub mod strategy;

pub use analysis::{chaos_security_verdict, full_report, uniformity_experiment, SecurityReport};
pub use bitcore::{BitStream, Configuration};
pub use dhci::{compute_watermark, dhci_check, dhci_embed, CheckOutcome, EmbeddingParams};
pub use dynamics::{build_iteration_graph, component_update, iterate, BooleanMap, IterationGraph};
pub use error::{Error, Result};
pub use markov::{build_markov, DistributionVector, MarkovMatrix};
pub use media_io::{GrayImage, PgmError};
pub use modes::{generate_valid_mode, negation_mode, ModeInstance, ModeSpec};
pub use significance::{decompose, recompose, DecomposedHost, SignificationFunction, Thresholds};
pub use strategy::{derive_seed, make_strategy, SecretKey, StrategyStream, Xorshift64Star};

/// Largest size for which graph and Markov analysis is supported (2^n x 2^n states).
pub const MAX_ANALYSIS_BITS: usize = 12;

/// Largest size for which a mode can be stored as a truth table.
pub const MAX_TABLE_BITS: usize = 24;
