//! Security certification of a mode.
//!
//! Chaos-security reduces to strong connectivity of the iteration graph.
//! Stego-security is checked twice: structurally (strongly connected graph
//! and doubly stochastic Markov matrix) and empirically, by pushing uniform
//! samples through `q` iterations with a fixed strategy and running a
//! chi-square goodness-of-fit test against the uniform distribution.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bitcore::BitStream;
use crate::dynamics::{build_iteration_graph, BooleanMap};
use crate::error::{Error, Result};
use crate::markov::{build_markov, default_t_max, mixing_time};
use crate::strategy::{make_strategy, SecretKey, Xorshift64Star};
use crate::MAX_ANALYSIS_BITS;

/// Significance level of the uniformity test.
pub const ALPHA: f64 = 0.01;

/// Upper `alpha` quantile of the chi-square distribution with `dof` degrees
/// of freedom.
pub fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

/// Pearson statistic of `counts` against equal expected counts.
pub fn chi_square_statistic(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityResult {
    pub chi2: f64,
    pub dof: usize,
    pub critical_value: f64,
    pub pass: bool,
}

/// Draws `samples` uniform configurations from a generator seeded with
/// `sampler_seed`, iterates each `q` times along the strategy of
/// `(key, message)` and tests the histogram of results for uniformity at
/// level [`ALPHA`].
pub fn uniformity_experiment<F: BooleanMap + ?Sized>(
    mode: &F,
    key: &SecretKey,
    message: &BitStream,
    q: u64,
    samples: usize,
    sampler_seed: u64,
) -> Result<UniformityResult> {
    let l = mode.dimension();
    if l > MAX_ANALYSIS_BITS {
        return Err(Error::Capacity { n: l, limit: MAX_ANALYSIS_BITS });
    }
    let bins = 1usize << l;
    if samples < 10 * bins {
        return Err(Error::InvalidParameter(format!(
            "{samples} samples is below the minimum of {} for {bins} bins",
            10 * bins
        )));
    }
    let strategy: Vec<usize> = make_strategy(key, message, l)?.take(q as usize).collect();
    let mut sampler = Xorshift64Star::new(sampler_seed);
    let mut counts = vec![0u64; bins];
    for _ in 0..samples {
        let mut x = sampler.next_below(bins as u64);
        for &k in &strategy {
            x = mode.step_index(k, x);
        }
        counts[x as usize] += 1;
    }
    let chi2 = chi_square_statistic(&counts);
    let dof = bins - 1;
    let critical_value = chi_square_critical(dof, ALPHA);
    Ok(UniformityResult { chi2, dof, critical_value, pass: chi2 < critical_value })
}

/// Chaotic in the sense of Devaney iff the iteration graph is strongly
/// connected.
pub fn chaos_security_verdict<F: BooleanMap + ?Sized>(mode: &F) -> Result<bool> {
    Ok(build_iteration_graph(mode)?.is_strongly_connected())
}

/// Settings for [`full_report`].
#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub epsilon: f64,
    /// Defaults to `4^n`.
    pub t_max: Option<u64>,
    pub key: SecretKey,
    pub message: BitStream,
    pub q: u64,
    /// Defaults to `100 * 2^n`.
    pub samples: Option<usize>,
    pub sampler_seed: u64,
}

impl ReportConfig {
    pub fn new(key: SecretKey) -> Self {
        Self {
            epsilon: 0.01,
            t_max: None,
            key,
            message: BitStream::default(),
            q: crate::dhci::DEFAULT_Q,
            samples: None,
            sampler_seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityReport {
    pub mode: String,
    pub n: usize,
    pub strongly_connected: bool,
    pub doubly_stochastic: bool,
    /// `None` when the chain is not irreducible.
    pub period: Option<u64>,
    pub primitive: bool,
    pub epsilon: f64,
    pub t_max: u64,
    pub mixing_q: Option<u64>,
    pub final_tv: f64,
    pub chaos_secure: bool,
    pub stego_secure_hypotheses: bool,
    pub q: u64,
    pub samples: usize,
    pub chi2: f64,
    pub dof: usize,
    pub critical_value: f64,
    pub chi2_pass: bool,
}

impl SecurityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn full_report<F: BooleanMap + ?Sized>(
    mode: &F,
    label: &str,
    config: &ReportConfig,
) -> Result<SecurityReport> {
    let n = mode.dimension();
    let graph = build_iteration_graph(mode)?;
    let strongly_connected = graph.is_strongly_connected();
    let markov = build_markov(mode)?;
    let doubly_stochastic = markov.is_doubly_stochastic();
    let (period, primitive) = if strongly_connected {
        let p = markov.period_and_primitivity()?;
        (Some(p.period), p.primitive)
    } else {
        (None, false)
    };
    let t_max = config.t_max.unwrap_or_else(|| default_t_max(n));
    let mixing = mixing_time(&markov, config.epsilon, t_max)?;
    let samples = config.samples.unwrap_or(100 << n);
    let uniformity =
        uniformity_experiment(mode, &config.key, &config.message, config.q, samples, config.sampler_seed)?;
    Ok(SecurityReport {
        mode: label.to_string(),
        n,
        strongly_connected,
        doubly_stochastic,
        period,
        primitive,
        epsilon: config.epsilon,
        t_max,
        mixing_q: mixing.q,
        final_tv: mixing.final_tv,
        chaos_secure: strongly_connected,
        stego_secure_hypotheses: strongly_connected && doubly_stochastic,
        q: config.q,
        samples,
        chi2: uniformity.chi2,
        dof: uniformity.dof,
        critical_value: uniformity.critical_value,
        chi2_pass: uniformity.pass,
    })
}
