//! Concrete modes and their persistence.
//!
//! A mode assigns a Boolean map `f_n` to every size `n`. [`ModeSpec`] is the
//! family; [`ModeInstance`] is one member stored as a truth table. The XOR
//! family `f_k(x) = x_k XOR g_k(x without x_k)` is the constructive source of
//! modes with a doubly stochastic Markov matrix: for each direction `k` the
//! one-step map `F_f(k, .)` is a bijection, so the matrix is an average of
//! permutation matrices.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitcore::Configuration;
use crate::dynamics::{build_iteration_graph, BooleanMap};
use crate::error::{Error, Result};
use crate::markov::build_markov;
use crate::strategy::Xorshift64Star;
use crate::{MAX_ANALYSIS_BITS, MAX_TABLE_BITS};

/// `f_n: B^n -> B^n` as a truth table: entry `j` is `deci(f(undeci(j, n)))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeInstance {
    n: usize,
    truth_table: Vec<u32>,
}

impl ModeInstance {
    pub fn from_table(n: usize, truth_table: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyConfiguration);
        }
        if n > MAX_TABLE_BITS {
            return Err(Error::Capacity { n, limit: MAX_TABLE_BITS });
        }
        if truth_table.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, actual: truth_table.len() });
        }
        if let Some(&bad) = truth_table.iter().find(|&&v| (v as u64) >> n != 0) {
            return Err(Error::ValueOutOfRange { value: bad as u64, bits: n });
        }
        Ok(Self { n, truth_table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truth_table(&self) -> &[u32] {
        &self.truth_table
    }

    /// `deci(f(undeci(x)))`.
    pub fn image(&self, x: u64) -> u64 {
        self.truth_table[x as usize] as u64
    }

    pub fn to_json(&self) -> String {
        let file = ModeFile { n: self.n, truth_table: self.truth_table.iter().map(|&v| v as u64).collect() };
        serde_json::to_string(&file).expect("mode file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModeFile =
            serde_json::from_str(text).map_err(|e| Error::ModeFormat(e.to_string()))?;
        file.into_instance()
    }
}

impl BooleanMap for ModeInstance {
    fn dimension(&self) -> usize {
        self.n
    }

    fn component(&self, k: usize, x: &Configuration) -> bool {
        (self.image(x.deci()) >> (k - 1)) & 1 == 1
    }

    fn step_index(&self, k: usize, x: u64) -> u64 {
        let mask = 1u64 << (k - 1);
        (x & !mask) | (self.image(x) & mask)
    }
}

/// The negation mode at size `n`: every component is complemented.
pub fn negation_mode(n: usize) -> Result<ModeInstance> {
    check_table_size(n)?;
    let top = (1u32 << n) - 1;
    ModeInstance::from_table(n, (0..=top).map(|j| top - j).collect())
}

/// `f(x) = x`; every configuration is a fixed point.
pub fn identity_mode(n: usize) -> Result<ModeInstance> {
    check_table_size(n)?;
    ModeInstance::from_table(n, (0..1u32 << n).collect())
}

/// `f(x) = 0` for every `x`.
pub fn constant_zero_mode(n: usize) -> Result<ModeInstance> {
    check_table_size(n)?;
    ModeInstance::from_table(n, vec![0; 1 << n])
}

fn check_table_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    if n > MAX_TABLE_BITS {
        return Err(Error::Capacity { n, limit: MAX_TABLE_BITS });
    }
    Ok(())
}

/// Index of `x` with bit `k` (1-based) deleted, remaining bits kept in order.
fn without_bit(x: u64, k: usize) -> usize {
    let low = x & ((1u64 << (k - 1)) - 1);
    let high = (x >> k) << (k - 1);
    (low | high) as usize
}

/// Instantiates `f_k(x) = x_k XOR g_k(x_{-k})` from `n` tables of length
/// `2^(n-1)`. Each table is indexed by `deci` of `x` with bit `k` removed.
pub fn instantiate_xor_mode(g: &[Vec<bool>], n: usize) -> Result<ModeInstance> {
    check_table_size(n)?;
    if g.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: g.len() });
    }
    let half = 1usize << (n - 1);
    if let Some(bad) = g.iter().find(|t| t.len() != half) {
        return Err(Error::LengthMismatch { expected: half, actual: bad.len() });
    }
    let table = (0..1u64 << n)
        .map(|x| {
            (1..=n).fold(0u32, |acc, k| {
                let bit = ((x >> (k - 1)) & 1 == 1) ^ g[k - 1][without_bit(x, k)];
                acc | ((bit as u32) << (k - 1))
            })
        })
        .collect();
    ModeInstance::from_table(n, table)
}

/// Recovers the XOR-family tables of `f`, if `f` belongs to the family.
///
/// Membership means `f_k(x) XOR x_k` does not depend on `x_k` for any `k`.
pub fn xor_tables(f: &ModeInstance) -> Option<Vec<Vec<bool>>> {
    let n = f.n();
    let mut tables = vec![vec![false; 1 << (n - 1)]; n];
    for x in 0..1u64 << n {
        for k in 1..=n {
            let g = (((f.image(x) ^ x) >> (k - 1)) & 1) == 1;
            let partner = x ^ (1 << (k - 1));
            let g_partner = (((f.image(partner) ^ partner) >> (k - 1)) & 1) == 1;
            if g != g_partner {
                return None;
            }
            tables[k - 1][without_bit(x, k)] = g;
        }
    }
    Some(tables)
}

/// A mode produced by [`generate_valid_mode`], with the number of candidates
/// drawn to find it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedMode {
    pub mode: ModeInstance,
    pub tables: Vec<Vec<bool>>,
    pub tries: usize,
}

/// Rejection sampling over the XOR family.
///
/// Table bits are the top bits of successive words of a [`Xorshift64Star`]
/// seeded with `seed`. A candidate is accepted when its iteration graph is
/// strongly connected and its Markov matrix is doubly stochastic and
/// primitive.
pub fn generate_valid_mode(n: usize, seed: u64, max_tries: usize) -> Result<GeneratedMode> {
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    if n > MAX_ANALYSIS_BITS {
        return Err(Error::Capacity { n, limit: MAX_ANALYSIS_BITS });
    }
    let mut rng = Xorshift64Star::new(seed);
    let half = 1usize << (n - 1);
    for tries in 1..=max_tries {
        let tables: Vec<Vec<bool>> = (0..n)
            .map(|_| (0..half).map(|_| rng.next_u64() >> 63 == 1).collect())
            .collect();
        let mode = instantiate_xor_mode(&tables, n)?;
        if !build_iteration_graph(&mode)?.is_strongly_connected() {
            continue;
        }
        let markov = build_markov(&mode)?;
        if !markov.is_doubly_stochastic() {
            continue;
        }
        if markov.period_and_primitivity()?.primitive {
            return Ok(GeneratedMode { mode, tables, tries });
        }
    }
    Err(Error::GenerationFailed { tries: max_tries })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeFile {
    n: usize,
    truth_table: Vec<u64>,
}

impl ModeFile {
    fn into_instance(self) -> Result<ModeInstance> {
        check_table_size(self.n)?;
        if self.truth_table.len() != 1 << self.n {
            return Err(Error::LengthMismatch { expected: 1 << self.n, actual: self.truth_table.len() });
        }
        let mut table = Vec::with_capacity(self.truth_table.len());
        for v in self.truth_table {
            if v >> self.n != 0 {
                return Err(Error::ValueOutOfRange { value: v, bits: self.n });
            }
            table.push(v as u32);
        }
        ModeInstance::from_table(self.n, table)
    }
}

/// Writes `{"n": .., "truth_table": [..]}`.
pub fn save_mode(f: &ModeInstance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, f.to_json())?;
    Ok(())
}

pub fn load_mode(path: impl AsRef<Path>) -> Result<ModeInstance> {
    let text = fs::read_to_string(path)?;
    ModeInstance::from_json(&text)
}

/// A mode as a family over all sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModeSpec {
    /// Defined for every size; evaluated without a table so it scales to
    /// hosts with many thousands of coefficients.
    Negation,
    /// A single stored instance; only instantiable at its own size.
    TruthTable(ModeInstance),
    /// XOR-family tables `g_k`; only instantiable at `n = tables.len()`.
    XorFamily(Vec<Vec<bool>>),
}

impl ModeSpec {
    pub fn name(&self) -> String {
        match self {
            ModeSpec::Negation => "negation".to_string(),
            ModeSpec::TruthTable(f) => format!("truth-table(n={})", f.n()),
            ModeSpec::XorFamily(g) => format!("xor-family(n={})", g.len()),
        }
    }

    /// `f_l`.
    pub fn instantiate(&self, l: usize) -> Result<InstantiatedMode> {
        if l == 0 {
            return Err(Error::EmptyConfiguration);
        }
        match self {
            ModeSpec::Negation => Ok(InstantiatedMode::Negation(l)),
            ModeSpec::TruthTable(f) if f.n() == l => Ok(InstantiatedMode::Table(f.clone())),
            ModeSpec::TruthTable(f) => Err(Error::ModeSize { mode: f.n(), requested: l }),
            ModeSpec::XorFamily(g) if g.len() == l => {
                Ok(InstantiatedMode::Table(instantiate_xor_mode(g, l)?))
            }
            ModeSpec::XorFamily(g) => Err(Error::ModeSize { mode: g.len(), requested: l }),
        }
    }
}

/// A [`ModeSpec`] instantiated at a concrete size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstantiatedMode {
    Negation(usize),
    Table(ModeInstance),
}

impl BooleanMap for InstantiatedMode {
    fn dimension(&self) -> usize {
        match self {
            InstantiatedMode::Negation(n) => *n,
            InstantiatedMode::Table(f) => f.n(),
        }
    }

    fn component(&self, k: usize, x: &Configuration) -> bool {
        match self {
            InstantiatedMode::Negation(_) => !x.bits()[k - 1],
            InstantiatedMode::Table(f) => f.component(k, x),
        }
    }

    fn step_index(&self, k: usize, x: u64) -> u64 {
        match self {
            InstantiatedMode::Negation(_) => x ^ (1 << (k - 1)),
            InstantiatedMode::Table(f) => f.step_index(k, x),
        }
    }
}
