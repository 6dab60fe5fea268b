//! Level-wise enumeration of theories by exact complexity.
//!
//! Level `q` holds every theory whose weights sum to exactly `q`. Levels are
//! built in increasing `q`: singletons are seeded directly from the
//! alphabet, and every composite theory at level `q` is the disjoint union of
//! a theory from level `m` and one from level `l` with `l + m = q`, `l <= m`.
//! The pair `(l, m)` marches from `(1, q - 1)` towards the middle.
//!
//! Internally a theory is a bit mask over alphabet positions, so the
//! enumerator handles alphabets of at most [`MAX_SYMBOLS`] symbols.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use indexmap::IndexSet;
use rayon::prelude::*;
use thiserror::Error;

use crate::alphabet::{effective_max_q, ComplexityBudget, SymbolId, Theory, WeightedAlphabet};
use crate::validation::{normalize_records, ValidationError, ValidationRecord, Validator};

pub const MAX_SYMBOLS: usize = 64;

/// Largest alphabet the powerset oracle accepts.
pub const ORACLE_MAX_SYMBOLS: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnumerationError {
    #[error("level {q} is outside 1..={max_q}")]
    LevelOutOfRange { q: u32, max_q: u32 },
    #[error("alphabet has {n} symbols; at most {max} are supported here")]
    AlphabetTooLarge { n: usize, max: usize },
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("worker pool: {0}")]
    Workers(String),
    #[error("validating {theory} at q={q}: {source}")]
    Validation {
        q: u32,
        theory: Theory,
        source: ValidationError,
    },
}

/// All theories of each exact complexity `1..=max_q`.
#[derive(Debug, Clone)]
pub struct TheoryLevels {
    alphabet: WeightedAlphabet,
    budget: ComplexityBudget,
    // levels[q - 1]; insertion order is deterministic for a fixed input
    levels: Vec<IndexSet<u64>>,
}

impl TheoryLevels {
    fn empty(alphabet: &WeightedAlphabet, budget: ComplexityBudget) -> Result<Self, EnumerationError> {
        if alphabet.len() > MAX_SYMBOLS {
            return Err(EnumerationError::AlphabetTooLarge {
                n: alphabet.len(),
                max: MAX_SYMBOLS,
            });
        }
        Ok(TheoryLevels {
            alphabet: alphabet.clone(),
            budget,
            levels: vec![IndexSet::new(); budget.max_q as usize],
        })
    }

    pub fn alphabet(&self) -> &WeightedAlphabet {
        &self.alphabet
    }

    pub fn budget(&self) -> ComplexityBudget {
        self.budget
    }

    pub fn max_q(&self) -> u32 {
        self.budget.max_q
    }

    fn slot(&self, q: u32) -> Result<usize, EnumerationError> {
        if q == 0 || q > self.max_q() {
            return Err(EnumerationError::LevelOutOfRange {
                q,
                max_q: self.max_q(),
            });
        }
        Ok(q as usize - 1)
    }

    /// Raw member masks of level `q` in insertion order. Bit `i` stands for
    /// the alphabet's `i`-th entry.
    pub fn masks(&self, q: u32) -> Result<&IndexSet<u64>, EnumerationError> {
        Ok(&self.levels[self.slot(q)?])
    }

    pub fn level_len(&self, q: u32) -> usize {
        self.masks(q).map_or(0, IndexSet::len)
    }

    /// Stored count per level, `q = 1..=max_q`.
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(IndexSet::len).collect()
    }

    pub fn total(&self) -> usize {
        self.levels.iter().map(IndexSet::len).sum()
    }

    pub fn theory_of(&self, mask: u64) -> Theory {
        (0..self.alphabet.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| SymbolId::clone(self.alphabet.symbol(i)))
            .collect()
    }

    pub fn mask_of(&self, theory: &Theory) -> Result<u64, EnumerationError> {
        theory.members().try_fold(0u64, |acc, s| {
            self.alphabet
                .position(s)
                .map(|i| acc | 1 << i)
                .ok_or_else(|| EnumerationError::UnknownSymbol(s.to_string()))
        })
    }

    /// Level `q` in insertion order.
    pub fn theories(&self, q: u32) -> Vec<Theory> {
        self.masks(q)
            .map(|m| m.iter().map(|&x| self.theory_of(x)).collect())
            .unwrap_or_default()
    }

    /// Level `q` in canonical order.
    pub fn sorted_theories(&self, q: u32) -> Vec<Theory> {
        self.theory_set(q).into_iter().collect()
    }

    pub fn theory_set(&self, q: u32) -> BTreeSet<Theory> {
        self.theories(q).into_iter().collect()
    }

    pub fn contains(&self, q: u32, theory: &Theory) -> bool {
        match (self.masks(q), self.mask_of(theory)) {
            (Ok(level), Ok(mask)) => level.contains(&mask),
            _ => false,
        }
    }

    /// First level at which `self` and `other` hold different theory sets,
    /// compared by symbol names.
    pub fn first_difference(&self, other: &TheoryLevels) -> Option<LevelDifference> {
        let top = self.max_q().max(other.max_q());
        (1..=top).find_map(|q| {
            let left = self.theory_set(q);
            let right = other.theory_set(q);
            (left != right).then(|| LevelDifference {
                q,
                only_left: left.difference(&right).cloned().collect(),
                only_right: right.difference(&left).cloned().collect(),
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDifference {
    pub q: u32,
    pub only_left: Vec<Theory>,
    pub only_right: Vec<Theory>,
}

impl fmt::Display for LevelDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Theory]| v.iter().map(Theory::to_string).collect::<Vec<_>>().join(",");
        write!(
            f,
            "q={}: only in enumeration [{}]; only in oracle [{}]",
            self.q,
            show(&self.only_left),
            show(&self.only_right)
        )
    }
}

/// Unions formed from one `(l, m)` pair of levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairWork {
    pub l: u32,
    pub m: u32,
    pub unions: u64,
}

/// Counters for building one level.
///
/// `stored = seeded + disjoint_kept - duplicates_rejected`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EnumerationStats {
    pub q: u32,
    pub seeded: u64,
    pub unions_attempted: u64,
    pub disjoint_kept: u64,
    pub duplicates_rejected: u64,
    pub stored: u64,
    pub pair_work: Vec<PairWork>,
    pub elapsed: Duration,
}

impl EnumerationStats {
    /// Same counters, ignoring wall time.
    pub fn same_counts(&self, other: &EnumerationStats) -> bool {
        EnumerationStats {
            elapsed: Duration::ZERO,
            ..self.clone()
        } == EnumerationStats {
            elapsed: Duration::ZERO,
            ..other.clone()
        }
    }
}

/// Seeds level `w` with the singleton of every symbol of weight `w <= max_q`.
pub fn seed_singletons(
    alphabet: &WeightedAlphabet,
    budget: ComplexityBudget,
) -> Result<TheoryLevels, EnumerationError> {
    let mut levels = TheoryLevels::empty(alphabet, budget)?;
    for (i, (_, weight)) in alphabet.entries().iter().enumerate() {
        if *weight <= budget.max_q {
            levels.levels[*weight as usize - 1].insert(1u64 << i);
        }
    }
    Ok(levels)
}

/// Completes level `q` sequentially. See [`Enumerator::squeeze_level`].
pub fn squeeze_level(levels: &mut TheoryLevels, q: u32) -> Result<EnumerationStats, EnumerationError> {
    Enumerator::sequential().squeeze_level(levels, q)
}

/// Seeds, squeezes and validates every level up to the effective cap,
/// single-threaded. See [`Enumerator::march`].
pub fn march<V: Validator + ?Sized>(
    alphabet: &WeightedAlphabet,
    max_comp: u32,
    validator: &V,
) -> Result<MarchOutput, EnumerationError> {
    Enumerator::sequential().march(alphabet, max_comp, validator)
}

#[derive(Debug, Clone)]
pub struct MarchOutput {
    pub levels: TheoryLevels,
    /// Accepted theories sorted by `(q, canonical theory)`.
    pub records: Vec<ValidationRecord>,
    pub stats: Vec<EnumerationStats>,
}

/// Runs level construction and validation on a fixed number of workers.
///
/// Results do not depend on the worker count: work is partitioned over the
/// larger level's theories and merged back in iteration order.
pub struct Enumerator {
    pool: Option<rayon::ThreadPool>,
}

impl Enumerator {
    pub fn sequential() -> Self {
        Enumerator { pool: None }
    }

    pub fn with_workers(workers: usize) -> Result<Self, EnumerationError> {
        if workers <= 1 {
            return Ok(Self::sequential());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| EnumerationError::Workers(e.to_string()))?;
        Ok(Enumerator { pool: Some(pool) })
    }

    pub fn workers(&self) -> usize {
        self.pool.as_ref().map_or(1, rayon::ThreadPool::current_num_threads)
    }

    /// Adds to level `q` every disjoint union of a level-`m` and a level-`l`
    /// theory with `l + m = q`, `1 <= l <= m`, skipping unions already
    /// present. Levels below `q` must be complete.
    pub fn squeeze_level(
        &self,
        levels: &mut TheoryLevels,
        q: u32,
    ) -> Result<EnumerationStats, EnumerationError> {
        let slot = levels.slot(q)?;
        let start = Instant::now();
        let (lower, upper) = levels.levels.split_at_mut(slot);
        let target = &mut upper[0];
        let mut stats = EnumerationStats {
            q,
            seeded: target.len() as u64,
            ..Default::default()
        };

        let (mut l, mut m) = (1u32, q - 1);
        while m >= l {
            let m_level = &lower[m as usize - 1];
            let l_level = &lower[l as usize - 1];
            let unions = (m_level.len() * l_level.len()) as u64;
            stats.unions_attempted += unions;
            stats.pair_work.push(PairWork { l, m, unions });

            for batch in self.disjoint_unions(m_level, l_level) {
                stats.disjoint_kept += batch.len() as u64;
                for mask in batch {
                    if !target.insert(mask) {
                        stats.duplicates_rejected += 1;
                    }
                }
            }
            m -= 1;
            l += 1;
        }

        stats.stored = target.len() as u64;
        stats.elapsed = start.elapsed();
        Ok(stats)
    }

    // Disjoint unions of every (x, y) in m_level × l_level, in x-major order,
    // split into contiguous batches.
    fn disjoint_unions(&self, m_level: &IndexSet<u64>, l_level: &IndexSet<u64>) -> Vec<Vec<u64>> {
        let unions_of = |x: u64| {
            l_level
                .iter()
                .filter(move |&&y| x & y == 0)
                .map(move |&y| x | y)
        };
        match &self.pool {
            None => vec![m_level.iter().flat_map(|&x| unions_of(x)).collect()],
            Some(pool) => {
                let xs: Vec<u64> = m_level.iter().copied().collect();
                let chunk = xs.len().div_ceil(pool.current_num_threads() * 4).max(1);
                pool.install(|| {
                    xs.par_chunks(chunk)
                        .map(|part| part.iter().flat_map(|&x| unions_of(x)).collect())
                        .collect()
                })
            }
        }
    }

    fn validate_level<V: Validator + ?Sized>(
        &self,
        levels: &TheoryLevels,
        q: u32,
        validator: &V,
    ) -> Result<Vec<ValidationRecord>, EnumerationError> {
        let theories = levels.theories(q);
        let check = |t: &Theory| validator.validate(t);
        let outcomes: Vec<_> = match &self.pool {
            None => theories.iter().map(check).collect(),
            Some(pool) => pool.install(|| theories.par_iter().map(check).collect()),
        };
        let mut records = Vec::new();
        for (theory, outcome) in theories.into_iter().zip(outcomes) {
            match outcome {
                Ok(outcome) if outcome.accepted => records.push(ValidationRecord { q, theory, outcome }),
                Ok(_) => {}
                Err(source) => return Err(EnumerationError::Validation { q, theory, source }),
            }
        }
        Ok(records)
    }

    /// Seeds singletons, then for `q = 1..=max_q` completes level `q` and
    /// validates every theory in it. Accepted theories are returned as
    /// records sorted by `(q, canonical theory)`.
    pub fn march<V: Validator + ?Sized>(
        &self,
        alphabet: &WeightedAlphabet,
        max_comp: u32,
        validator: &V,
    ) -> Result<MarchOutput, EnumerationError> {
        let budget = effective_max_q(alphabet, max_comp);
        let mut levels = seed_singletons(alphabet, budget)?;
        let mut records = Vec::new();
        let mut stats = Vec::with_capacity(budget.max_q as usize);
        for q in 1..=budget.max_q {
            let start = Instant::now();
            let mut level_stats = self.squeeze_level(&mut levels, q)?;
            records.extend(self.validate_level(&levels, q, validator)?);
            level_stats.elapsed = start.elapsed();
            stats.push(level_stats);
        }
        normalize_records(&mut records);
        Ok(MarchOutput {
            levels,
            records,
            stats,
        })
    }
}

/// Buckets every non-empty subset of the alphabet by exact complexity,
/// keeping those with complexity `<= max_q`.
pub fn brute_force_oracle(
    alphabet: &WeightedAlphabet,
    max_comp: u32,
) -> Result<TheoryLevels, EnumerationError> {
    let n = alphabet.len();
    if n > ORACLE_MAX_SYMBOLS {
        return Err(EnumerationError::AlphabetTooLarge {
            n,
            max: ORACLE_MAX_SYMBOLS,
        });
    }
    let budget = effective_max_q(alphabet, max_comp);
    let mut levels = TheoryLevels::empty(alphabet, budget)?;
    for mask in 1u64..(1u64 << n) {
        let q: u64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| u64::from(alphabet.weight(i)))
            .sum();
        if q <= u64::from(budget.max_q) {
            levels.levels[q as usize - 1].insert(mask);
        }
    }
    Ok(levels)
}
