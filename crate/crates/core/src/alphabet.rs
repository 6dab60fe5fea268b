//! Weighted alphabets, theories and the complexity metric.
//!
//! An alphabet is an ordered list of `(symbol, weight)` pairs. A theory is a
//! set of distinct symbols drawn from an alphabet; its complexity is the sum
//! of its members' weights.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("line {line}: duplicate symbol `{symbol}`")]
    DuplicateSymbol { line: usize, symbol: String },
    #[error("line {line}: weight `{text}` is not a positive integer")]
    BadWeight { line: usize, text: String },
    #[error("line {line}: expected `<symbol> <weight>`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: alphabet is empty")]
    Empty { line: usize },
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("invalid symbol name `{0}`")]
    InvalidSymbol(String),
}

/// Name of an alphabet letter. Any non-empty run of non-whitespace characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(String);

impl SymbolId {
    pub fn new(name: impl Into<String>) -> Result<Self, AlphabetError> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(AlphabetError::InvalidSymbol(name));
        }
        Ok(SymbolId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for SymbolId {
    type Err = AlphabetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SymbolId::new(s)
    }
}

/// A set of distinct symbols. Members iterate in canonical (name) order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Theory {
    members: BTreeSet<SymbolId>,
}

impl Theory {
    pub fn empty() -> Self {
        Theory::default()
    }

    /// Builds a theory from symbol names, e.g. `Theory::of(&["G", "F"])`.
    ///
    /// Panics on an invalid symbol name; intended for literals.
    pub fn of(names: &[&str]) -> Self {
        names
            .iter()
            .map(|n| SymbolId::new(*n).expect("valid symbol literal"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, symbol: &SymbolId) -> bool {
        self.members.contains(symbol)
    }

    pub fn members(&self) -> impl Iterator<Item = &SymbolId> + '_ {
        self.members.iter()
    }

    pub fn is_subset(&self, other: &Theory) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn is_proper_subset(&self, other: &Theory) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn is_disjoint(&self, other: &Theory) -> bool {
        self.members.is_disjoint(&other.members)
    }

    pub fn union(&self, other: &Theory) -> Theory {
        Theory {
            members: self.members.union(&other.members).cloned().collect(),
        }
    }

    /// Copy of this theory with `symbol` removed.
    pub fn without(&self, symbol: &SymbolId) -> Theory {
        let mut members = self.members.clone();
        members.remove(symbol);
        Theory { members }
    }
}

impl FromIterator<SymbolId> for Theory {
    fn from_iter<I: IntoIterator<Item = SymbolId>>(iter: I) -> Self {
        Theory {
            members: iter.into_iter().collect(),
        }
    }
}

/// Canonical rendering: `{F,G}`.
impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(s.as_str())?;
        }
        f.write_str("}")
    }
}

/// Ordered list of symbols with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAlphabet {
    entries: Vec<(SymbolId, u32)>,
    index: HashMap<SymbolId, usize>,
}

impl WeightedAlphabet {
    pub fn new(entries: Vec<(SymbolId, u32)>) -> Result<Self, AlphabetError> {
        if entries.is_empty() {
            return Err(AlphabetError::Empty { line: 0 });
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (symbol, weight)) in entries.iter().enumerate() {
            if *weight == 0 {
                return Err(AlphabetError::BadWeight {
                    line: i + 1,
                    text: weight.to_string(),
                });
            }
            if index.insert(symbol.clone(), i).is_some() {
                return Err(AlphabetError::DuplicateSymbol {
                    line: i + 1,
                    symbol: symbol.to_string(),
                });
            }
        }
        Ok(WeightedAlphabet { entries, index })
    }

    /// Convenience constructor from string/weight pairs. Panics on invalid input.
    pub fn from_pairs(pairs: &[(&str, u32)]) -> Self {
        let entries = pairs
            .iter()
            .map(|(s, w)| (SymbolId::new(*s).expect("valid symbol literal"), *w))
            .collect();
        WeightedAlphabet::new(entries).expect("valid alphabet literal")
    }

    /// The weighted alphabet A..L with weights 1,1,4,4,4,4,7,7,7,7,7,7.
    pub fn weighted() -> Self {
        WeightedAlphabet::from_pairs(&[
            ("A", 1),
            ("B", 1),
            ("C", 4),
            ("D", 4),
            ("E", 4),
            ("F", 4),
            ("G", 7),
            ("H", 7),
            ("I", 7),
            ("J", 7),
            ("K", 7),
            ("L", 7),
        ])
    }

    /// `n` symbols `A`, `B`, ... (then `S12`, `S13`, ... past `Z`) all of weight 1.
    pub fn uniform(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                let name = if i < 26 {
                    ((b'A' + i as u8) as char).to_string()
                } else {
                    format!("S{i}")
                };
                (SymbolId(name), 1)
            })
            .collect();
        WeightedAlphabet::new(entries).expect("uniform alphabet is well formed")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(SymbolId, u32)] {
        &self.entries
    }

    pub fn symbol(&self, i: usize) -> &SymbolId {
        &self.entries[i].0
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.entries[i].1
    }

    pub fn position(&self, symbol: &SymbolId) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn weight_of(&self, symbol: &SymbolId) -> Option<u32> {
        self.position(symbol).map(|i| self.entries[i].1)
    }

    pub fn total_weight(&self) -> u64 {
        self.entries.iter().map(|(_, w)| u64::from(*w)).sum()
    }

    /// Sum of member weights; 0 for the empty theory.
    pub fn complexity(&self, theory: &Theory) -> Result<u64, AlphabetError> {
        theory
            .members()
            .map(|s| {
                self.weight_of(s)
                    .map(u64::from)
                    .ok_or_else(|| AlphabetError::UnknownSymbol(s.to_string()))
            })
            .sum()
    }

    pub fn budget(&self, max_comp: u32) -> ComplexityBudget {
        effective_max_q(self, max_comp)
    }
}

/// Writes the alphabet in the file format accepted by [`parse_alphabet`].
impl fmt::Display for WeightedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (symbol, weight) in &self.entries {
            writeln!(f, "{symbol} {weight}")?;
        }
        Ok(())
    }
}

impl FromStr for WeightedAlphabet {
    type Err = AlphabetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_alphabet(s)
    }
}

/// Parses `<symbol> <weight>` lines. Blank lines and lines starting with `#`
/// are skipped.
pub fn parse_alphabet(text: &str) -> Result<WeightedAlphabet, AlphabetError> {
    let mut entries: Vec<(SymbolId, u32)> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((symbol, weight)) = trimmed.split_once(' ') else {
            return Err(AlphabetError::Malformed {
                line,
                text: trimmed.to_string(),
            });
        };
        if symbol.is_empty() || symbol.chars().any(char::is_whitespace) {
            return Err(AlphabetError::Malformed {
                line,
                text: trimmed.to_string(),
            });
        }
        let weight = weight.trim();
        let parsed = weight
            .parse::<u32>()
            .ok()
            .filter(|w| *w >= 1 && weight.bytes().all(|b| b.is_ascii_digit()));
        let Some(weight) = parsed else {
            return Err(AlphabetError::BadWeight {
                line,
                text: weight.to_string(),
            });
        };
        if seen.insert(symbol.to_string(), line).is_some() {
            return Err(AlphabetError::DuplicateSymbol {
                line,
                symbol: symbol.to_string(),
            });
        }
        entries.push((SymbolId(symbol.to_string()), weight));
    }
    if entries.is_empty() {
        return Err(AlphabetError::Empty { line: last_line });
    }
    WeightedAlphabet::new(entries)
}

/// Alphabet of `n` symbols (`A`, `B`, ... as in [`WeightedAlphabet::uniform`])
/// with weights drawn uniformly from `1..=max_weight`, reproducible from `seed`.
pub fn random_alphabet(n: usize, max_weight: u32, seed: u64) -> WeightedAlphabet {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let entries = WeightedAlphabet::uniform(n)
        .entries
        .into_iter()
        .map(|(s, _)| (s, rng.gen_range(1..=max_weight.max(1))))
        .collect();
    WeightedAlphabet::new(entries).expect("random alphabet is well formed")
}

/// User complexity cap together with the effective cap for an alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityBudget {
    pub max_comp: u32,
    pub max_q: u32,
}

/// `max_q = min(sum of weights, max_comp)`.
pub fn effective_max_q(alphabet: &WeightedAlphabet, max_comp: u32) -> ComplexityBudget {
    let max_q = alphabet.total_weight().min(u64::from(max_comp)) as u32;
    ComplexityBudget { max_comp, max_q }
}
