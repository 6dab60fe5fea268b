//! Enumerate symbol sets in increasing order of total weight and validate
//! each candidate against a pluggable predicate.
//!
//! The flagship validator recovers the vacuum Maxwell equations from
//! synthetic plane-wave data; see [`maxwell`].

pub mod alphabet;
pub mod bench;
pub mod cli;
pub mod enumerator;
pub mod maxwell;
pub mod validation;

pub use alphabet::{
    effective_max_q, parse_alphabet, random_alphabet, AlphabetError, ComplexityBudget, SymbolId, Theory,
    WeightedAlphabet,
};
pub use enumerator::{
    brute_force_oracle, march, seed_singletons, squeeze_level, EnumerationError, EnumerationStats, Enumerator,
    MarchOutput, TheoryLevels,
};
pub use validation::{
    prune_supersets, trivial_validator, ValidationError, ValidationOutcome, ValidationRecord, Validator,
};
