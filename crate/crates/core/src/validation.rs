//! Validator contract, accepted-theory records and minimality pruning.

use std::fmt;

use thiserror::Error;

use crate::alphabet::Theory;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("symbol `{0}` has no term binding")]
    UnboundSymbol(String),
    #[error("non-finite value in column `{term}`")]
    NonFiniteEntry { term: String },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("{samples} samples cannot overdetermine a theory of {members} members (need {needed})")]
    Undersampled {
        samples: usize,
        members: usize,
        needed: usize,
    },
    #[error("{0}")]
    Other(String),
}

/// Result of validating one theory.
///
/// `coefficients`, when present, hold one value per member in canonical
/// member order, scaled so the largest-magnitude entry is exactly `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutcome {
    pub accepted: bool,
    pub coefficients: Option<Vec<f64>>,
    pub diagnostics: Option<String>,
}

impl ValidationOutcome {
    pub fn accept() -> Self {
        ValidationOutcome {
            accepted: true,
            coefficients: None,
            diagnostics: None,
        }
    }

    /// Accepts with a coefficient vector, rescaling it so the entry of
    /// largest magnitude becomes `+1`.
    pub fn accept_with(coefficients: Vec<f64>) -> Self {
        ValidationOutcome {
            accepted: true,
            coefficients: Some(normalize_max_entry(coefficients)),
            diagnostics: None,
        }
    }

    pub fn reject(reason: impl Into<String>) -> Self {
        ValidationOutcome {
            accepted: false,
            coefficients: None,
            diagnostics: Some(reason.into()),
        }
    }

    pub fn with_diagnostics(mut self, text: impl Into<String>) -> Self {
        self.diagnostics = Some(text.into());
        self
    }
}

/// Scales `v` so its largest-magnitude entry equals `+1`. Zero vectors are
/// returned unchanged.
pub fn normalize_max_entry(mut v: Vec<f64>) -> Vec<f64> {
    let pivot = v
        .iter()
        .copied()
        .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if pivot != 0.0 {
        for x in &mut v {
            *x /= pivot;
        }
    }
    v
}

/// Decides whether a candidate theory holds.
///
/// Implementations must be deterministic and callable from several worker
/// threads at once.
pub trait Validator: Sync {
    fn validate(&self, theory: &Theory) -> Result<ValidationOutcome, ValidationError>;
}

impl<F> Validator for F
where
    F: Fn(&Theory) -> Result<ValidationOutcome, ValidationError> + Sync,
{
    fn validate(&self, theory: &Theory) -> Result<ValidationOutcome, ValidationError> {
        self(theory)
    }
}

/// Accepts everything.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialValidator;

impl Validator for TrivialValidator {
    fn validate(&self, _theory: &Theory) -> Result<ValidationOutcome, ValidationError> {
        Ok(ValidationOutcome::accept())
    }
}

pub fn trivial_validator() -> TrivialValidator {
    TrivialValidator
}

/// An accepted theory together with its complexity.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRecord {
    pub q: u32,
    pub theory: Theory,
    pub outcome: ValidationOutcome,
}

impl fmt::Display for ValidationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} theory={}", self.q, self.theory)
    }
}

/// Sorts records by `(q, canonical theory)`.
pub fn normalize_records(records: &mut [ValidationRecord]) {
    records.sort_by(|a, b| (a.q, &a.theory).cmp(&(b.q, &b.theory)));
}

/// Keeps only minimal accepted theories: a record survives when no earlier
/// accepted record holds a proper subset of its theory. Rejected records are
/// dropped. Input must be sorted by ascending `q`.
pub fn prune_supersets(records: &[ValidationRecord]) -> Vec<ValidationRecord> {
    let mut kept: Vec<ValidationRecord> = Vec::new();
    for rec in records.iter().filter(|r| r.outcome.accepted) {
        let implied = kept
            .iter()
            .any(|k| k.theory.is_proper_subset(&rec.theory));
        if !implied {
            kept.push(rec.clone());
        }
    }
    kept
}
