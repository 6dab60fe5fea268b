use std::fmt::{self, Write as _};

use thiserror::Error;

use super::scene::{gen_monochromatic_scene, gen_scene, EvalMode, SampleSet, SceneError};
use super::terms::{standard_alphabet, OperatorAlphabet};
use super::validator::{MaxwellValidator, Tolerances};
use crate::alphabet::{SymbolId, Theory, WeightedAlphabet};
use crate::enumerator::{EnumerationError, EnumerationStats, Enumerator};
use crate::validation::{prune_supersets, ValidationError, ValidationRecord};

pub const DEFAULT_MAX_COMP: u32 = 14;
pub const DEFAULT_WAVES: usize = 3;

#[derive(Debug, Error)]
pub enum DiscoveryError {
    #[error("symbol `{0}` has no operator binding")]
    UnboundSymbol(SymbolId),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

#[derive(Debug, Clone)]
pub struct DiscoveryConfig {
    /// Letters must come from A..L; weights may differ from the standard ones.
    pub alphabet: Option<WeightedAlphabet>,
    pub max_comp: u32,
    pub wave_count: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub mode: EvalMode,
    pub tolerances: Tolerances,
    pub prune: bool,
    pub monochromatic: bool,
    pub workers: usize,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            alphabet: None,
            max_comp: DEFAULT_MAX_COMP,
            wave_count: DEFAULT_WAVES,
            sample_count: SampleSet::DEFAULT_COUNT,
            seed: 42,
            mode: EvalMode::Analytic,
            tolerances: Tolerances::analytic(),
            prune: true,
            monochromatic: false,
            workers: 1,
        }
    }
}

impl DiscoveryConfig {
    /// Defaults for `mode`, including that mode's tolerances.
    pub fn with_mode(mode: EvalMode) -> Self {
        DiscoveryConfig {
            mode,
            tolerances: Tolerances::for_mode(mode),
            ..Default::default()
        }
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub q: u32,
    pub theory: Theory,
    pub coefficients: Vec<f64>,
    pub equation: String,
}

impl Discovery {
    pub fn coefficient(&self, symbol: &str) -> Option<f64> {
        self.theory
            .members()
            .position(|s| s.as_str() == symbol)
            .and_then(|i| self.coefficients.get(i).copied())
    }

    /// Machine-readable line:
    /// `q=<q> theory={..} eq="<equation>" coeffs=[<v1>,...]`.
    pub fn line(&self) -> String {
        let coeffs: Vec<String> = self.coefficients.iter().map(|c| format!("{c:.12}")).collect();
        format!(
            "q={} theory={} eq=\"{}\" coeffs=[{}]",
            self.q,
            self.theory,
            self.equation,
            coeffs.join(",")
        )
    }
}

#[derive(Debug, Clone)]
pub struct DiscoveryReport {
    /// Sorted by `(q, canonical theory)`.
    pub discoveries: Vec<Discovery>,
    /// Accepted theories before superset pruning.
    pub accepted: usize,
    pub enumerated: usize,
    pub stats: Vec<EnumerationStats>,
}

impl DiscoveryReport {
    pub fn keys(&self) -> Vec<(u32, Theory)> {
        self.discoveries.iter().map(|d| (d.q, d.theory.clone())).collect()
    }

    pub fn find(&self, names: &[&str]) -> Option<&Discovery> {
        let t = Theory::of(names);
        self.discoveries.iter().find(|d| d.theory == t)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>3}  {:<10}  {:<32}  coefficients", "q", "theory", "equation");
        for d in &self.discoveries {
            let coeffs: Vec<String> = d.coefficients.iter().map(|c| format!("{c:+.6}")).collect();
            let _ = writeln!(
                out,
                "{:>3}  {:<10}  {:<32}  [{}]",
                d.q,
                d.theory.to_string(),
                d.equation,
                coeffs.join(", ")
            );
        }
        let _ = writeln!(
            out,
            "enumerated {} theories, {} accepted, {} minimal",
            self.enumerated,
            self.accepted,
            self.discoveries.len()
        );
        out
    }
}

impl fmt::Display for DiscoveryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.discoveries {
            writeln!(f, "{}", d.line())?;
        }
        Ok(())
    }
}

/// Writes `Σ ci · term_i = 0`, dropping unit coefficients.
pub fn render_equation(theory: &Theory, coefficients: &[f64], bindings: &OperatorAlphabet) -> String {
    let mut out = String::new();
    for (i, (symbol, c)) in theory.members().zip(coefficients).enumerate() {
        let label = bindings
            .term(symbol)
            .map_or_else(|| symbol.to_string(), |t| t.to_string());
        let negative = *c < 0.0;
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mag = c.abs();
        if (mag - 1.0).abs() > 1e-6 {
            let _ = write!(out, "{mag:.6}·");
        }
        out.push_str(&label);
    }
    out.push_str(" = 0");
    out
}

fn bindings_for(config: &DiscoveryConfig) -> Result<OperatorAlphabet, DiscoveryError> {
    match &config.alphabet {
        None => Ok(standard_alphabet()),
        Some(a) => OperatorAlphabet::rebind(a.clone()).map_err(DiscoveryError::UnboundSymbol),
    }
}

/// Builds the scene, samples and validator described by `config`.
pub fn build_validator(config: &DiscoveryConfig) -> Result<(OperatorAlphabet, MaxwellValidator), DiscoveryError> {
    let bindings = bindings_for(config)?;
    let scene = if config.monochromatic {
        gen_monochromatic_scene(config.wave_count, config.seed)?
    } else {
        gen_scene(config.wave_count, config.seed)?
    };
    // samples use their own stream so scene and points are independent
    let samples = SampleSet::uniform(config.sample_count, config.seed ^ 0x5EED_5A3F_1E5D_0001)?;
    let validator = MaxwellValidator::new(&bindings, &scene, &samples, config.mode, config.tolerances)?
        .with_seed(config.seed);
    Ok((bindings, validator))
}

/// Enumerates theories by complexity, validates each against synthetic
/// vacuum data and reports the minimal accepted ones.
pub fn discover(config: &DiscoveryConfig) -> Result<DiscoveryReport, DiscoveryError> {
    let (bindings, validator) = build_validator(config)?;
    let enumerator = Enumerator::with_workers(config.workers)?;
    let out = enumerator.march(&bindings.alphabet, config.max_comp, &validator)?;
    let accepted = out.records.len();
    let kept: Vec<ValidationRecord> = if config.prune {
        prune_supersets(&out.records)
    } else {
        out.records
    };
    let discoveries = kept
        .into_iter()
        .map(|r| {
            let coefficients = r.outcome.coefficients.unwrap_or_default();
            let equation = render_equation(&r.theory, &coefficients, &bindings);
            Discovery {
                q: r.q,
                theory: r.theory,
                coefficients,
                equation,
            }
        })
        .collect();
    Ok(DiscoveryReport {
        discoveries,
        accepted,
        enumerated: out.levels.total(),
        stats: out.stats,
    })
}

/// The vacuum Maxwell equations and wave equations as `(q, theory)`.
pub fn expected_maxwell() -> Vec<(u32, Theory)> {
    vec![
        (4, Theory::of(&["C"])),
        (4, Theory::of(&["D"])),
        (11, Theory::of(&["E", "H"])),
        (11, Theory::of(&["F", "G"])),
        (14, Theory::of(&["I", "K"])),
        (14, Theory::of(&["J", "L"])),
    ]
}

/// `(theory, numerator, denominator, expected ratio)` for the coupled
/// equations in natural units.
pub const EXPECTED_RATIOS: [(&[&str], &str, &str, f64); 4] = [
    (&["F", "G"], "F", "G", 1.0),
    (&["E", "H"], "E", "H", -1.0),
    (&["I", "K"], "K", "I", -1.0),
    (&["J", "L"], "L", "J", -1.0),
];

/// Checks the report holds exactly the expected six theories and that the
/// coupled equations carry coefficient ratios within `tol_coef`.
pub fn check_expected(report: &DiscoveryReport, tol_coef: f64) -> Result<(), String> {
    let found = report.keys();
    let expected = expected_maxwell();
    if found != expected {
        let show = |v: &[(u32, Theory)]| {
            v.iter()
                .map(|(q, t)| format!("{t}@{q}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        return Err(format!(
            "expected [{}], found [{}]",
            show(&expected),
            show(&found)
        ));
    }
    for (names, num, den, ratio) in EXPECTED_RATIOS {
        let d = report.find(names).expect("present after set check");
        let got = d.coefficient(num).unwrap_or(f64::NAN) / d.coefficient(den).unwrap_or(f64::NAN);
        if got.is_nan() || (got - ratio).abs() > tol_coef {
            return Err(format!(
                "{}: c_{num}/c_{den} = {got}, expected {ratio} within {tol_coef}",
                d.theory
            ));
        }
    }
    Ok(())
}
