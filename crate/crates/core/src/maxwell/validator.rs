//! Null-space validation of candidate equations.
//!
//! A theory `{t1, .., tk}` holds on the data when some coefficient vector
//! `c` with every entry nonzero makes `Σ ci · ti` vanish at every sample.
//! Stacking term values as columns gives a matrix whose (near) null space
//! is found with an SVD after scaling every column to unit norm.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scene::{EvalMode, FieldScene, SampleSet};
use super::terms::{OperatorAlphabet, OperatorTerm, Shape};
use crate::alphabet::{SymbolId, Theory};
use crate::validation::{ValidationError, ValidationOutcome, Validator};

/// Samples needed per theory member.
pub const SAMPLES_PER_MEMBER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Singular values with `σ/σ_max` below this span the null space.
    pub tol_rank: f64,
    /// Every null-vector entry must reach this fraction of the largest one.
    pub tol_support: f64,
    /// Columns with norm below this fraction of the scene's largest term
    /// column count as identically zero.
    pub tol_zero: f64,
    /// Allowed deviation of recovered coefficient ratios.
    pub tol_coef: f64,
}

impl Tolerances {
    pub fn analytic() -> Self {
        Tolerances {
            tol_rank: 1e-8,
            tol_support: 1e-3,
            tol_zero: 1e-8,
            tol_coef: 1e-6,
        }
    }

    pub fn finite_difference() -> Self {
        Tolerances {
            tol_rank: 1e-4,
            tol_support: 1e-3,
            tol_zero: 1e-5,
            tol_coef: 1e-3,
        }
    }

    pub fn for_mode(mode: EvalMode) -> Self {
        match mode {
            EvalMode::Analytic => Self::analytic(),
            EvalMode::FiniteDifference { .. } => Self::finite_difference(),
        }
    }
}

/// Term values stacked column-wise, rows grouped by sample then component.
#[derive(Debug, Clone, PartialEq)]
pub struct TermMatrix {
    pub shape: Shape,
    pub members: Vec<SymbolId>,
    pub values: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltMatrix {
    Matrix(TermMatrix),
    /// Members mix scalar and vector terms and cannot form one equation.
    ShapeIncompatible,
}

fn term_column(
    term: OperatorTerm,
    scene: &FieldScene,
    samples: &SampleSet,
    mode: EvalMode,
) -> Result<Vec<f64>, ValidationError> {
    let mut column = Vec::with_capacity(samples.len() * term.shape().components());
    for (x, t) in &samples.points {
        column.extend(scene.eval(term, x, *t, mode).components());
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(ValidationError::NonFiniteEntry {
            term: term.to_string(),
        });
    }
    Ok(column)
}

fn bound_terms(
    theory: &Theory,
    bindings: &OperatorAlphabet,
) -> Result<Vec<(SymbolId, OperatorTerm)>, ValidationError> {
    theory
        .members()
        .map(|s| {
            bindings
                .term(s)
                .map(|t| (s.clone(), t))
                .ok_or_else(|| ValidationError::UnboundSymbol(s.to_string()))
        })
        .collect()
}

fn common_shape(terms: &[(SymbolId, OperatorTerm)]) -> Option<Shape> {
    let first = terms.first()?.1.shape();
    terms.iter().all(|(_, t)| t.shape() == first).then_some(first)
}

/// Evaluates every member of `theory` at every sample point.
pub fn build_term_matrix(
    theory: &Theory,
    bindings: &OperatorAlphabet,
    scene: &FieldScene,
    samples: &SampleSet,
    mode: EvalMode,
) -> Result<BuiltMatrix, ValidationError> {
    let terms = bound_terms(theory, bindings)?;
    let Some(shape) = common_shape(&terms) else {
        return Ok(BuiltMatrix::ShapeIncompatible);
    };
    let columns = terms
        .iter()
        .map(|(_, term)| term_column(*term, scene, samples, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = samples.len() * shape.components();
    Ok(BuiltMatrix::Matrix(TermMatrix {
        shape,
        members: terms.into_iter().map(|(s, _)| s).collect(),
        values: DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r]),
    }))
}

struct CachedColumn {
    term: OperatorTerm,
    values: Vec<f64>,
    norm: f64,
}

/// Accepts theories whose terms admit a full-support linear relation on
/// the sampled scene. Term columns are computed once at construction.
pub struct MaxwellValidator {
    columns: HashMap<SymbolId, CachedColumn>,
    sample_count: usize,
    scale: f64,
    tolerances: Tolerances,
    seed: u64,
}

impl MaxwellValidator {
    pub fn new(
        bindings: &OperatorAlphabet,
        scene: &FieldScene,
        samples: &SampleSet,
        mode: EvalMode,
        tolerances: Tolerances,
    ) -> Result<Self, ValidationError> {
        let mut columns = HashMap::new();
        for (symbol, term) in bindings.terms() {
            let values = term_column(*term, scene, samples, mode)?;
            let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
            columns.insert(
                symbol.clone(),
                CachedColumn {
                    term: *term,
                    values,
                    norm,
                },
            );
        }
        let scale = columns.values().map(|c| c.norm).fold(0.0, f64::max);
        Ok(MaxwellValidator {
            columns,
            sample_count: samples.len(),
            scale,
            tolerances,
            seed: 0,
        })
    }

    /// Seed for the random null-space combination used when the null space
    /// has dimension two or more.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    fn check(&self, theory: &Theory) -> Result<ValidationOutcome, ValidationError> {
        if theory.is_empty() {
            return Ok(ValidationOutcome::reject("empty theory"));
        }
        let cols = theory
            .members()
            .map(|s| {
                self.columns
                    .get(s)
                    .ok_or_else(|| ValidationError::UnboundSymbol(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let shape = cols[0].term.shape();
        if cols.iter().any(|c| c.term.shape() != shape) {
            return Ok(ValidationOutcome::reject("mixes scalar and vector terms"));
        }
        let needed = SAMPLES_PER_MEMBER * cols.len();
        if self.sample_count < needed {
            return Err(ValidationError::Undersampled {
                samples: self.sample_count,
                members: cols.len(),
                needed,
            });
        }

        let zero_cut = self.tolerances.tol_zero * self.scale;
        if cols.iter().any(|c| c.norm <= zero_cut) {
            // An identically vanishing term is an equation on its own and
            // nothing else.
            return Ok(if cols.len() == 1 {
                ValidationOutcome::accept_with(vec![1.0]).with_diagnostics("zero column")
            } else {
                ValidationOutcome::reject("contains an identically zero term")
            });
        }

        let rows = cols[0].values.len();
        let normalized = DMatrix::from_fn(rows, cols.len(), |r, c| cols[c].values[r] / cols[c].norm);
        let (null, ratio) = self.null_vector(normalized)?;
        let Some(null) = null else {
            return Ok(ValidationOutcome::reject(format!("full column rank, σmin/σmax = {ratio:e}")));
        };
        let largest = null.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let smallest = null.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if smallest < self.tolerances.tol_support * largest {
            return Ok(ValidationOutcome::reject(format!(
                "null vector lacks full support, min/max entry = {:e}",
                smallest / largest
            )));
        }
        let coefficients = null.iter().zip(&cols).map(|(v, c)| v / c.norm).collect();
        Ok(ValidationOutcome::accept_with(coefficients).with_diagnostics(format!("σmin/σmax = {ratio:e}")))
    }

    // A vector in the numerical null space of `m` (unit columns), or None
    // when the columns are independent; with σmin/σmax.
    fn null_vector(&self, m: DMatrix<f64>) -> Result<(Option<Vec<f64>>, f64), ValidationError> {
        let n = m.ncols();
        let svd = m
            .try_svd(false, true, f64::EPSILON, 0)
            .ok_or_else(|| ValidationError::Factorization("SVD did not converge".into()))?;
        let v_t = svd
            .v_t
            .ok_or_else(|| ValidationError::Factorization("missing right singular vectors".into()))?;
        let sigma_max = svd.singular_values.max();
        if sigma_max.is_nan() || sigma_max <= 0.0 {
            return Err(ValidationError::Factorization("zero matrix".into()));
        }
        let ratio = svd.singular_values.min() / sigma_max;
        let basis: Vec<Vec<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s / sigma_max < self.tolerances.tol_rank)
            .map(|(i, _)| v_t.row(i).iter().copied().collect())
            .collect();
        // thin SVD of a tall matrix yields n singular values
        debug_assert_eq!(svd.singular_values.len(), n);
        let null = match basis.len() {
            0 => None,
            1 => basis.into_iter().next(),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut v = vec![0.0; n];
                for b in &basis {
                    let w: f64 = rng.gen_range(-1.0..1.0);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += w * bi;
                    }
                }
                Some(v)
            }
        };
        Ok((null, ratio))
    }
}

impl Validator for MaxwellValidator {
    fn validate(&self, theory: &Theory) -> Result<ValidationOutcome, ValidationError> {
        self.check(theory)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell::scene::{gen_monochromatic_scene, gen_scene};
    use crate::maxwell::terms::standard_alphabet;

    fn setup() -> (OperatorAlphabet, FieldScene, SampleSet) {
        (
            standard_alphabet(),
            gen_scene(3, 42).unwrap(),
            SampleSet::uniform(64, 1042).unwrap(),
        )
    }

    fn validator(mode: EvalMode) -> MaxwellValidator {
        let (a, s, p) = setup();
        MaxwellValidator::new(&a, &s, &p, mode, Tolerances::for_mode(mode)).unwrap()
    }

    #[test]
    fn mixed_shapes_are_incompatible() {
        let (a, s, p) = setup();
        let built = build_term_matrix(&Theory::of(&["C", "A"]), &a, &s, &p, EvalMode::Analytic).unwrap();
        assert_eq!(built, BuiltMatrix::ShapeIncompatible);
        let out = validator(EvalMode::Analytic).validate(&Theory::of(&["C", "A"])).unwrap();
        assert!(!out.accepted);
    }

    #[test]
    fn vector_theory_has_three_rows_per_sample() {
        let (a, s, p) = setup();
        let BuiltMatrix::Matrix(m) =
            build_term_matrix(&Theory::of(&["G", "F"]), &a, &s, &p, EvalMode::Analytic).unwrap()
        else {
            panic!("expected matrix");
        };
        assert_eq!(m.values.shape(), (3 * 64, 2));
        assert_eq!(m.members, vec![SymbolId::new("F").unwrap(), SymbolId::new("G").unwrap()]);
    }

    #[test]
    fn divergence_matrix_is_one_column_of_zeros() {
        let (a, s, p) = setup();
        let BuiltMatrix::Matrix(m) =
            build_term_matrix(&Theory::of(&["C"]), &a, &s, &p, EvalMode::Analytic).unwrap()
        else {
            panic!("expected matrix");
        };
        assert_eq!(m.values.shape(), (64, 1));
        assert!(m.values.amax() < 1e-12);
    }

    #[test]
    fn non_finite_entries_are_reported() {
        let (a, s, p) = setup();
        let err = build_term_matrix(
            &Theory::of(&["I"]),
            &a,
            &s,
            &p,
            EvalMode::FiniteDifference { h: 0.0 },
        )
        .unwrap_err();
        assert!(matches!(err, ValidationError::NonFiniteEntry { .. }));
    }

    #[test]
    fn divergence_of_e_is_accepted_alone() {
        let out = validator(EvalMode::Analytic).validate(&Theory::of(&["C"])).unwrap();
        assert!(out.accepted);
        assert_eq!(out.coefficients, Some(vec![1.0]));
    }

    #[test]
    fn the_field_itself_is_rejected() {
        let out = validator(EvalMode::Analytic).validate(&Theory::of(&["A"])).unwrap();
        assert!(!out.accepted);
    }

    #[test]
    fn both_divergences_together_are_rejected() {
        let out = validator(EvalMode::Analytic).validate(&Theory::of(&["C", "D"])).unwrap();
        assert!(!out.accepted);
    }

    // Independent check of the Faraday ratio: per wave, ∇×E = −a sinφ (k×e)
    // and ∂B/∂t = a ω sinφ (k̂×e); k×e = ω k̂×e makes the two cancel with
    // equal coefficients.
    #[test]
    fn faraday_pair_has_unit_ratio() {
        let scene = gen_scene(3, 42).unwrap();
        for w in &scene.waves {
            let curl_dir = -w.k.cross(&w.polarization);
            let dt_dir = w.b_polarization() * w.omega();
            assert!((curl_dir + dt_dir).norm() < 1e-12);
        }
        let out = validator(EvalMode::Analytic).validate(&Theory::of(&["G", "F"])).unwrap();
        assert!(out.accepted);
        let c = out.coefficients.unwrap();
        assert!((c[0] / c[1] - 1.0).abs() < 1e-6, "{c:?}");
    }

    #[test]
    fn partial_support_is_rejected() {
        // {A, F, G}: the only relation leaves A out
        let out = validator(EvalMode::Analytic).validate(&Theory::of(&["A", "F", "G"])).unwrap();
        assert!(!out.accepted);
    }

    #[test]
    fn acceptance_is_scale_invariant() {
        let (a, s, p) = setup();
        let v1 = MaxwellValidator::new(&a, &s, &p, EvalMode::Analytic, Tolerances::analytic()).unwrap();
        let v2 =
            MaxwellValidator::new(&a, &s.scaled(37.5), &p, EvalMode::Analytic, Tolerances::analytic()).unwrap();
        for names in [&["C"][..], &["A"], &["F", "G"], &["A", "I"], &["I", "K"], &["C", "D"], &["E", "H"]] {
            let t = Theory::of(names);
            let x = v1.validate(&t).unwrap();
            let y = v2.validate(&t).unwrap();
            assert_eq!(x.accepted, y.accepted, "{t}");
            if let (Some(cx), Some(cy)) = (x.coefficients, y.coefficients) {
                for (p, q) in cx.iter().zip(&cy) {
                    assert!((p - q).abs() < 1e-9, "{t}");
                }
            }
        }
    }

    #[test]
    fn helmholtz_trap_only_fires_on_monochromatic_data() {
        let a = standard_alphabet();
        let p = SampleSet::uniform(64, 5).unwrap();
        let mono = gen_monochromatic_scene(3, 5).unwrap();
        let v = MaxwellValidator::new(&a, &mono, &p, EvalMode::Analytic, Tolerances::analytic()).unwrap();
        assert!(v.validate(&Theory::of(&["A", "I"])).unwrap().accepted);
        assert!(!validator(EvalMode::Analytic).validate(&Theory::of(&["A", "I"])).unwrap().accepted);
    }

    #[test]
    fn undersampled_theories_are_an_error() {
        let (a, s, _) = setup();
        let few = SampleSet::uniform(5, 1).unwrap();
        let v = MaxwellValidator::new(&a, &s, &few, EvalMode::Analytic, Tolerances::analytic()).unwrap();
        assert!(matches!(
            v.validate(&Theory::of(&["F", "G"])),
            Err(ValidationError::Undersampled { needed: 8, .. })
        ));
    }

    #[test]
    fn unbound_symbols_are_an_error() {
        assert_eq!(
            validator(EvalMode::Analytic).validate(&Theory::of(&["Z"])),
            Err(ValidationError::UnboundSymbol("Z".into()))
        );
    }

    #[test]
    fn finite_difference_mode_recovers_wave_equation() {
        let out = validator(EvalMode::finite_difference())
            .validate(&Theory::of(&["I", "K"]))
            .unwrap();
        assert!(out.accepted);
        let c = out.coefficients.unwrap();
        assert!((c[1] / c[0] + 1.0).abs() < 1e-3, "{c:?}");
    }
}
