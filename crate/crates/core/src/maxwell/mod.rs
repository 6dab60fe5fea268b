//! Rediscovering the vacuum Maxwell equations.
//!
//! Letters A..L stand for operator terms applied to the electric and
//! magnetic fields. A candidate theory is accepted when its terms satisfy a
//! linear relation, with every term participating, on sampled plane-wave
//! data.

pub mod discover;
pub mod scene;
pub mod terms;
pub mod validator;

pub use discover::{
    check_expected, discover, expected_maxwell, Discovery, DiscoveryConfig, DiscoveryError, DiscoveryReport,
};
pub use scene::{gen_monochromatic_scene, gen_scene, EvalMode, FieldScene, PlaneWave, SampleSet, TermValue};
pub use terms::{standard_alphabet, Field, Operator, OperatorAlphabet, OperatorTerm, Shape};
pub use validator::{build_term_matrix, BuiltMatrix, MaxwellValidator, TermMatrix, Tolerances};
