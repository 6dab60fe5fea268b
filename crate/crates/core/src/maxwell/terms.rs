use std::collections::BTreeMap;
use std::fmt;

use crate::alphabet::{SymbolId, WeightedAlphabet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    E,
    B,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::E => "E",
            Field::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Identity,
    Divergence,
    Curl,
    Laplacian,
    Dt,
    Dtt,
}

impl Operator {
    /// Derivative count used by the complexity metric. Divergence and a
    /// single time derivative cost 3; curl, Laplacian and the second time
    /// derivative cost 6.
    pub fn derivative_count(self) -> u32 {
        match self {
            Operator::Identity => 0,
            Operator::Divergence | Operator::Dt => 3,
            Operator::Curl | Operator::Laplacian | Operator::Dtt => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Scalar,
    Vector3,
}

impl Shape {
    pub fn components(self) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Vector3 => 3,
        }
    }
}

/// An operator applied to one of the two fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorTerm {
    pub operator: Operator,
    pub field: Field,
}

impl OperatorTerm {
    pub const fn new(operator: Operator, field: Field) -> Self {
        OperatorTerm { operator, field }
    }

    pub fn shape(&self) -> Shape {
        match self.operator {
            Operator::Divergence => Shape::Scalar,
            _ => Shape::Vector3,
        }
    }

    /// `1 + derivative_count`.
    pub fn weight(&self) -> u32 {
        1 + self.operator.derivative_count()
    }
}

impl fmt::Display for OperatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.field;
        match self.operator {
            Operator::Identity => write!(f, "{x}"),
            Operator::Divergence => write!(f, "∇·{x}"),
            Operator::Curl => write!(f, "∇×{x}"),
            Operator::Laplacian => write!(f, "∇²{x}"),
            Operator::Dt => write!(f, "∂{x}/∂t"),
            Operator::Dtt => write!(f, "∂²{x}/∂t²"),
        }
    }
}

/// Letter assignments A..L.
pub const STANDARD_TERMS: [(&str, OperatorTerm); 12] = [
    ("A", OperatorTerm::new(Operator::Identity, Field::E)),
    ("B", OperatorTerm::new(Operator::Identity, Field::B)),
    ("C", OperatorTerm::new(Operator::Divergence, Field::E)),
    ("D", OperatorTerm::new(Operator::Divergence, Field::B)),
    ("E", OperatorTerm::new(Operator::Dt, Field::E)),
    ("F", OperatorTerm::new(Operator::Dt, Field::B)),
    ("G", OperatorTerm::new(Operator::Curl, Field::E)),
    ("H", OperatorTerm::new(Operator::Curl, Field::B)),
    ("I", OperatorTerm::new(Operator::Laplacian, Field::E)),
    ("J", OperatorTerm::new(Operator::Laplacian, Field::B)),
    ("K", OperatorTerm::new(Operator::Dtt, Field::E)),
    ("L", OperatorTerm::new(Operator::Dtt, Field::B)),
];

/// A weighted alphabet whose letters are bound to operator terms.
#[derive(Debug, Clone)]
pub struct OperatorAlphabet {
    pub alphabet: WeightedAlphabet,
    terms: BTreeMap<SymbolId, OperatorTerm>,
}

impl OperatorAlphabet {
    /// Binds every symbol of `alphabet` through `terms`; returns the first
    /// symbol without a binding on failure.
    pub fn new(
        alphabet: WeightedAlphabet,
        terms: &BTreeMap<SymbolId, OperatorTerm>,
    ) -> Result<Self, SymbolId> {
        let mut bound = BTreeMap::new();
        for (symbol, _) in alphabet.entries() {
            let term = terms.get(symbol).ok_or_else(|| symbol.clone())?;
            bound.insert(symbol.clone(), *term);
        }
        Ok(OperatorAlphabet {
            alphabet,
            terms: bound,
        })
    }

    /// Reuses the standard letter bindings with the weights of `alphabet`.
    pub fn rebind(alphabet: WeightedAlphabet) -> Result<Self, SymbolId> {
        OperatorAlphabet::new(alphabet, &standard_bindings())
    }

    pub fn term(&self, symbol: &SymbolId) -> Option<OperatorTerm> {
        self.terms.get(symbol).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymbolId, &OperatorTerm)> {
        self.terms.iter()
    }
}

pub fn standard_bindings() -> BTreeMap<SymbolId, OperatorTerm> {
    STANDARD_TERMS
        .iter()
        .map(|(s, t)| (SymbolId::new(*s).expect("letter"), *t))
        .collect()
}

/// The twelve operator terms with weights `1 + derivative count`.
pub fn standard_alphabet() -> OperatorAlphabet {
    let entries = STANDARD_TERMS
        .iter()
        .map(|(s, t)| (SymbolId::new(*s).expect("letter"), t.weight()))
        .collect();
    let alphabet = WeightedAlphabet::new(entries).expect("standard alphabet is well formed");
    OperatorAlphabet::new(alphabet, &standard_bindings()).expect("all letters bound")
}
