//! Hamiltonian expressions: AST, parameter binding, matrix assembly and the
//! Hermiticity check that gates every simulation.
//!
//! Products are assembled exactly in the order written. No normal ordering is
//! applied, so `c(2)*c'(1)` and `c'(1)*c(2)` give matrices of opposite sign.

mod parser;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

pub use parser::{parse, ParseError, ParseErrorKind};

use crate::error::{Error, Result};
use crate::fermion::ModeOperatorSet;
use crate::tensor::{ComplexMatrix, MonomialMatrix, I, ONE, ZERO};

/// Max `|H - H†|` entry accepted as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    Lower,
    Raise,
    Number,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeFactor {
    pub kind: FactorKind,
    /// 1-based mode index.
    pub mode: usize,
}

impl ModeFactor {
    pub fn adjoint(self) -> Self {
        let kind = match self.kind {
            FactorKind::Lower => FactorKind::Raise,
            FactorKind::Raise => FactorKind::Lower,
            FactorKind::Number => FactorKind::Number,
        };
        Self { kind, ..self }
    }

    fn matrix<'a>(&self, ops: &'a ModeOperatorSet) -> Result<&'a MonomialMatrix> {
        match self.kind {
            FactorKind::Lower => ops.lowering(self.mode),
            FactorKind::Raise => ops.raising(self.mode),
            FactorKind::Number => ops.number(self.mode),
        }
    }
}

impl fmt::Display for ModeFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FactorKind::Lower => write!(f, "c({})", self.mode),
            FactorKind::Raise => write!(f, "c'({})", self.mode),
            FactorKind::Number => write!(f, "n({})", self.mode),
        }
    }
}

/// Monomial coefficient `value * i^[imaginary] * Π parameters`.
///
/// Products of real literals, `i` and real parameters always have this form.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    value: f64,
    imaginary: bool,
    parameters: Vec<String>,
}

impl Coefficient {
    pub fn real(value: f64) -> Self {
        Self {
            value,
            imaginary: false,
            parameters: Vec::new(),
        }
    }

    pub fn imaginary_unit() -> Self {
        Self {
            value: 1.0,
            imaginary: true,
            parameters: Vec::new(),
        }
    }

    pub fn parameter(name: &str) -> Self {
        Self {
            value: 1.0,
            imaginary: false,
            parameters: vec![name.to_string()],
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_imaginary(&self) -> bool {
        self.imaginary
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn times(&self, other: &Coefficient) -> Coefficient {
        let mut value = self.value * other.value;
        if self.imaginary && other.imaginary {
            value = -value;
        }
        let mut parameters = self.parameters.clone();
        parameters.extend(other.parameters.iter().cloned());
        Coefficient {
            value,
            imaginary: self.imaginary != other.imaginary,
            parameters,
        }
    }

    pub fn negated(&self) -> Coefficient {
        Coefficient {
            value: -self.value,
            ..self.clone()
        }
    }

    pub fn scaled(&self, factor: f64) -> Coefficient {
        Coefficient {
            value: self.value * factor,
            ..self.clone()
        }
    }

    /// Complex conjugate; parameters are real.
    pub fn conj(&self) -> Coefficient {
        if self.imaginary {
            self.negated()
        } else {
            self.clone()
        }
    }

    pub fn evaluate(&self, bindings: &BTreeMap<String, f64>) -> Result<Complex64> {
        let mut v = self.value;
        for p in &self.parameters {
            v *= bindings
                .get(p)
                .ok_or_else(|| Error::UnboundParameter(p.clone()))?;
        }
        Ok(if self.imaginary { I * v } else { ONE * v })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTerm {
    pub coefficient: Coefficient,
    /// Written order, leftmost first.
    pub factors: Vec<ModeFactor>,
}

impl OperatorTerm {
    pub(crate) fn identity() -> Self {
        Self::scalar(Coefficient::real(1.0))
    }

    pub(crate) fn scalar(coefficient: Coefficient) -> Self {
        Self {
            coefficient,
            factors: Vec::new(),
        }
    }

    pub(crate) fn times(&self, other: &OperatorTerm) -> OperatorTerm {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().copied());
        OperatorTerm {
            coefficient: self.coefficient.times(&other.coefficient),
            factors,
        }
    }

    /// Reverses the factor order, swaps raising and lowering, conjugates the coefficient.
    pub fn adjoint(&self) -> OperatorTerm {
        OperatorTerm {
            coefficient: self.coefficient.conj(),
            factors: self.factors.iter().rev().map(|f| f.adjoint()).collect(),
        }
    }

    fn render(&self, out: &mut String) {
        let c = &self.coefficient;
        let mut parts: Vec<String> = Vec::new();
        let magnitude = c.value.abs();
        let bare = !c.imaginary && c.parameters.is_empty() && self.factors.is_empty();
        if magnitude != 1.0 || bare {
            parts.push(format!("{magnitude}"));
        }
        if c.imaginary {
            parts.push("i".into());
        }
        parts.extend(c.parameters.iter().cloned());
        parts.extend(self.factors.iter().map(ModeFactor::to_string));
        out.push_str(&parts.join("*"));
    }
}

/// A parsed Hamiltonian: a flat sum of terms plus parameter bindings.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorExpression {
    terms: Vec<OperatorTerm>,
    parameters: BTreeMap<String, f64>,
}

impl OperatorExpression {
    pub fn from_terms(terms: Vec<OperatorTerm>) -> Self {
        Self {
            terms,
            parameters: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        parse(text)
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn parameters(&self) -> &BTreeMap<String, f64> {
        &self.parameters
    }

    pub fn bind(&mut self, name: &str, value: f64) -> &mut Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn with_parameter(mut self, name: &str, value: f64) -> Self {
        self.bind(name, value);
        self
    }

    pub fn with_parameters<'a>(
        mut self,
        bindings: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Self {
        for (name, value) in bindings {
            self.bind(name, value);
        }
        self
    }

    /// Parameter names in order of first appearance.
    pub fn referenced_parameters(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for p in self
            .terms
            .iter()
            .flat_map(|t| t.coefficient.parameters.iter())
        {
            if !seen.contains(&p.as_str()) {
                seen.push(p);
            }
        }
        seen
    }

    /// Largest mode index used by any factor.
    pub fn max_mode(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.mode))
            .max()
            .unwrap_or(0)
    }

    pub fn adjoint(&self) -> OperatorExpression {
        OperatorExpression {
            terms: self.terms.iter().map(OperatorTerm::adjoint).collect(),
            parameters: self.parameters.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> OperatorExpression {
        OperatorExpression {
            terms: self
                .terms
                .iter()
                .map(|t| OperatorTerm {
                    coefficient: t.coefficient.scaled(factor),
                    factors: t.factors.clone(),
                })
                .collect(),
            parameters: self.parameters.clone(),
        }
    }

    /// Sum of two expressions; bindings of `other` win on conflict.
    pub fn plus(&self, other: &OperatorExpression) -> OperatorExpression {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.parameters
            .extend(other.parameters.iter().map(|(k, v)| (k.clone(), *v)));
        out
    }

    /// `Σ_terms coeff · Π_factors matrix(factor)` on the space of `ops`.
    pub fn assemble(&self, ops: &ModeOperatorSet) -> Result<ComplexMatrix> {
        assemble(self, ops)
    }
}

impl fmt::Display for OperatorExpression {
    /// Canonical text that reparses to the same terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, term) in self.terms.iter().enumerate() {
            let negative = term.coefficient.value.is_sign_negative();
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            term.render(&mut out);
        }
        f.write_str(&out)
    }
}

/// Builds the `2^N x 2^N` matrix of `expr`.
///
/// Each term is a product of monomial matrices, so it is applied column by
/// column: the rightmost factor acts first on the basis vector.
pub fn assemble(expr: &OperatorExpression, ops: &ModeOperatorSet) -> Result<ComplexMatrix> {
    let dim = ops.dimension();
    let mut data = vec![ZERO; dim * dim];
    for term in &expr.terms {
        let coeff = term.coefficient.evaluate(&expr.parameters)?;
        let mats = term
            .factors
            .iter()
            .map(|f| f.matrix(ops))
            .collect::<Result<Vec<_>>>()?;
        if coeff == ZERO {
            continue;
        }
        'columns: for col in 0..dim {
            let (mut row, mut value) = (col, coeff);
            for m in mats.iter().rev() {
                match m.column(row) {
                    Some((r, v)) => {
                        row = r;
                        value *= v;
                    }
                    None => continue 'columns,
                }
            }
            data[row * dim + col] += value;
        }
    }
    ComplexMatrix::from_computed(dim, dim, data)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiticityReport {
    pub is_hermitian: bool,
    /// Max `|H - H†|` entry.
    pub max_deviation: f64,
}

pub fn check_hermitian(h: &ComplexMatrix) -> Result<HermiticityReport> {
    if !h.is_square() {
        return Err(Error::Shape(format!(
            "{}x{} is not square",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let mut max_deviation: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            max_deviation = max_deviation.max((h.get(r, c) - h.get(c, r).conj()).norm());
        }
    }
    Ok(HermiticityReport {
        is_hermitian: max_deviation <= HERMITIAN_TOLERANCE,
        max_deviation,
    })
}

/// Fails with [`Error::NotHermitian`] unless `h` passes [`check_hermitian`].
pub fn require_hermitian(h: &ComplexMatrix) -> Result<()> {
    let report = check_hermitian(h)?;
    if report.is_hermitian {
        Ok(())
    } else {
        Err(Error::NotHermitian {
            deviation: report.max_deviation,
        })
    }
}
