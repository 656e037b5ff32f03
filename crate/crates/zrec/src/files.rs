//! JSON document formats for systems, compositions and automata, and the
//! conversions between them.
//!
//! All documents carry `"format": 1`. Literals are strings in the
//! semiring's grammar (bare integers are accepted on input), so exact
//! big values survive. Conversions between system and automaton files
//! work on the declarative specs themselves and therefore reproduce the
//! original file up to key order and omitted zero edges.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{AutomatonError, RawEdge, Weight, WeightedAutomaton};
use crate::linalg::{Matrix, Vector, MAX_DIM};
use crate::semiring::{Builtin, LiteralError, Semiring, UnknownSemiring};
use crate::seq::{LiteralText, Seq, SeqSpec, SeqSpecError};
use crate::solver::{Coefficients, ComposedSystem, InputSignal, RecurrenceSystem, SystemError};

pub const FORMAT_VERSION: u32 = 1;

fn default_format() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported format version {got}; this tool reads version {FORMAT_VERSION}")]
    Format { got: u32 },
    #[error(transparent)]
    Semiring(#[from] UnknownSemiring),
    #[error("{context}: {source}")]
    Spec {
        context: String,
        source: SeqSpecError,
    },
    #[error("{context}: {source}")]
    Literal {
        context: String,
        source: LiteralError,
    },
    #[error("{field} must have {expected} entries, found {got}")]
    Shape {
        field: String,
        expected: usize,
        got: usize,
    },
    #[error("k must be between 1 and {MAX_DIM}, got {got}")]
    BadDimension { got: usize },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("not a recognized system, composition, or automaton document")]
    Unrecognized,
}

/// Coefficient part of a system document: a matrix of literals or a
/// matrix of sequence specs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSpec {
    Constant(Vec<Vec<LiteralText>>),
    Variable(Vec<Vec<SeqSpec>>),
}

impl CoefficientSpec {
    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientSpec::Constant(_))
    }

    fn check_shape(&self, k: usize, field: &str) -> Result<(), FileError> {
        let rows = match self {
            CoefficientSpec::Constant(rows) => rows.len(),
            CoefficientSpec::Variable(rows) => rows.len(),
        };
        if rows != k {
            return Err(FileError::Shape {
                field: format!("{field} rows"),
                expected: k,
                got: rows,
            });
        }
        for i in 0..k {
            let cols = match self {
                CoefficientSpec::Constant(rows) => rows[i].len(),
                CoefficientSpec::Variable(rows) => rows[i].len(),
            };
            if cols != k {
                return Err(FileError::Shape {
                    field: format!("{field} row {i}"),
                    expected: k,
                    got: cols,
                });
            }
        }
        Ok(())
    }

    fn instantiate<S: Semiring>(&self, s: &S, k: usize) -> Result<Coefficients<S>, FileError> {
        match self {
            CoefficientSpec::Constant(rows) => {
                let mut entries = Vec::with_capacity(k * k);
                for (i, row) in rows.iter().enumerate() {
                    for (j, lit) in row.iter().enumerate() {
                        let value = s.parse_literal(lit).map_err(|source| FileError::Literal {
                            context: format!("coefficient [{i}][{j}]"),
                            source,
                        })?;
                        entries.push(value);
                    }
                }
                Ok(Coefficients::Constant(
                    Matrix::new(s.clone(), k, k, entries).map_err(SystemError::Linalg)?,
                ))
            }
            CoefficientSpec::Variable(rows) => {
                let mut seqs: Vec<Seq<S::Elem>> = Vec::with_capacity(k * k);
                for (i, row) in rows.iter().enumerate() {
                    for (j, spec) in row.iter().enumerate() {
                        let seq = spec.instantiate(s).map_err(|source| FileError::Spec {
                            context: format!("coefficient [{i}][{j}]"),
                            source,
                        })?;
                        seqs.push(seq);
                    }
                }
                let s2 = s.clone();
                Ok(Coefficients::Variable(Seq::new(
                    "coefficient matrix",
                    move |n| {
                        let entries = seqs.iter().map(|seq| seq.eval(n)).collect();
                        Matrix::new(s2.clone(), k, k, entries).expect("shape validated")
                    },
                )))
            }
        }
    }

    fn preflight<S: Semiring>(&self, s: &S, horizon: u64, field: &str) -> Result<(), FileError> {
        if let CoefficientSpec::Variable(rows) = self {
            for (i, row) in rows.iter().enumerate() {
                for (j, spec) in row.iter().enumerate() {
                    check_spec_range(spec, s, horizon, || format!("{field} [{i}][{j}]"))?;
                }
            }
        }
        Ok(())
    }
}

fn check_spec_range<S: Semiring>(
    spec: &SeqSpec,
    s: &S,
    horizon: u64,
    context: impl Fn() -> String,
) -> Result<(), FileError> {
    for n in 0..=horizon {
        spec.value_at(s, n).map_err(|source| FileError::Spec {
            context: context(),
            source,
        })?;
    }
    Ok(())
}

fn parse_vector<S: Semiring>(
    s: &S,
    literals: &[LiteralText],
    field: &str,
) -> Result<Vector<S>, FileError> {
    let entries = literals
        .iter()
        .enumerate()
        .map(|(i, lit)| {
            s.parse_literal(lit).map_err(|source| FileError::Literal {
                context: format!("{field}[{i}]"),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Vector::new(s.clone(), entries).map_err(SystemError::Linalg)?)
}

fn instantiate_input<S: Semiring>(
    s: &S,
    specs: &[SeqSpec],
    k: usize,
) -> Result<InputSignal<S>, FileError> {
    let mut all_zero = true;
    let mut seqs = Vec::with_capacity(k);
    for (i, spec) in specs.iter().enumerate() {
        let ctx = |source| FileError::Spec {
            context: format!("input[{i}]"),
            source,
        };
        if !spec.is_identically_zero(s).map_err(ctx)? {
            all_zero = false;
        }
        seqs.push(spec.instantiate(s).map_err(ctx)?);
    }
    if all_zero {
        return Ok(InputSignal::Zero);
    }
    let s2 = s.clone();
    Ok(InputSignal::Signal(Seq::new("input", move |n| {
        let entries = seqs.iter().map(|seq| seq.eval(n)).collect();
        Vector::new(s2.clone(), entries).expect("shape validated")
    })))
}

fn check_len<T>(items: &[T], k: usize, field: &str) -> Result<(), FileError> {
    if items.len() != k {
        return Err(FileError::Shape {
            field: field.to_owned(),
            expected: k,
            got: items.len(),
        });
    }
    Ok(())
}

fn check_format(format: u32) -> Result<(), FileError> {
    if format != FORMAT_VERSION {
        return Err(FileError::Format { got: format });
    }
    Ok(())
}

fn check_dim(k: usize) -> Result<(), FileError> {
    if k == 0 || k > MAX_DIM {
        return Err(FileError::BadDimension { got: k });
    }
    Ok(())
}

/// A single k×k system document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub semiring: String,
    pub k: usize,
    pub coefficients: CoefficientSpec,
    pub input: Vec<SeqSpec>,
    pub initial: Vec<LiteralText>,
}

impl SystemFile {
    pub fn builtin(&self) -> Result<Builtin, FileError> {
        Ok(Builtin::parse(&self.semiring)?)
    }

    pub fn validate_shape(&self) -> Result<(), FileError> {
        check_format(self.format)?;
        check_dim(self.k)?;
        self.coefficients.check_shape(self.k, "coefficients")?;
        check_len(&self.input, self.k, "input")?;
        check_len(&self.initial, self.k, "initial")?;
        Ok(())
    }

    pub fn instantiate<S: Semiring>(&self, s: &S) -> Result<RecurrenceSystem<S>, FileError> {
        self.validate_shape()?;
        let coefficients = self.coefficients.instantiate(s, self.k)?;
        let input = instantiate_input(s, &self.input, self.k)?;
        let initial = parse_vector(s, &self.initial, "initial")?;
        Ok(RecurrenceSystem::new(coefficients, input, initial)?)
    }

    /// Evaluate every spec on 0..=horizon so carrier-injection failures
    /// surface as errors instead of later panics.
    pub fn preflight<S: Semiring>(&self, s: &S, horizon: u64) -> Result<(), FileError> {
        self.coefficients.preflight(s, horizon, "coefficients")?;
        for (i, spec) in self.input.iter().enumerate() {
            check_spec_range(spec, s, horizon, || format!("input[{i}]"))?;
        }
        Ok(())
    }
}

/// A document composing two k×k systems; the outer input is the inner
/// solution, so only the inner input h appears.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub semiring: String,
    pub k: usize,
    pub outer: CoefficientSpec,
    pub inner: CoefficientSpec,
    pub input_h: Vec<SeqSpec>,
    pub initial_f: Vec<LiteralText>,
    pub initial_g: Vec<LiteralText>,
}

impl CompositionFile {
    pub fn builtin(&self) -> Result<Builtin, FileError> {
        Ok(Builtin::parse(&self.semiring)?)
    }

    pub fn validate_shape(&self) -> Result<(), FileError> {
        check_format(self.format)?;
        check_dim(self.k)?;
        self.outer.check_shape(self.k, "outer")?;
        self.inner.check_shape(self.k, "inner")?;
        check_len(&self.input_h, self.k, "input_h")?;
        check_len(&self.initial_f, self.k, "initial_f")?;
        check_len(&self.initial_g, self.k, "initial_g")?;
        Ok(())
    }

    pub fn instantiate<S: Semiring>(&self, s: &S) -> Result<ComposedSystem<S>, FileError> {
        self.validate_shape()?;
        let outer = self.outer.instantiate(s, self.k)?;
        let inner_coefficients = self.inner.instantiate(s, self.k)?;
        let input_h = instantiate_input(s, &self.input_h, self.k)?;
        let initial_g = parse_vector(s, &self.initial_g, "initial_g")?;
        let initial_f = parse_vector(s, &self.initial_f, "initial_f")?;
        let inner = RecurrenceSystem::new(inner_coefficients, input_h, initial_g)?;
        Ok(ComposedSystem::new(outer, initial_f, inner)?)
    }

    pub fn preflight<S: Semiring>(&self, s: &S, horizon: u64) -> Result<(), FileError> {
        self.outer.preflight(s, horizon, "outer")?;
        self.inner.preflight(s, horizon, "inner")?;
        for (i, spec) in self.input_h.iter().enumerate() {
            check_spec_range(spec, s, horizon, || format!("input_h[{i}]"))?;
        }
        Ok(())
    }
}

/// An automaton document. `inputs` lists the input states; their held
/// functions live in `input_values` (absent entries default to 0̄).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub semiring: String,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub input_values: BTreeMap<String, SeqSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub weight: SeqSpec,
}

/// Lower a weight spec: constants (including constant polynomials) become
/// plain carrier values, anything else stays a sequence.
fn spec_to_weight<S: Semiring>(
    spec: &SeqSpec,
    s: &S,
    context: impl Fn() -> String,
) -> Result<Weight<S>, FileError> {
    let ctx = |source| FileError::Spec {
        context: context(),
        source,
    };
    match spec {
        SeqSpec::Constant(lit) => {
            let value = s.parse_literal(lit).map_err(|source| FileError::Literal {
                context: context(),
                source,
            })?;
            Ok(Weight::Constant(value))
        }
        SeqSpec::Polynomial(_) => {
            spec.validate(s).map_err(ctx)?;
            let v0 = spec.value_at(s, 0).map_err(ctx)?;
            let v1 = spec.value_at(s, 1).map_err(ctx)?;
            let v2 = spec.value_at(s, 2).map_err(ctx)?;
            // a polynomial agreeing on three points with a constant need
            // not be constant; instantiate unless it is degree 0
            if v0 == v1 && v1 == v2 && is_constant_polynomial(spec) {
                Ok(Weight::Constant(v0))
            } else {
                Ok(Weight::Varying(spec.instantiate(s).map_err(ctx)?))
            }
        }
        SeqSpec::Table { .. } => Ok(Weight::Varying(spec.instantiate(s).map_err(ctx)?)),
    }
}

fn is_constant_polynomial(spec: &SeqSpec) -> bool {
    match spec {
        SeqSpec::Polynomial(expr) => !expr.contains('n'),
        _ => false,
    }
}

impl AutomatonFile {
    pub fn builtin(&self) -> Result<Builtin, FileError> {
        Ok(Builtin::parse(&self.semiring)?)
    }

    pub fn validate_shape(&self) -> Result<(), FileError> {
        check_format(self.format)
    }

    pub fn instantiate<S: Semiring>(&self, s: &S) -> Result<WeightedAutomaton<S>, FileError> {
        self.validate_shape()?;
        let edges = self
            .edges
            .iter()
            .map(|edge| {
                let weight = spec_to_weight(&edge.weight, s, || {
                    format!("edge {} -> {}", edge.from, edge.to)
                })?;
                Ok(RawEdge {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                    weight,
                })
            })
            .collect::<Result<Vec<_>, FileError>>()?;
        let mut input_values = BTreeMap::new();
        for (name, spec) in &self.input_values {
            let seq = spec.instantiate(s).map_err(|source| FileError::Spec {
                context: format!("input_values[{name}]"),
                source,
            })?;
            input_values.insert(name.clone(), seq);
        }
        Ok(WeightedAutomaton::new(
            s.clone(),
            self.states.clone(),
            self.inputs.clone(),
            edges,
            input_values,
        )?)
    }

    pub fn preflight<S: Semiring>(&self, s: &S, horizon: u64) -> Result<(), FileError> {
        for edge in &self.edges {
            check_spec_range(&edge.weight, s, horizon, || {
                format!("edge {} -> {}", edge.from, edge.to)
            })?;
        }
        for (name, spec) in &self.input_values {
            check_spec_range(spec, s, horizon, || format!("input_values[{name}]"))?;
        }
        Ok(())
    }
}

/// Any of the three document kinds, detected by their distinguishing keys.
#[derive(Debug, Clone)]
pub enum AnyFile {
    System(SystemFile),
    Composition(CompositionFile),
    Automaton(AutomatonFile),
}

impl AnyFile {
    pub fn kind_name(&self) -> &'static str {
        match self {
            AnyFile::System(_) => "system",
            AnyFile::Composition(_) => "composition",
            AnyFile::Automaton(_) => "automaton",
        }
    }
}

pub fn parse_any(path: &str, text: &str) -> Result<AnyFile, FileError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|source| FileError::Json {
            path: path.to_owned(),
            source,
        })?;
    let object = value.as_object().ok_or(FileError::Unrecognized)?;
    let from_value = |kind: fn(serde_json::Value) -> Result<AnyFile, serde_json::Error>| {
        kind(value.clone()).map_err(|source| FileError::Json {
            path: path.to_owned(),
            source,
        })
    };
    if object.contains_key("coefficients") {
        from_value(|v| serde_json::from_value(v).map(AnyFile::System))
    } else if object.contains_key("outer") {
        from_value(|v| serde_json::from_value(v).map(AnyFile::Composition))
    } else if object.contains_key("states") {
        from_value(|v| serde_json::from_value(v).map(AnyFile::Automaton))
    } else {
        Err(FileError::Unrecognized)
    }
}

pub fn load_any(path: impl AsRef<Path>) -> Result<AnyFile, FileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_any(&path.display().to_string(), &text)
}

/// Spec-level reading of a system file as an automaton file: states
/// f1..fk, one edge per coefficient entry that is not provably 0̄, and
/// for a nonzero input the states g1..gk with weight-1̄ edges and the
/// input specs attached.
pub fn system_file_to_automaton_file(file: &SystemFile) -> Result<AutomatonFile, FileError> {
    file.validate_shape()?;
    let builtin = file.builtin()?;
    crate::with_semiring!(builtin, s => {
        let k = file.k;
        let states: Vec<String> = (1..=k).map(|i| format!("f{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let spec = match &file.coefficients {
                    CoefficientSpec::Constant(rows) => SeqSpec::Constant(rows[i][j].clone()),
                    CoefficientSpec::Variable(rows) => rows[i][j].clone(),
                };
                let zero = spec.is_identically_zero(&s).map_err(|source| FileError::Spec {
                    context: format!("coefficients [{i}][{j}]"),
                    source,
                })?;
                if !zero {
                    edges.push(EdgeSpec {
                        from: states[i].clone(),
                        to: states[j].clone(),
                        weight: spec,
                    });
                }
            }
        }
        let mut inputs = Vec::new();
        let mut input_values = BTreeMap::new();
        let mut input_is_zero = true;
        for (i, spec) in file.input.iter().enumerate() {
            if !spec.is_identically_zero(&s).map_err(|source| FileError::Spec {
                context: format!("input[{i}]"),
                source,
            })? {
                input_is_zero = false;
            }
        }
        if !input_is_zero {
            let one_literal = s.render(&s.one());
            for (i, spec) in file.input.iter().enumerate() {
                let name = format!("g{}", i + 1);
                edges.push(EdgeSpec {
                    from: name.clone(),
                    to: states[i].clone(),
                    weight: SeqSpec::Constant(one_literal.clone().into()),
                });
                input_values.insert(name.clone(), spec.clone());
                inputs.push(name);
            }
        }
        let automaton = AutomatonFile {
            format: FORMAT_VERSION,
            semiring: file.semiring.clone(),
            states,
            inputs,
            edges,
            input_values,
        };
        // the generated document must satisfy the structural invariants
        automaton.instantiate(&s)?;
        Ok(automaton)
    })
}

/// Spec-level reading of an automaton file as the system it generates,
/// with zero initial vector. Structural invariants are enforced first.
pub fn automaton_file_to_system_file(file: &AutomatonFile) -> Result<SystemFile, FileError> {
    let builtin = file.builtin()?;
    crate::with_semiring!(builtin, s => {
        // validates states, duplicate edges and the input-state structure
        file.instantiate(&s)?;
        let k = file.states.len();
        let zero_literal: LiteralText = s.render(&s.zero()).into();
        let index_of = |name: &str| file.states.iter().position(|st| st == name);

        let is_input = |name: &str| file.inputs.contains(&name.to_owned());
        let ff_edges: Vec<&EdgeSpec> = file
            .edges
            .iter()
            .filter(|e| !is_input(&e.from))
            .collect();
        let all_constant = ff_edges
            .iter()
            .all(|e| matches!(e.weight, SeqSpec::Constant(_)) || is_constant_polynomial(&e.weight));

        let coefficients = if all_constant {
            let mut rows = vec![vec![zero_literal.clone(); k]; k];
            for edge in &ff_edges {
                let (i, j) = (index_of(&edge.from).unwrap(), index_of(&edge.to).unwrap());
                rows[i][j] = match &edge.weight {
                    SeqSpec::Constant(lit) => lit.clone(),
                    spec => {
                        let value = spec.value_at(&s, 0).map_err(|source| FileError::Spec {
                            context: format!("edge {} -> {}", edge.from, edge.to),
                            source,
                        })?;
                        s.render(&value).into()
                    }
                };
            }
            CoefficientSpec::Constant(rows)
        } else {
            let zero_spec = SeqSpec::Constant(zero_literal.clone());
            let mut rows = vec![vec![zero_spec; k]; k];
            for edge in &ff_edges {
                let (i, j) = (index_of(&edge.from).unwrap(), index_of(&edge.to).unwrap());
                rows[i][j] = edge.weight.clone();
            }
            CoefficientSpec::Variable(rows)
        };

        let zero_spec = SeqSpec::Constant(zero_literal.clone());
        let mut input = vec![zero_spec; k];
        for name in &file.inputs {
            let edge = file
                .edges
                .iter()
                .find(|e| &e.from == name)
                .expect("validated: one outgoing edge per input state");
            let target = index_of(&edge.to).expect("validated: target is an output state");
            if let Some(spec) = file.input_values.get(name) {
                input[target] = spec.clone();
            }
        }

        Ok(SystemFile {
            format: FORMAT_VERSION,
            semiring: file.semiring.clone(),
            k,
            coefficients,
            input,
            initial: vec![zero_literal; k],
        })
    })
}
