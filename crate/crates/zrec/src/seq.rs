//! Total sequences ℕ → T, declarative sequence specs, and discrete
//! convolution, including the fixed-argument convolution where a time
//! parameter is held constant while the convolution index is expanded.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{LinalgError, Matrix, Vector};
use crate::semiring::{LiteralError, Semiring};

/// A total function ℕ → T with a synchronized memo table.
///
/// Evaluation must be deterministic; the memo is then transparent, and
/// concurrent callers may at worst recompute a value idempotently.
#[derive(Clone)]
pub struct Seq<T> {
    inner: Arc<SeqInner<T>>,
}

struct SeqInner<T> {
    description: String,
    eval: Box<dyn Fn(usize) -> T + Send + Sync>,
    memo: Mutex<HashMap<usize, T>>,
}

impl<T: Clone + Send + Sync + 'static> Seq<T> {
    pub fn new(
        description: impl Into<String>,
        eval: impl Fn(usize) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            inner: Arc::new(SeqInner {
                description: description.into(),
                eval: Box::new(eval),
                memo: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn constant(description: impl Into<String>, value: T) -> Self {
        Self::new(description, move |_| value.clone())
    }

    pub fn eval(&self, n: usize) -> T {
        if let Some(hit) = self.inner.memo.lock().unwrap().get(&n) {
            return hit.clone();
        }
        let value = (self.inner.eval)(n);
        self.inner
            .memo
            .lock()
            .unwrap()
            .insert(n, value.clone());
        value
    }

    /// Pointwise image of the sequence under `f`, memoized separately.
    pub fn map<U: Clone + Send + Sync + 'static>(
        &self,
        description: impl Into<String>,
        f: impl Fn(&T) -> U + Send + Sync + 'static,
    ) -> Seq<U> {
        let parent = self.clone();
        Seq::new(description, move |n| f(&parent.eval(n)))
    }

    /// Drop all memoized values; recomputation must yield identical data.
    pub fn clear_memo(&self) {
        self.inner.memo.lock().unwrap().clear();
    }

    pub fn description(&self) -> &str {
        &self.inner.description
    }
}

impl<T> fmt::Debug for Seq<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seq({})", self.inner.description)
    }
}

/// A literal token as it appears in files: canonically a JSON string,
/// with bare integers accepted and normalized on input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiteralText(pub String);

impl LiteralText {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for LiteralText {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl From<&str> for LiteralText {
    fn from(s: &str) -> Self {
        LiteralText(s.to_owned())
    }
}

impl From<String> for LiteralText {
    fn from(s: String) -> Self {
        LiteralText(s)
    }
}

impl fmt::Display for LiteralText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for LiteralText {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for LiteralText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LiteralVisitor;

        impl Visitor<'_> for LiteralVisitor {
            type Value = LiteralText;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a literal string or integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<LiteralText, E> {
                Ok(LiteralText(v.to_owned()))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LiteralText, E> {
                Ok(LiteralText(v.to_string()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LiteralText, E> {
                Ok(LiteralText(v.to_string()))
            }
        }

        deserializer.deserialize_any(LiteralVisitor)
    }
}

/// What a table spec yields beyond its last listed index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// Keep returning the value at the largest listed index.
    RepeatLast,
    /// Return 0̄.
    #[default]
    Zero,
}

/// Declarative source for a sequence of carrier values.
///
/// Polynomial specs are evaluated in signed arbitrary-precision integer
/// arithmetic and the result is injected into the carrier through the
/// semiring's literal parser, so "n+1" over min-plus means the integer
/// n+1. Table specs return listed values, 0̄ at unlisted indices below
/// the maximum, and the tail rule beyond it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqSpec {
    Constant(LiteralText),
    Polynomial(LiteralText),
    Table {
        entries: Vec<(u64, LiteralText)>,
        tail: TailRule,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqSpecError {
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("cannot inject value at n = {n}: {source}")]
    Injection { n: u64, source: LiteralError },
    #[error("polynomial {expr:?}: {message}")]
    Expr { expr: String, message: String },
    #[error("table index {n} listed twice")]
    DuplicateIndex { n: u64 },
    #[error("empty table cannot repeat its last value")]
    EmptyRepeatTable,
}

impl SeqSpec {
    pub fn constant(text: &str) -> Self {
        SeqSpec::Constant(text.into())
    }

    pub fn polynomial(text: &str) -> Self {
        SeqSpec::Polynomial(text.into())
    }

    pub fn table(entries: &[(u64, &str)], tail: TailRule) -> Self {
        SeqSpec::Table {
            entries: entries.iter().map(|&(n, v)| (n, v.into())).collect(),
            tail,
        }
    }

    /// Check well-formedness against a semiring without evaluating at any n.
    pub fn validate<S: Semiring>(&self, s: &S) -> Result<(), SeqSpecError> {
        match self {
            SeqSpec::Constant(lit) => {
                s.parse_literal(lit)?;
            }
            SeqSpec::Polynomial(expr) => {
                Expr::parse(expr)?;
            }
            SeqSpec::Table { entries, tail } => {
                if entries.is_empty() && *tail == TailRule::RepeatLast {
                    return Err(SeqSpecError::EmptyRepeatTable);
                }
                let mut seen = Vec::new();
                for (n, lit) in entries {
                    if seen.contains(n) {
                        return Err(SeqSpecError::DuplicateIndex { n: *n });
                    }
                    seen.push(*n);
                    s.parse_literal(lit)?;
                }
            }
        }
        Ok(())
    }

    /// Evaluate the spec at one index, surfacing injection failures.
    pub fn value_at<S: Semiring>(&self, s: &S, n: u64) -> Result<S::Elem, SeqSpecError> {
        match self {
            SeqSpec::Constant(lit) => Ok(s.parse_literal(lit)?),
            SeqSpec::Polynomial(expr) => {
                let parsed = Expr::parse(expr)?;
                let value = parsed.eval(&BigInt::from(n));
                s.inject_integer(&value)
                    .map_err(|source| SeqSpecError::Injection { n, source })
            }
            SeqSpec::Table { entries, tail } => {
                if let Some((_, lit)) = entries.iter().find(|(i, _)| *i == n) {
                    return Ok(s.parse_literal(lit)?);
                }
                let last = entries.iter().max_by_key(|(i, _)| *i);
                match (last, tail) {
                    (Some((max, lit)), TailRule::RepeatLast) if n > *max => {
                        Ok(s.parse_literal(lit)?)
                    }
                    _ => Ok(s.zero()),
                }
            }
        }
    }

    /// Build the total sequence this spec denotes.
    ///
    /// The spec is validated first; a polynomial that later injects
    /// outside the carrier (say "n-5" over natural) only fails when that
    /// index is evaluated, so callers that evaluate user input should
    /// pre-check the range with [`SeqSpec::value_at`].
    pub fn instantiate<S: Semiring>(&self, s: &S) -> Result<Seq<S::Elem>, SeqSpecError> {
        self.validate(s)?;
        let spec = self.clone();
        let s = s.clone();
        let description = self.describe();
        Ok(Seq::new(description.clone(), move |n| {
            spec.value_at(&s, n as u64).unwrap_or_else(|err| {
                panic!("sequence {description:?} undefined: {err}")
            })
        }))
    }

    /// Decide whether every value of the sequence is 0̄.
    pub fn is_identically_zero<S: Semiring>(&self, s: &S) -> Result<bool, SeqSpecError> {
        match self {
            SeqSpec::Constant(lit) => Ok(s.is_zero(&s.parse_literal(lit)?)),
            SeqSpec::Polynomial(expr) => {
                let coeffs = Expr::parse(expr)?.coefficients();
                if coeffs.len() > 1 {
                    // a nonconstant integer polynomial takes distinct values,
                    // and injection is injective where defined
                    return Ok(false);
                }
                let c = coeffs.first().cloned().unwrap_or_default();
                Ok(match s.inject_integer(&c) {
                    Ok(v) => s.is_zero(&v),
                    Err(_) => false,
                })
            }
            SeqSpec::Table { entries, .. } => {
                for (_, lit) in entries {
                    if !s.is_zero(&s.parse_literal(lit)?) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            SeqSpec::Constant(lit) => format!("constant {lit}"),
            SeqSpec::Polynomial(expr) => format!("polynomial {expr}"),
            SeqSpec::Table { entries, .. } => format!("table[{}]", entries.len()),
        }
    }
}

/// Parsed integer expression in n.
///
/// expression := term (("+"|"-") term)* ; term := factor ("*" factor)* ;
/// factor := integer | "n" | "(" expression ")". Whitespace insignificant.
#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Const(BigInt),
    N,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn parse(input: &str) -> Result<Expr, SeqSpecError> {
        let err = |message: String| SeqSpecError::Expr {
            expr: input.to_owned(),
            message,
        };
        let tokens = lex(input).map_err(&err)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expression().map_err(&err)?;
        if parser.pos != parser.tokens.len() {
            return Err(err(format!("unexpected trailing input at token {}", parser.pos)));
        }
        Ok(expr)
    }

    fn eval(&self, n: &BigInt) -> BigInt {
        match self {
            Expr::Const(c) => c.clone(),
            Expr::N => n.clone(),
            Expr::Add(a, b) => a.eval(n) + b.eval(n),
            Expr::Sub(a, b) => a.eval(n) - b.eval(n),
            Expr::Mul(a, b) => a.eval(n) * b.eval(n),
        }
    }

    /// Normalized coefficient list c0 + c1·n + c2·n² + …, trailing zeros trimmed.
    fn coefficients(&self) -> Vec<BigInt> {
        fn pad_zip(
            a: Vec<BigInt>,
            b: Vec<BigInt>,
            f: impl Fn(BigInt, BigInt) -> BigInt,
        ) -> Vec<BigInt> {
            let len = a.len().max(b.len());
            (0..len)
                .map(|i| {
                    f(
                        a.get(i).cloned().unwrap_or_default(),
                        b.get(i).cloned().unwrap_or_default(),
                    )
                })
                .collect()
        }
        let mut coeffs = match self {
            Expr::Const(c) => vec![c.clone()],
            Expr::N => vec![BigInt::ZERO, BigInt::from(1)],
            Expr::Add(a, b) => pad_zip(a.coefficients(), b.coefficients(), |x, y| x + y),
            Expr::Sub(a, b) => pad_zip(a.coefficients(), b.coefficients(), |x, y| x - y),
            Expr::Mul(a, b) => {
                let (ca, cb) = (a.coefficients(), b.coefficients());
                let mut out = vec![BigInt::ZERO; ca.len() + cb.len()];
                for (i, x) in ca.iter().enumerate() {
                    for (j, y) in cb.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
                out
            }
        };
        while coeffs.last().is_some_and(|c| *c == BigInt::ZERO) {
            coeffs.pop();
        }
        coeffs
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    N,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<Tok>, String> {
    let mut tokens = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '+' => {
                chars.next();
                tokens.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                tokens.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                tokens.push(Tok::Star);
            }
            '(' => {
                chars.next();
                tokens.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                tokens.push(Tok::RParen);
            }
            'n' => {
                chars.next();
                tokens.push(Tok::N);
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Tok::Int(digits.parse().unwrap()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expression(&mut self) -> Result<Expr, String> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, String> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            // a leading minus on a bare integer is accepted for convenience
            Some(Tok::Minus) => {
                if let Some(Tok::Int(v)) = self.tokens.get(self.pos + 1).cloned() {
                    self.pos += 2;
                    Ok(Expr::Const(-v))
                } else {
                    Err("expected integer after unary '-'".to_owned())
                }
            }
            Some(Tok::N) => {
                self.pos += 1;
                Ok(Expr::N)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expression()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err("missing closing parenthesis".to_owned())
                }
            }
            other => Err(format!("expected a factor, found {other:?}")),
        }
    }
}

/// Discrete convolution body: ⊕_{i=0..n} α(n−i) ⊗ β(i), i ascending,
/// with the factor order never commuted.
pub fn convolve_with<A, B, C>(
    n: usize,
    alpha: impl Fn(usize) -> A,
    beta: impl Fn(usize) -> B,
    mul: impl Fn(&A, &B) -> C,
    add: impl Fn(&C, &C) -> C,
) -> C {
    let mut acc = mul(&alpha(n), &beta(0));
    for i in 1..=n {
        let term = mul(&alpha(n - i), &beta(i));
        acc = add(&acc, &term);
    }
    acc
}

/// Scalar convolution over a semiring.
pub fn convolve_scalar<S: Semiring>(
    s: &S,
    alpha: &Seq<S::Elem>,
    beta: &Seq<S::Elem>,
    n: usize,
) -> S::Elem {
    convolve_with(
        n,
        |i| alpha.eval(i),
        |i| beta.eval(i),
        |a, b| s.mul(a, b),
        |a, b| s.add(a, b),
    )
}

/// Matrix-valued convolution (Mat ∗ Mat).
pub fn convolve_matrices<S: Semiring>(
    alpha: &Seq<Matrix<S>>,
    beta: &Seq<Matrix<S>>,
    n: usize,
) -> Result<Matrix<S>, LinalgError> {
    let mut acc = alpha.eval(n).mul(&beta.eval(0))?;
    for i in 1..=n {
        acc = acc.add(&alpha.eval(n - i).mul(&beta.eval(i))?)?;
    }
    Ok(acc)
}

/// Matrix-kernel convolution against a vector sequence (Mat ∗ Vec).
pub fn convolve_matrix_vector<S: Semiring>(
    alpha: &Seq<Matrix<S>>,
    beta: &Seq<Vector<S>>,
    n: usize,
) -> Result<Vector<S>, LinalgError> {
    let mut acc = alpha.eval(n).mul_vector(&beta.eval(0))?;
    for i in 1..=n {
        acc = acc.add(&alpha.eval(n - i).mul_vector(&beta.eval(i))?)?;
    }
    Ok(acc)
}

/// Fixed-argument convolution: expand ⊕_{i=0..n} K⁽ⁿ⁻ⁱ⁾(t) ⊗ β(i) with
/// the argument t held fixed throughout the expansion.
///
/// The kernel receives (count, t) where count is the convolution exponent.
pub fn convolve_fixed<S: Semiring>(
    kernel: impl Fn(usize, usize) -> Result<Matrix<S>, LinalgError>,
    beta: &Seq<Vector<S>>,
    n: usize,
    t: usize,
) -> Result<Vector<S>, LinalgError> {
    let mut acc = kernel(n, t)?.mul_vector(&beta.eval(0))?;
    for i in 1..=n {
        acc = acc.add(&kernel(n - i, t)?.mul_vector(&beta.eval(i))?)?;
    }
    Ok(acc)
}
