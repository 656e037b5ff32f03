//! Nonhomogeneous linear recurrence systems f(n+1) = A(n)·f(n) ⊕ g(n)
//! over a semiring: a direct-iteration oracle that accepts any initial
//! vector, and the closed-form convolution solutions that require the
//! initial conditions to be 0̄.
//!
//! The closed forms come in four flavors: constant or variable
//! coefficients, for a single system or for the composition of two
//! systems (the composition feeds g, the solution of the inner system,
//! into the outer one and expresses f directly in terms of the inner
//! input h).

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{FallingProducts, LinalgError, Matrix, Vector};
use crate::semiring::Semiring;
use crate::seq::{convolve_fixed, convolve_matrix_vector, Seq};

/// Coefficient part of a system: one matrix or a matrix for every n.
#[derive(Debug, Clone)]
pub enum Coefficients<S: Semiring> {
    Constant(Matrix<S>),
    Variable(Seq<Matrix<S>>),
}

impl<S: Semiring> Coefficients<S> {
    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficients::Constant(_))
    }

    pub fn at(&self, n: usize) -> Matrix<S> {
        match self {
            Coefficients::Constant(m) => m.clone(),
            Coefficients::Variable(seq) => seq.eval(n),
        }
    }

    /// View as a sequence; a constant matrix becomes a constant sequence.
    pub fn as_seq(&self) -> Seq<Matrix<S>> {
        match self {
            Coefficients::Constant(m) => Seq::constant("constant coefficients", m.clone()),
            Coefficients::Variable(seq) => seq.clone(),
        }
    }

    fn probe(&self) -> Matrix<S> {
        self.at(0)
    }
}

/// External input of a system. The identically-0̄ input is represented
/// explicitly so the homogeneous case is decidable.
#[derive(Debug, Clone)]
pub enum InputSignal<S: Semiring> {
    Zero,
    Signal(Seq<Vector<S>>),
}

impl<S: Semiring> InputSignal<S> {
    pub fn is_zero(&self) -> bool {
        matches!(self, InputSignal::Zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("coefficient matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{part} has dimension {got}, but the system dimension is {expected}")]
    DimensionMismatch {
        part: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    /// The closed forms are only claimed for f(0) = 0̄; iteration handles
    /// arbitrary initial vectors.
    #[error("closed-form solution requires a zero initial vector; iterate instead")]
    NonzeroInitial,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A k×k first-order system f(n+1) = A(n)·f(n) ⊕ g(n) with an initial
/// vector f(0).
///
/// Variable coefficient sequences must yield k×k matrices for every n and
/// input signals k-vectors; this is checked at index 0 on construction
/// and is an invariant of the sequence elsewhere.
#[derive(Debug, Clone)]
pub struct RecurrenceSystem<S: Semiring> {
    dim: usize,
    semiring: S,
    coefficients: Coefficients<S>,
    input: InputSignal<S>,
    initial: Vector<S>,
}

impl<S: Semiring> RecurrenceSystem<S> {
    pub fn new(
        coefficients: Coefficients<S>,
        input: InputSignal<S>,
        initial: Vector<S>,
    ) -> Result<Self, SystemError> {
        let probe = coefficients.probe();
        if !probe.is_square() {
            return Err(SystemError::NotSquare { rows: probe.rows(), cols: probe.cols() });
        }
        let dim = probe.rows();
        if initial.dim() != dim {
            return Err(SystemError::DimensionMismatch {
                part: "initial vector",
                expected: dim,
                got: initial.dim(),
            });
        }
        if let InputSignal::Signal(seq) = &input {
            let got = seq.eval(0).dim();
            if got != dim {
                return Err(SystemError::DimensionMismatch {
                    part: "input sequence",
                    expected: dim,
                    got,
                });
            }
        }
        Ok(Self {
            dim,
            semiring: probe.semiring().clone(),
            coefficients,
            input,
            initial,
        })
    }

    /// Convenience constructor with zero initial vector.
    pub fn with_zero_initial(
        semiring: S,
        coefficients: Coefficients<S>,
        input: InputSignal<S>,
    ) -> Result<Self, SystemError> {
        let dim = coefficients.probe().rows();
        let initial = Vector::zeros(semiring, dim)?;
        Self::new(coefficients, input, initial)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn coefficients(&self) -> &Coefficients<S> {
        &self.coefficients
    }

    pub fn input(&self) -> &InputSignal<S> {
        &self.input
    }

    pub fn initial(&self) -> &Vector<S> {
        &self.initial
    }

    pub fn is_homogeneous(&self) -> bool {
        self.input.is_zero()
    }

    pub fn has_zero_initial(&self) -> bool {
        self.initial.is_all_zero()
    }

    /// The input as a total sequence (all-0̄ for the homogeneous case).
    pub fn input_seq(&self) -> Seq<Vector<S>> {
        match &self.input {
            InputSignal::Zero => {
                let zero = Vector::zeros(self.semiring.clone(), self.dim)
                    .expect("dimension validated");
                Seq::constant("zero input", zero)
            }
            InputSignal::Signal(seq) => seq.clone(),
        }
    }

    /// Direct unrolling of the recurrence: the oracle every closed form
    /// is checked against. Accepts arbitrary initial vectors.
    pub fn iterate(&self) -> Seq<Vector<S>> {
        let coefficients = self.coefficients.clone();
        let input = self.input_seq();
        let initial = self.initial.clone();
        Seq::new("iterated solution", move |n| {
            let mut f = initial.clone();
            for m in 0..n {
                f = coefficients
                    .at(m)
                    .mul_vector(&f)
                    .expect("dimensions validated at construction")
                    .add(&input.eval(m))
                    .expect("dimensions validated at construction");
            }
            f
        })
    }

    /// Closed-form value f(n+1), dispatching on the coefficient kind.
    pub fn solve(&self, n: usize) -> Result<Vector<S>, SolveError> {
        if !self.has_zero_initial() {
            return Err(SolveError::NonzeroInitial);
        }
        let g = self.input_seq();
        match &self.coefficients {
            Coefficients::Constant(a) => solve_constant(a, &g, n),
            Coefficients::Variable(aseq) => solve_variable(aseq, &g, n),
        }
    }

    /// The whole solution as a sequence, materialized through the closed
    /// form with one shared falling-product cache.
    pub fn solution(&self) -> Result<Seq<Vector<S>>, SolveError> {
        if !self.has_zero_initial() {
            return Err(SolveError::NonzeroInitial);
        }
        let g = self.input_seq();
        let zero = self.initial.clone();
        match &self.coefficients {
            Coefficients::Constant(a) => {
                let powers = power_seq(a)?;
                Ok(Seq::new("closed-form solution", move |n| {
                    if n == 0 {
                        zero.clone()
                    } else {
                        convolve_matrix_vector(&powers, &g, n - 1)
                            .expect("dimensions validated at construction")
                    }
                }))
            }
            Coefficients::Variable(aseq) => {
                let falling = Arc::new(FallingProducts::new(aseq.clone()).map_err(SolveError::Linalg)?);
                Ok(Seq::new("closed-form solution", move |n| {
                    if n == 0 {
                        zero.clone()
                    } else {
                        solve_variable_cached(&falling, &g, n - 1)
                            .expect("dimensions validated at construction")
                    }
                }))
            }
        }
    }
}

/// Powers of a fixed matrix as a sequence m ↦ Aᵐ.
pub fn power_seq<S: Semiring>(a: &Matrix<S>) -> Result<Seq<Matrix<S>>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let a = a.clone();
    Ok(Seq::new("matrix powers", move |m| {
        a.pow(m).expect("squareness checked")
    }))
}

/// f(n+1) = Aⁿ ∗ g(n) for the constant-coefficient system with zero
/// initial vector: ⊕_{i=0..n} Aⁿ⁻ⁱ ⊗ g(i).
pub fn solve_constant<S: Semiring>(
    a: &Matrix<S>,
    g: &Seq<Vector<S>>,
    n: usize,
) -> Result<Vector<S>, SolveError> {
    let powers = power_seq(a)?;
    Ok(convolve_matrix_vector(&powers, g, n)?)
}

/// f(n+1) = [A⁽ⁿ⁾(t) ∗ g(n)] with t substituted by n after the
/// convolution has been expanded: ⊕_{i=0..n} A⁽ⁿ⁻ⁱ⁾(n) ⊗ g(i).
pub fn solve_variable<S: Semiring>(
    aseq: &Seq<Matrix<S>>,
    g: &Seq<Vector<S>>,
    n: usize,
) -> Result<Vector<S>, SolveError> {
    let falling = FallingProducts::new(aseq.clone())?;
    Ok(convolve_fixed(|count, t| falling.get(t, count), g, n, n)?)
}

fn solve_variable_cached<S: Semiring>(
    falling: &FallingProducts<S>,
    g: &Seq<Vector<S>>,
    n: usize,
) -> Result<Vector<S>, LinalgError> {
    convolve_fixed(|count, t| falling.get(t, count), g, n, n)
}

/// f(n+2) = Aⁿ ∗ [Bⁿ ∗ h(n)] for two composed constant systems with zero
/// initial vectors.
pub fn solve_composed_constant<S: Semiring>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    h: &Seq<Vector<S>>,
    n: usize,
) -> Result<Vector<S>, SolveError> {
    let a_powers = power_seq(a)?;
    let b_powers = power_seq(b)?;
    let h = h.clone();
    let inner = Seq::new("inner convolution", move |m| {
        convolve_matrix_vector(&b_powers, &h, m).expect("dimensions validated by caller")
    });
    // probe once so a dimension mismatch surfaces as an error, not a panic
    let _ = b.mul_vector(&inner.eval(0).clone()).map_err(SolveError::Linalg)?;
    Ok(convolve_matrix_vector(&a_powers, &inner, n)?)
}

/// f(n+2) = [A⁽ⁿ⁾(t) ∗ [B⁽ⁿ⁾(s) ∗ h(n)]_{s=n}]_{t=n+1} for two composed
/// variable systems with zero initial vectors.
///
/// The inner bracket is expanded per convolution index m with s held and
/// then substituted by m; the outer convolution holds t and substitutes
/// t = n+1 at the end, in exactly that bracket order.
pub fn solve_composed_variable<S: Semiring>(
    aseq: &Seq<Matrix<S>>,
    bseq: &Seq<Matrix<S>>,
    h: &Seq<Vector<S>>,
    n: usize,
) -> Result<Vector<S>, SolveError> {
    let falling_a = Arc::new(FallingProducts::new(aseq.clone())?);
    let falling_b = Arc::new(FallingProducts::new(bseq.clone())?);
    solve_composed_variable_cached(&falling_a, &falling_b, h, n)
}

fn solve_composed_variable_cached<S: Semiring>(
    falling_a: &Arc<FallingProducts<S>>,
    falling_b: &Arc<FallingProducts<S>>,
    h: &Seq<Vector<S>>,
    n: usize,
) -> Result<Vector<S>, SolveError> {
    let inner = composed_inner_seq(falling_b, h)?;
    Ok(convolve_fixed(
        |count, t| falling_a.get(t, count),
        &inner,
        n,
        n + 1,
    )?)
}

/// The sequence m ↦ [B⁽ᵐ⁾(s) ∗ h(m)]_{s=m}, i.e. the inner system's
/// solution read at m+1.
fn composed_inner_seq<S: Semiring>(
    falling_b: &Arc<FallingProducts<S>>,
    h: &Seq<Vector<S>>,
) -> Result<Seq<Vector<S>>, SolveError> {
    // probe for conformance before moving into the infallible closure
    let _ = falling_b.get(0, 0)?.mul_vector(&h.eval(0))?;
    let falling_b = Arc::clone(falling_b);
    let h = h.clone();
    Ok(Seq::new("inner bracket", move |m| {
        convolve_fixed(|count, t| falling_b.get(t, count), &h, m, m)
            .expect("conformance probed at construction")
    }))
}

/// Composition of two k×k systems: the outer input is by construction
/// the solution sequence of the inner system.
#[derive(Debug, Clone)]
pub struct ComposedSystem<S: Semiring> {
    outer_coefficients: Coefficients<S>,
    outer_initial: Vector<S>,
    inner: RecurrenceSystem<S>,
}

impl<S: Semiring> ComposedSystem<S> {
    pub fn new(
        outer_coefficients: Coefficients<S>,
        outer_initial: Vector<S>,
        inner: RecurrenceSystem<S>,
    ) -> Result<Self, SystemError> {
        let probe = outer_coefficients.probe();
        if !probe.is_square() {
            return Err(SystemError::NotSquare { rows: probe.rows(), cols: probe.cols() });
        }
        if probe.rows() != inner.dim() {
            return Err(SystemError::DimensionMismatch {
                part: "outer coefficients",
                expected: inner.dim(),
                got: probe.rows(),
            });
        }
        if outer_initial.dim() != inner.dim() {
            return Err(SystemError::DimensionMismatch {
                part: "outer initial vector",
                expected: inner.dim(),
                got: outer_initial.dim(),
            });
        }
        Ok(Self { outer_coefficients, outer_initial, inner })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn semiring(&self) -> &S {
        self.inner.semiring()
    }

    pub fn inner(&self) -> &RecurrenceSystem<S> {
        &self.inner
    }

    pub fn outer_coefficients(&self) -> &Coefficients<S> {
        &self.outer_coefficients
    }

    pub fn outer_initial(&self) -> &Vector<S> {
        &self.outer_initial
    }

    /// True when both coefficient parts are constant matrices.
    pub fn is_constant(&self) -> bool {
        self.outer_coefficients.is_constant() && self.inner.coefficients().is_constant()
    }

    pub fn has_zero_initials(&self) -> bool {
        self.outer_initial.is_all_zero() && self.inner.has_zero_initial()
    }

    /// The outer system with its input wired to the iterated solution of
    /// the inner system.
    pub fn outer_system(&self) -> RecurrenceSystem<S> {
        RecurrenceSystem::new(
            self.outer_coefficients.clone(),
            InputSignal::Signal(self.inner.iterate()),
            self.outer_initial.clone(),
        )
        .expect("dimensions validated at construction")
    }

    /// Oracle: iterate the inner system, feed it to the outer, iterate.
    pub fn iterate(&self) -> Seq<Vector<S>> {
        self.outer_system().iterate()
    }

    /// Closed-form value f(n+2) in terms of the inner input h.
    pub fn solve(&self, n: usize) -> Result<Vector<S>, SolveError> {
        if !self.has_zero_initials() {
            return Err(SolveError::NonzeroInitial);
        }
        let h = self.inner.input_seq();
        match (&self.outer_coefficients, self.inner.coefficients()) {
            (Coefficients::Constant(a), Coefficients::Constant(b)) => {
                solve_composed_constant(a, b, &h, n)
            }
            (outer, inner) => solve_composed_variable(&outer.as_seq(), &inner.as_seq(), &h, n),
        }
    }

    /// The whole solution f as a sequence via the closed form, with
    /// falling-product caches shared across all indices.
    pub fn solution(&self) -> Result<Seq<Vector<S>>, SolveError> {
        if !self.has_zero_initials() {
            return Err(SolveError::NonzeroInitial);
        }
        let h = self.inner.input_seq();
        let zero = self.outer_initial.clone();
        match (&self.outer_coefficients, self.inner.coefficients()) {
            (Coefficients::Constant(a), Coefficients::Constant(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Ok(Seq::new("composed closed-form solution", move |n| {
                    if n < 2 {
                        zero.clone()
                    } else {
                        solve_composed_constant(&a, &b, &h, n - 2)
                            .expect("dimensions validated at construction")
                    }
                }))
            }
            (outer, inner) => {
                let falling_a = Arc::new(FallingProducts::new(outer.as_seq())?);
                let falling_b = Arc::new(FallingProducts::new(inner.as_seq())?);
                Ok(Seq::new("composed closed-form solution", move |n| {
                    if n < 2 {
                        zero.clone()
                    } else {
                        solve_composed_variable_cached(&falling_a, &falling_b, &h, n - 2)
                            .expect("dimensions validated at construction")
                    }
                }))
            }
        }
    }
}
