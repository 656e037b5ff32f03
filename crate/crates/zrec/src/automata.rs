//! Weighted finite automata over the one-letter alphabet {z}.
//!
//! With a single letter, a word is just a length, so the automaton is a
//! directed graph whose length-n walks are what matters. Every output
//! state p generates the function f_p(n) = ⊕ over all length-n paths
//! from p of the ⊗-product of edge weights along the path; those
//! functions satisfy exactly the linear recurrence system whose
//! coefficient a_ij is the weight of the edge f_i → f_j. Nonhomogeneous
//! systems add one input state g_i per component, holding the input
//! value and wired to f_i by a single edge of weight 1̄.
//!
//! Path enumeration is the brute-force oracle for the matrix semantics;
//! it exists for desk-scale verification and is bounded accordingly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::{Matrix, Vector, MAX_DIM};
use crate::semiring::Semiring;
use crate::seq::Seq;
use crate::solver::{Coefficients, InputSignal, RecurrenceSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("unknown state {name:?}")]
    UnknownState { name: String },
    #[error("duplicate state name {name:?}")]
    DuplicateState { name: String },
    #[error("duplicate edge {from:?} -> {to:?}")]
    DuplicateEdge { from: String, to: String },
    #[error("automaton needs at least one output state and at most {MAX_DIM}, got {got}")]
    StateCount { got: usize },
    #[error("input state {name:?} violates the required structure: {reason}")]
    InputStructure { name: String, reason: String },
    #[error("path length {length} exceeds the enumeration bound {bound}")]
    LengthBound { length: usize, bound: usize },
    #[error("enumeration exceeded the cap of {cap} paths")]
    TooManyPaths { cap: usize },
    #[error("path-weight semantics is defined for homogeneous automata; iterate the generated system instead")]
    NonhomogeneousPathSum,
}

/// An edge weight: either one carrier value or a value per time step.
#[derive(Debug, Clone)]
pub enum Weight<S: Semiring> {
    Constant(S::Elem),
    Varying(Seq<S::Elem>),
}

impl<S: Semiring> Weight<S> {
    pub fn at(&self, n: usize) -> S::Elem {
        match self {
            Weight::Constant(v) => v.clone(),
            Weight::Varying(seq) => seq.eval(n),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Weight::Constant(_))
    }
}

/// An edge named by state names, before index resolution.
#[derive(Debug, Clone)]
pub struct RawEdge<S: Semiring> {
    pub from: String,
    pub to: String,
    pub weight: Weight<S>,
}

/// A resolved edge between output states.
#[derive(Debug, Clone)]
pub struct Edge<S: Semiring> {
    pub from: usize,
    pub to: usize,
    pub weight: Weight<S>,
}

/// An input state: one per fed component, holding the input function and
/// wired to its output state by an implicit edge of weight 1̄.
#[derive(Debug, Clone)]
pub struct InputState<S: Semiring> {
    pub name: String,
    pub target: usize,
    pub value: Seq<S::Elem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomatonKind {
    Homogeneous,
    Nonhomogeneous,
}

/// A weighted automaton over {z}, validated at construction.
#[derive(Debug, Clone)]
pub struct WeightedAutomaton<S: Semiring> {
    semiring: S,
    states: Vec<String>,
    edges: Vec<Edge<S>>,
    inputs: Vec<InputState<S>>,
    /// outgoing edge indices per state, in declared edge order
    adjacency: Vec<Vec<usize>>,
}

impl<S: Semiring> WeightedAutomaton<S> {
    /// Build and validate an automaton from raw named parts.
    ///
    /// `edges` may mention both output and input states; the input-state
    /// edges must follow the required structure (exactly one outgoing
    /// edge per input state, to an output state, with constant weight 1̄,
    /// and no incoming edges). `input_values` supplies the function each
    /// input state holds; missing entries default to the all-0̄ sequence.
    pub fn new(
        semiring: S,
        output_states: Vec<String>,
        input_states: Vec<String>,
        edges: Vec<RawEdge<S>>,
        mut input_values: BTreeMap<String, Seq<S::Elem>>,
    ) -> Result<Self, AutomatonError> {
        if output_states.is_empty() || output_states.len() > MAX_DIM {
            return Err(AutomatonError::StateCount { got: output_states.len() });
        }
        let mut seen: Vec<&str> = Vec::new();
        for name in output_states.iter().chain(input_states.iter()) {
            if seen.contains(&name.as_str()) {
                return Err(AutomatonError::DuplicateState { name: name.clone() });
            }
            seen.push(name);
        }
        for key in input_values.keys() {
            if !input_states.contains(key) {
                return Err(AutomatonError::UnknownState { name: key.clone() });
            }
        }

        let output_index = |name: &str| output_states.iter().position(|s| s == name);
        let input_index = |name: &str| input_states.iter().position(|s| s == name);

        let mut resolved: Vec<Edge<S>> = Vec::new();
        let mut input_edges: BTreeMap<String, Vec<&RawEdge<S>>> = BTreeMap::new();
        for edge in &edges {
            if input_index(&edge.to).is_some() {
                return Err(AutomatonError::InputStructure {
                    name: edge.to.clone(),
                    reason: format!("incoming edge from {:?}", edge.from),
                });
            }
            if let Some(_) = input_index(&edge.from) {
                input_edges.entry(edge.from.clone()).or_default().push(edge);
                continue;
            }
            let from = output_index(&edge.from)
                .ok_or_else(|| AutomatonError::UnknownState { name: edge.from.clone() })?;
            let to = output_index(&edge.to)
                .ok_or_else(|| AutomatonError::UnknownState { name: edge.to.clone() })?;
            if resolved.iter().any(|e| e.from == from && e.to == to) {
                return Err(AutomatonError::DuplicateEdge {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                });
            }
            resolved.push(Edge { from, to, weight: edge.weight.clone() });
        }

        let mut inputs = Vec::new();
        let mut targets_taken: Vec<usize> = Vec::new();
        for name in &input_states {
            let outgoing = input_edges.remove(name).unwrap_or_default();
            let edge = match outgoing.as_slice() {
                [single] => *single,
                [] => {
                    return Err(AutomatonError::InputStructure {
                        name: name.clone(),
                        reason: "no outgoing edge".to_owned(),
                    })
                }
                many => {
                    return Err(AutomatonError::InputStructure {
                        name: name.clone(),
                        reason: format!("{} outgoing edges, expected exactly one", many.len()),
                    })
                }
            };
            let target = output_index(&edge.to).ok_or_else(|| AutomatonError::InputStructure {
                name: name.clone(),
                reason: format!("edge target {:?} is not an output state", edge.to),
            })?;
            match &edge.weight {
                Weight::Constant(w) if semiring.is_one(w) => {}
                Weight::Constant(w) => {
                    return Err(AutomatonError::InputStructure {
                        name: name.clone(),
                        reason: format!(
                            "outgoing edge weight is {}, must be 1̄",
                            semiring.render(w)
                        ),
                    })
                }
                Weight::Varying(_) => {
                    return Err(AutomatonError::InputStructure {
                        name: name.clone(),
                        reason: "outgoing edge weight must be the constant 1̄".to_owned(),
                    })
                }
            }
            if targets_taken.contains(&target) {
                return Err(AutomatonError::InputStructure {
                    name: name.clone(),
                    reason: format!("output state {:?} is already fed", output_states[target]),
                });
            }
            targets_taken.push(target);
            let zero = semiring.zero();
            let value = input_values
                .remove(name)
                .unwrap_or_else(|| Seq::constant("zero input", zero));
            inputs.push(InputState { name: name.clone(), target, value });
        }

        let mut adjacency = vec![Vec::new(); output_states.len()];
        for (idx, edge) in resolved.iter().enumerate() {
            adjacency[edge.from].push(idx);
        }

        Ok(Self {
            semiring,
            states: output_states,
            edges: resolved,
            inputs,
            adjacency,
        })
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn inputs(&self) -> &[InputState<S>] {
        &self.inputs
    }

    pub fn kind(&self) -> AutomatonKind {
        if self.inputs.is_empty() {
            AutomatonKind::Homogeneous
        } else {
            AutomatonKind::Nonhomogeneous
        }
    }

    pub fn state_index(&self, name: &str) -> Result<usize, AutomatonError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| AutomatonError::UnknownState { name: name.to_owned() })
    }

    /// All length-n paths over output states starting at `from`,
    /// depth-first in declared edge order. The order is part of the
    /// reproducible output.
    pub fn enumerate_paths(&self, from: &str, length: usize) -> Result<Vec<Path>, AutomatonError> {
        self.enumerate_paths_with(from, length, EnumLimits::default())
    }

    pub fn enumerate_paths_with(
        &self,
        from: &str,
        length: usize,
        limits: EnumLimits,
    ) -> Result<Vec<Path>, AutomatonError> {
        if length > limits.max_length {
            return Err(AutomatonError::LengthBound {
                length,
                bound: limits.max_length,
            });
        }
        let start = self.state_index(from)?;
        let mut paths = Vec::new();
        let mut steps = Vec::with_capacity(length);
        self.dfs(start, start, length, &mut steps, &mut paths, limits.max_paths)?;
        Ok(paths)
    }

    fn dfs(
        &self,
        start: usize,
        here: usize,
        remaining: usize,
        steps: &mut Vec<usize>,
        paths: &mut Vec<Path>,
        cap: usize,
    ) -> Result<(), AutomatonError> {
        if remaining == 0 {
            if paths.len() >= cap {
                return Err(AutomatonError::TooManyPaths { cap });
            }
            paths.push(Path { start, steps: steps.clone() });
            return Ok(());
        }
        for &edge_idx in &self.adjacency[here] {
            steps.push(edge_idx);
            self.dfs(start, self.edges[edge_idx].to, remaining - 1, steps, paths, cap)?;
            steps.pop();
        }
        Ok(())
    }

    /// ⊗-product of the edge weights along a path.
    ///
    /// For variable weights, a path of length n takes its first edge at
    /// time n−1, its second at n−2, and its last at 0, so the product
    /// realizes A(n−1)⋯A(0) read along the walk. This is the unique
    /// indexing under which path sums agree with iterating
    /// f(n+1) = A(n)·f(n).
    pub fn path_weight(&self, path: &Path) -> S::Elem {
        let n = path.steps.len();
        let mut acc = self.semiring.one();
        for (step, &edge_idx) in path.steps.iter().enumerate() {
            let weight = self.edges[edge_idx].weight.at(n - 1 - step);
            acc = self.semiring.mul(&acc, &weight);
        }
        acc
    }

    /// f_p(n): the ⊕-sum of the weights of all length-n paths from `from`.
    ///
    /// Defined for the homogeneous automaton; a nonhomogeneous automaton
    /// is evaluated by iterating the system it generates.
    pub fn path_weight_sum(&self, from: &str, length: usize) -> Result<S::Elem, AutomatonError> {
        self.path_weight_sum_with(from, length, EnumLimits::default())
    }

    pub fn path_weight_sum_with(
        &self,
        from: &str,
        length: usize,
        limits: EnumLimits,
    ) -> Result<S::Elem, AutomatonError> {
        if self.kind() != AutomatonKind::Homogeneous {
            return Err(AutomatonError::NonhomogeneousPathSum);
        }
        let paths = self.enumerate_paths_with(from, length, limits)?;
        let mut acc = self.semiring.zero();
        for path in &paths {
            acc = self.semiring.add(&acc, &self.path_weight(path));
        }
        Ok(acc)
    }

    /// Human-readable walk, e.g. `f1 -> f2 -> f1`.
    pub fn render_path(&self, path: &Path) -> String {
        let mut out = self.states[path.start].clone();
        for &edge_idx in &path.steps {
            out.push_str(" -> ");
            out.push_str(&self.states[self.edges[edge_idx].to]);
        }
        out
    }
}

/// Bounds for the brute-force enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumLimits {
    pub max_length: usize,
    pub max_paths: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        Self {
            max_length: 10,
            max_paths: 1_000_000,
        }
    }
}

/// A walk: the start state plus edge indices into the automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub start: usize,
    pub steps: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Read a system off as an automaton: one output state per component,
/// one edge f_i → f_j per coefficient entry a_ij (provably-0̄ constant
/// entries are omitted), and for a nonhomogeneous system one input state
/// per component carrying that component of the input.
pub fn system_to_automaton<S: Semiring>(sys: &RecurrenceSystem<S>) -> WeightedAutomaton<S> {
    let k = sys.dim();
    let s = sys.semiring().clone();
    let states: Vec<String> = (1..=k).map(|i| format!("f{i}")).collect();

    let mut edges = Vec::new();
    match sys.coefficients() {
        Coefficients::Constant(a) => {
            for i in 0..k {
                for j in 0..k {
                    let w = a.get(i, j);
                    if !s.is_zero(w) {
                        edges.push(RawEdge {
                            from: states[i].clone(),
                            to: states[j].clone(),
                            weight: Weight::Constant(w.clone()),
                        });
                    }
                }
            }
        }
        Coefficients::Variable(aseq) => {
            // a black-box sequence cannot be proven zero, so every entry
            // gets an edge
            for i in 0..k {
                for j in 0..k {
                    let entry = aseq.map(format!("a[{i}][{j}]"), move |m: &Matrix<S>| {
                        m.get(i, j).clone()
                    });
                    edges.push(RawEdge {
                        from: states[i].clone(),
                        to: states[j].clone(),
                        weight: Weight::Varying(entry),
                    });
                }
            }
        }
    }

    let mut input_states = Vec::new();
    let mut input_values = BTreeMap::new();
    if let InputSignal::Signal(g) = sys.input() {
        for i in 0..k {
            let name = format!("g{}", i + 1);
            edges.push(RawEdge {
                from: name.clone(),
                to: states[i].clone(),
                weight: Weight::Constant(s.one()),
            });
            let component = g.map(format!("g[{i}]"), move |v: &Vector<S>| v.get(i).clone());
            input_values.insert(name.clone(), component);
            input_states.push(name);
        }
    }

    WeightedAutomaton::new(s, states, input_states, edges, input_values)
        .expect("generated automaton is structurally valid")
}

/// The inverse reading: the system the automaton generates, with zero
/// initial vector. Missing edges become 0̄ entries; components without
/// an input state get the 0̄ input.
pub fn automaton_to_system<S: Semiring>(
    aut: &WeightedAutomaton<S>,
) -> Result<RecurrenceSystem<S>, AutomatonError> {
    let k = aut.states().len();
    let s = aut.semiring().clone();

    let all_constant = aut.edges().iter().all(|e| e.weight.is_constant());
    let coefficients = if all_constant {
        let mut entries = vec![s.zero(); k * k];
        for edge in aut.edges() {
            entries[edge.from * k + edge.to] = edge.weight.at(0);
        }
        Coefficients::Constant(
            Matrix::new(s.clone(), k, k, entries).expect("state count validated"),
        )
    } else {
        let aut = aut.clone();
        let s2 = s.clone();
        Coefficients::Variable(Seq::new("automaton coefficients", move |n| {
            let mut entries = vec![s2.zero(); k * k];
            for edge in aut.edges() {
                entries[edge.from * k + edge.to] = edge.weight.at(n);
            }
            Matrix::new(s2.clone(), k, k, entries).expect("state count validated")
        }))
    };

    let input = if aut.inputs().is_empty() {
        InputSignal::Zero
    } else {
        let inputs: Vec<InputState<S>> = aut.inputs().to_vec();
        let s2 = s.clone();
        InputSignal::Signal(Seq::new("automaton input", move |n| {
            let mut entries = vec![s2.zero(); k];
            for input in &inputs {
                entries[input.target] = input.value.eval(n);
            }
            Vector::new(s2.clone(), entries).expect("state count validated")
        }))
    };

    let initial = Vector::zeros(s, k).expect("state count validated");
    Ok(RecurrenceSystem::new(coefficients, input, initial)
        .expect("dimensions consistent by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Builtin, MinPlus, MinPlusElem, Natural, Semiring};
    use crate::seq::SeqSpec;
    use crate::with_semiring;
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nat(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn loop_automaton(weight: u64) -> WeightedAutomaton<Natural> {
        WeightedAutomaton::new(
            Natural,
            vec!["p".into()],
            vec![],
            vec![RawEdge {
                from: "p".into(),
                to: "p".into(),
                weight: Weight::Constant(nat(weight)),
            }],
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn empty_path_at_length_zero() {
        let aut = loop_automaton(2);
        let paths = aut.enumerate_paths("p", 0).unwrap();
        assert_eq!(paths.len(), 1);
        assert!(paths[0].is_empty());
        assert_eq!(aut.path_weight(&paths[0]), nat(1));
    }

    #[test]
    fn self_loop_has_one_path_per_length() {
        let aut = loop_automaton(2);
        for n in 0..=6 {
            let paths = aut.enumerate_paths("p", n).unwrap();
            assert_eq!(paths.len(), 1);
        }
        // one path of length 3 with weight 2·2·2 = 8
        assert_eq!(aut.path_weight_sum("p", 3).unwrap(), nat(8));
    }

    fn complete_two_state() -> WeightedAutomaton<Natural> {
        let mut edges = Vec::new();
        for from in ["p", "q"] {
            for to in ["p", "q"] {
                edges.push(RawEdge {
                    from: from.into(),
                    to: to.into(),
                    weight: Weight::Constant(nat(1)),
                });
            }
        }
        WeightedAutomaton::new(Natural, vec!["p".into(), "q".into()], vec![], edges, BTreeMap::new())
            .unwrap()
    }

    #[test]
    fn complete_graph_path_counts() {
        let aut = complete_two_state();
        for state in ["p", "q"] {
            assert_eq!(aut.enumerate_paths(state, 3).unwrap().len(), 8);
        }
    }

    #[test]
    fn enumeration_bounds() {
        let aut = complete_two_state();
        assert!(matches!(
            aut.enumerate_paths("p", 11),
            Err(AutomatonError::LengthBound { length: 11, bound: 10 })
        ));
        let limits = EnumLimits { max_length: 20, max_paths: 100 };
        assert!(matches!(
            aut.enumerate_paths_with("p", 8, limits),
            Err(AutomatonError::TooManyPaths { cap: 100 })
        ));
    }

    #[test]
    fn path_sum_matches_matrix_power_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for b in Builtin::ALL {
            with_semiring!(b, s => {
                let pool = crate::laws::canonical_samples(s.name());
                for _ in 0..4 {
                    let k = 3;
                    let picks: Vec<usize> = (0..k * k).map(|_| rng.random_range(0..4)).collect();
                    let a = Matrix::from_fn(s.clone(), k, k, |i, j| {
                        s.parse_literal(pool[picks[i * k + j]]).unwrap()
                    })
                    .unwrap();
                    let sys = RecurrenceSystem::with_zero_initial(
                        s.clone(),
                        Coefficients::Constant(a.clone()),
                        InputSignal::Zero,
                    )
                    .unwrap();
                    let aut = system_to_automaton(&sys);
                    for n in 0..=7usize {
                        let power = a.pow(n).unwrap();
                        for i in 0..k {
                            let mut row_sum = s.zero();
                            for j in 0..k {
                                row_sum = s.add(&row_sum, power.get(i, j));
                            }
                            let got = aut.path_weight_sum(&format!("f{}", i + 1), n).unwrap();
                            assert_eq!(got, row_sum, "{} row {i} length {n}", s.name());
                        }
                    }
                }
            });
        }
    }

    #[test]
    fn boolean_path_sum_is_reachability() {
        // f1 -> f2 only: a length-n path exists from f1 iff n ≤ 1
        let aut = WeightedAutomaton::new(
            Boolean,
            vec!["f1".into(), "f2".into()],
            vec![],
            vec![RawEdge { from: "f1".into(), to: "f2".into(), weight: Weight::Constant(true) }],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(aut.path_weight_sum("f1", 0).unwrap());
        assert!(aut.path_weight_sum("f1", 1).unwrap());
        assert!(!aut.path_weight_sum("f1", 2).unwrap());
    }

    #[test]
    fn min_plus_path_sum_is_shortest_walk() {
        // two states, cheap long way round vs expensive self-loop
        let fin = |v: i64| MinPlusElem::Finite(v.into());
        let aut = WeightedAutomaton::new(
            MinPlus,
            vec!["a".into(), "b".into()],
            vec![],
            vec![
                RawEdge { from: "a".into(), to: "a".into(), weight: Weight::Constant(fin(5)) },
                RawEdge { from: "a".into(), to: "b".into(), weight: Weight::Constant(fin(1)) },
                RawEdge { from: "b".into(), to: "a".into(), weight: Weight::Constant(fin(1)) },
            ],
            BTreeMap::new(),
        )
        .unwrap();
        // exhaustive oracle over all length-n state sequences in plain arithmetic
        let weights = |from: usize, to: usize| -> Option<i64> {
            match (from, to) {
                (0, 0) => Some(5),
                (0, 1) => Some(1),
                (1, 0) => Some(1),
                _ => None,
            }
        };
        for n in 0..=7usize {
            let mut best: Option<i64> = None;
            let mut stack = vec![(0usize, 0usize, 0i64)];
            while let Some((state, depth, cost)) = stack.pop() {
                if depth == n {
                    best = Some(best.map_or(cost, |b| b.min(cost)));
                    continue;
                }
                for next in 0..2 {
                    if let Some(w) = weights(state, next) {
                        stack.push((next, depth + 1, cost + w));
                    }
                }
            }
            let expected = match best {
                Some(v) => fin(v),
                None => MinPlusElem::Infinity,
            };
            assert_eq!(aut.path_weight_sum("a", n).unwrap(), expected, "length {n}");
        }
    }

    fn variable_scalar_system() -> RecurrenceSystem<Natural> {
        let aseq = SeqSpec::polynomial("n+1")
            .instantiate(&Natural)
            .unwrap()
            .map("A", |e| Matrix::new(Natural, 1, 1, vec![e.clone()]).unwrap());
        RecurrenceSystem::with_zero_initial(Natural, Coefficients::Variable(aseq), InputSignal::Zero)
            .unwrap()
    }

    #[test]
    fn variable_path_sums_match_iteration_from_ones() {
        // 2×2 variable homogeneous system: path sums from p equal the
        // iteration f(n+1) = A(n)·f(n) started from the all-1̄ vector
        let aseq = Seq::new("A", |n| {
            let n = n as u64;
            Matrix::new(
                Natural,
                2,
                2,
                vec![nat(n + 1), nat(1), nat(n % 2), nat(2)],
            )
            .unwrap()
        });
        let sys = RecurrenceSystem::new(
            Coefficients::Variable(aseq),
            InputSignal::Zero,
            Vector::ones(Natural, 2).unwrap(),
        )
        .unwrap();
        let aut = system_to_automaton(&sys);
        let f = sys.iterate();
        for n in 0..=7 {
            let expected = f.eval(n);
            for i in 0..2 {
                assert_eq!(
                    aut.path_weight_sum(&format!("f{}", i + 1), n).unwrap(),
                    *expected.get(i)
                );
            }
        }
    }

    #[test]
    fn worked_outer_system_shape() {
        // f(n+1) = (n+1)·f(n) + g(n): one output state with a varying
        // self-loop, one input state wired by a weight-1̄ edge
        let aseq = SeqSpec::polynomial("n+1")
            .instantiate(&Natural)
            .unwrap()
            .map("A", |e| Matrix::new(Natural, 1, 1, vec![e.clone()]).unwrap());
        let g = SeqSpec::polynomial("n")
            .instantiate(&Natural)
            .unwrap()
            .map("g", |e| Vector::new(Natural, vec![e.clone()]).unwrap());
        let sys = RecurrenceSystem::with_zero_initial(
            Natural,
            Coefficients::Variable(aseq),
            InputSignal::Signal(g),
        )
        .unwrap();
        let aut = system_to_automaton(&sys);
        assert_eq!(aut.states(), ["f1".to_owned()]);
        assert_eq!(aut.inputs().len(), 1);
        assert_eq!(aut.inputs()[0].name, "g1");
        assert_eq!(aut.inputs()[0].target, 0);
        assert_eq!(aut.kind(), AutomatonKind::Nonhomogeneous);
        assert_eq!(aut.edges().len(), 1);
        let w = &aut.edges()[0].weight;
        assert_eq!(w.at(0), nat(1));
        assert_eq!(w.at(3), nat(4));
    }

    #[test]
    fn zero_system_gives_isolated_states() {
        let sys = RecurrenceSystem::with_zero_initial(
            Natural,
            Coefficients::Constant(Matrix::zeros(Natural, 3, 3).unwrap()),
            InputSignal::Zero,
        )
        .unwrap();
        let aut = system_to_automaton(&sys);
        assert_eq!(aut.states().len(), 3);
        assert!(aut.edges().is_empty());
        assert!(aut.inputs().is_empty());
    }

    #[test]
    fn homogeneous_round_trip_gives_zero_input() {
        let sys = variable_scalar_system();
        let aut = system_to_automaton(&sys);
        let back = automaton_to_system(&aut).unwrap();
        assert!(back.is_homogeneous());
    }

    #[test]
    fn bad_input_edge_weight_rejected() {
        let got = WeightedAutomaton::new(
            Natural,
            vec!["f1".into()],
            vec!["g1".into()],
            vec![
                RawEdge { from: "f1".into(), to: "f1".into(), weight: Weight::Constant(nat(2)) },
                RawEdge { from: "g1".into(), to: "f1".into(), weight: Weight::Constant(nat(3)) },
            ],
            BTreeMap::new(),
        );
        match got {
            Err(AutomatonError::InputStructure { name, .. }) => assert_eq!(name, "g1"),
            other => panic!("expected input-structure violation, got {other:?}"),
        }
    }

    #[test]
    fn input_state_with_two_edges_rejected() {
        let one = Weight::Constant(nat(1));
        let got = WeightedAutomaton::new(
            Natural,
            vec!["f1".into(), "f2".into()],
            vec!["g1".into()],
            vec![
                RawEdge { from: "g1".into(), to: "f1".into(), weight: one.clone() },
                RawEdge { from: "g1".into(), to: "f2".into(), weight: one },
            ],
            BTreeMap::new(),
        );
        assert!(matches!(got, Err(AutomatonError::InputStructure { .. })));
    }

    #[test]
    fn incoming_edge_to_input_rejected() {
        let got = WeightedAutomaton::new(
            Natural,
            vec!["f1".into()],
            vec!["g1".into()],
            vec![
                RawEdge { from: "g1".into(), to: "f1".into(), weight: Weight::Constant(nat(1)) },
                RawEdge { from: "f1".into(), to: "g1".into(), weight: Weight::Constant(nat(1)) },
            ],
            BTreeMap::new(),
        );
        assert!(matches!(got, Err(AutomatonError::InputStructure { .. })));
    }

    #[test]
    fn round_trip_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..10 {
            let k = rng.random_range(1..=3);
            let variable = trial % 2 == 0;
            let coefficients = if variable {
                let offsets: Vec<u64> = (0..k * k).map(|_| rng.random_range(0..3)).collect();
                let kk = k;
                Coefficients::Variable(Seq::new("A", move |n| {
                    Matrix::from_fn(Natural, kk, kk, |i, j| {
                        nat(offsets[i * kk + j] + n as u64 % 3)
                    })
                    .unwrap()
                }))
            } else {
                Coefficients::Constant(
                    Matrix::from_fn(Natural, k, k, |_, _| nat(rng.random_range(0..3))).unwrap(),
                )
            };
            let base: u64 = rng.random_range(0..4);
            let kk = k;
            let input = InputSignal::Signal(Seq::new("g", move |n| {
                Vector::new(
                    Natural,
                    (0..kk).map(|i| nat((n as u64 + base + i as u64) % 5)).collect(),
                )
                .unwrap()
            }));
            let sys = RecurrenceSystem::with_zero_initial(Natural, coefficients, input).unwrap();
            let back = automaton_to_system(&system_to_automaton(&sys)).unwrap();
            assert_eq!(back.dim(), sys.dim());
            for n in 0..=12 {
                assert_eq!(
                    back.coefficients().at(n),
                    sys.coefficients().at(n),
                    "coefficients at {n}"
                );
                assert_eq!(back.input_seq().eval(n), sys.input_seq().eval(n), "input at {n}");
            }
            // and the generated functions agree
            let (f1, f2) = (sys.iterate(), back.iterate());
            for n in 0..=8 {
                assert_eq!(f1.eval(n), f2.eval(n));
            }
        }
    }

    #[test]
    fn nonhomogeneous_path_sum_rejected() {
        let sys = RecurrenceSystem::with_zero_initial(
            Natural,
            Coefficients::Constant(Matrix::new(Natural, 1, 1, vec![nat(2)]).unwrap()),
            InputSignal::Signal(Seq::constant(
                "ones",
                Vector::new(Natural, vec![nat(1)]).unwrap(),
            )),
        )
        .unwrap();
        let aut = system_to_automaton(&sys);
        assert!(matches!(
            aut.path_weight_sum("f1", 3),
            Err(AutomatonError::NonhomogeneousPathSum)
        ));
    }

    #[test]
    fn render_path_output() {
        let aut = complete_two_state();
        let paths = aut.enumerate_paths("p", 2).unwrap();
        assert_eq!(aut.render_path(&paths[0]), "p -> p -> p");
        assert_eq!(aut.render_path(&paths[1]), "p -> p -> q");
    }
}
