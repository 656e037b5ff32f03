//! Exhaustive semiring-law checking over finite sample sets.
//!
//! Failures are data, not errors: the report lists every law with a
//! pass/fail verdict and the first counterexample found, so a broken
//! descriptor can be diagnosed rather than merely rejected.

use std::fmt;

use serde::Serialize;

use crate::semiring::Semiring;

/// The laws the checker tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Law {
    AddAssociativity,
    AddCommutativity,
    AddIdentity,
    MulAssociativity,
    MulIdentity,
    MulCommutativity,
    LeftDistributivity,
    RightDistributivity,
    Annihilation,
}

impl Law {
    pub fn description(&self) -> &'static str {
        match self {
            Law::AddAssociativity => "(a ⊕ b) ⊕ c = a ⊕ (b ⊕ c)",
            Law::AddCommutativity => "a ⊕ b = b ⊕ a",
            Law::AddIdentity => "a ⊕ 0̄ = a = 0̄ ⊕ a",
            Law::MulAssociativity => "(a ⊗ b) ⊗ c = a ⊗ (b ⊗ c)",
            Law::MulIdentity => "a ⊗ 1̄ = a = 1̄ ⊗ a",
            Law::MulCommutativity => "a ⊗ b = b ⊗ a",
            Law::LeftDistributivity => "a ⊗ (b ⊕ c) = (a ⊗ b) ⊕ (a ⊗ c)",
            Law::RightDistributivity => "(b ⊕ c) ⊗ a = (b ⊗ a) ⊕ (c ⊗ a)",
            Law::Annihilation => "a ⊗ 0̄ = 0̄ = 0̄ ⊗ a",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Law::AddAssociativity => "add-associativity",
            Law::AddCommutativity => "add-commutativity",
            Law::AddIdentity => "add-identity",
            Law::MulAssociativity => "mul-associativity",
            Law::MulIdentity => "mul-identity",
            Law::MulCommutativity => "mul-commutativity",
            Law::LeftDistributivity => "left-distributivity",
            Law::RightDistributivity => "right-distributivity",
            Law::Annihilation => "annihilation",
        };
        f.write_str(name)
    }
}

/// Verdict for one law, with the first counterexample when it fails.
#[derive(Debug, Clone, Serialize)]
pub struct LawCheck {
    pub law: Law,
    pub passed: bool,
    /// Rendered witnesses and the two unequal sides, when `passed` is false.
    pub counterexample: Option<String>,
}

/// Result of checking every applicable law against a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub semiring: String,
    pub sample_count: usize,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "law report for {} over {} samples",
            self.semiring, self.sample_count
        )?;
        for check in &self.checks {
            let verdict = if check.passed { "pass" } else { "FAIL" };
            write!(f, "  {verdict}  {}: {}", check.law, check.law.description())?;
            if let Some(ref cx) = check.counterexample {
                write!(f, "  [{cx}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Exhaustively test every law instance over tuples drawn from `samples`.
///
/// The commutativity-of-⊗ check runs only when the descriptor declares
/// `is_commutative_mul`. Samples must be nonempty.
pub fn check_semiring_laws<S: Semiring>(s: &S, samples: &[S::Elem]) -> LawReport {
    assert!(!samples.is_empty(), "law check requires nonempty samples");

    let mut checks = Vec::new();

    checks.push(check_pairs(s, samples, Law::AddCommutativity, |s, a, b| {
        let lhs = s.add(a, b);
        let rhs = s.add(b, a);
        (lhs, rhs)
    }));
    checks.push(check_triples(s, samples, Law::AddAssociativity, |s, a, b, c| {
        let lhs = s.add(&s.add(a, b), c);
        let rhs = s.add(a, &s.add(b, c));
        (lhs, rhs)
    }));
    checks.push(check_singles(s, samples, Law::AddIdentity, |s, a| {
        let left = s.add(a, &s.zero());
        let right = s.add(&s.zero(), a);
        if left != *a {
            Some((left, a.clone()))
        } else if right != *a {
            Some((right, a.clone()))
        } else {
            None
        }
    }));
    checks.push(check_triples(s, samples, Law::MulAssociativity, |s, a, b, c| {
        let lhs = s.mul(&s.mul(a, b), c);
        let rhs = s.mul(a, &s.mul(b, c));
        (lhs, rhs)
    }));
    checks.push(check_singles(s, samples, Law::MulIdentity, |s, a| {
        let left = s.mul(a, &s.one());
        let right = s.mul(&s.one(), a);
        if left != *a {
            Some((left, a.clone()))
        } else if right != *a {
            Some((right, a.clone()))
        } else {
            None
        }
    }));
    if s.is_commutative_mul() {
        checks.push(check_pairs(s, samples, Law::MulCommutativity, |s, a, b| {
            (s.mul(a, b), s.mul(b, a))
        }));
    }
    checks.push(check_triples(s, samples, Law::LeftDistributivity, |s, a, b, c| {
        let lhs = s.mul(a, &s.add(b, c));
        let rhs = s.add(&s.mul(a, b), &s.mul(a, c));
        (lhs, rhs)
    }));
    checks.push(check_triples(s, samples, Law::RightDistributivity, |s, a, b, c| {
        let lhs = s.mul(&s.add(b, c), a);
        let rhs = s.add(&s.mul(b, a), &s.mul(c, a));
        (lhs, rhs)
    }));
    checks.push(check_singles(s, samples, Law::Annihilation, |s, a| {
        let left = s.mul(a, &s.zero());
        let right = s.mul(&s.zero(), a);
        if !s.is_zero(&left) {
            Some((left, s.zero()))
        } else if !s.is_zero(&right) {
            Some((right, s.zero()))
        } else {
            None
        }
    }));

    LawReport {
        semiring: s.name().to_owned(),
        sample_count: samples.len(),
        checks,
    }
}

fn check_singles<S: Semiring>(
    s: &S,
    samples: &[S::Elem],
    law: Law,
    violation: impl Fn(&S, &S::Elem) -> Option<(S::Elem, S::Elem)>,
) -> LawCheck {
    for a in samples {
        if let Some((got, want)) = violation(s, a) {
            return LawCheck {
                law,
                passed: false,
                counterexample: Some(format!(
                    "a={}: got {}, want {}",
                    s.render(a),
                    s.render(&got),
                    s.render(&want)
                )),
            };
        }
    }
    LawCheck { law, passed: true, counterexample: None }
}

fn check_pairs<S: Semiring>(
    s: &S,
    samples: &[S::Elem],
    law: Law,
    sides: impl Fn(&S, &S::Elem, &S::Elem) -> (S::Elem, S::Elem),
) -> LawCheck {
    for a in samples {
        for b in samples {
            let (lhs, rhs) = sides(s, a, b);
            if lhs != rhs {
                return LawCheck {
                    law,
                    passed: false,
                    counterexample: Some(format!(
                        "a={}, b={}: {} ≠ {}",
                        s.render(a),
                        s.render(b),
                        s.render(&lhs),
                        s.render(&rhs)
                    )),
                };
            }
        }
    }
    LawCheck { law, passed: true, counterexample: None }
}

fn check_triples<S: Semiring>(
    s: &S,
    samples: &[S::Elem],
    law: Law,
    sides: impl Fn(&S, &S::Elem, &S::Elem, &S::Elem) -> (S::Elem, S::Elem),
) -> LawCheck {
    for a in samples {
        for b in samples {
            for c in samples {
                let (lhs, rhs) = sides(s, a, b, c);
                if lhs != rhs {
                    return LawCheck {
                        law,
                        passed: false,
                        counterexample: Some(format!(
                            "a={}, b={}, c={}: {} ≠ {}",
                            s.render(a),
                            s.render(b),
                            s.render(c),
                            s.render(&lhs),
                            s.render(&rhs)
                        )),
                    };
                }
            }
        }
    }
    LawCheck { law, passed: true, counterexample: None }
}

/// Canonical sample tokens used by the CLI law command and the test suites.
pub fn canonical_samples(name: &str) -> Vec<&'static str> {
    match name {
        "natural" => vec!["0", "1", "2", "3", "5", "7", "11", "33"],
        "integer" => vec!["0", "1", "-1", "2", "-3", "5", "-8", "13"],
        "boolean" => vec!["0", "1", "0", "1", "0", "1", "0", "1"],
        "tropical_min_plus" => vec!["inf", "0", "1", "7", "-2", "3", "5", "10"],
        "max_plus" => vec!["-inf", "0", "1", "2", "-4", "6", "9", "12"],
        _ => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Builtin, LiteralError, MinPlus, Natural};
    use crate::with_semiring;
    use num_bigint::BigInt;

    #[test]
    fn builtins_pass_on_canonical_samples() {
        for b in Builtin::ALL {
            let report = with_semiring!(b, s => {
                let samples: Vec<_> = canonical_samples(s.name())
                    .iter()
                    .map(|t| s.parse_literal(t).unwrap())
                    .collect();
                check_semiring_laws(&s, &samples)
            });
            assert!(report.all_passed(), "laws failed:\n{report}");
        }
    }

    #[test]
    fn natural_small_sample() {
        let s = Natural;
        let samples: Vec<_> = ["0", "1", "2", "3", "5"]
            .iter()
            .map(|t| s.parse_literal(t).unwrap())
            .collect();
        assert!(check_semiring_laws(&s, &samples).all_passed());
    }

    #[test]
    fn min_plus_small_sample() {
        let s = MinPlus;
        let samples: Vec<_> = ["inf", "0", "1", "7"]
            .iter()
            .map(|t| s.parse_literal(t).unwrap())
            .collect();
        assert!(check_semiring_laws(&s, &samples).all_passed());
    }

    #[test]
    fn boolean_all_pass() {
        let report = check_semiring_laws(&Boolean, &[false, true]);
        assert!(report.all_passed());
        // the commutativity-of-⊗ check is present because the flag is declared
        assert!(report.checks.iter().any(|c| c.law == Law::MulCommutativity));
    }

    /// Descriptor with ⊕ = subtraction: the negative control.
    #[derive(Debug, Clone, Copy)]
    struct BrokenSub;

    impl Semiring for BrokenSub {
        type Elem = BigInt;

        fn name(&self) -> &'static str {
            "broken_sub"
        }

        fn zero(&self) -> BigInt {
            BigInt::ZERO
        }

        fn one(&self) -> BigInt {
            BigInt::from(1)
        }

        fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
            a - b
        }

        fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
            a * b
        }

        fn is_commutative_mul(&self) -> bool {
            true
        }

        fn parse_literal(&self, token: &str) -> Result<BigInt, LiteralError> {
            token.parse().map_err(|_| LiteralError::Malformed {
                semiring: "broken_sub",
                token: token.to_owned(),
            })
        }

        fn render(&self, value: &BigInt) -> String {
            value.to_string()
        }
    }

    #[test]
    fn broken_descriptor_fails_commutativity_with_counterexample() {
        let samples = [BigInt::from(0), BigInt::from(1), BigInt::from(2)];
        let report = check_semiring_laws(&BrokenSub, &samples);
        assert!(!report.all_passed());
        let commut = report
            .checks
            .iter()
            .find(|c| c.law == Law::AddCommutativity)
            .unwrap();
        assert!(!commut.passed);
        // whatever pair got reported must genuinely violate a ⊕ b = b ⊕ a,
        // e.g. 1 − 2 ≠ 2 − 1
        assert!(commut.counterexample.is_some());
        assert_ne!(
            BrokenSub.add(&BigInt::from(1), &BigInt::from(2)),
            BrokenSub.add(&BigInt::from(2), &BigInt::from(1))
        );
    }

    #[test]
    #[should_panic(expected = "nonempty")]
    fn empty_samples_rejected() {
        check_semiring_laws(&Natural, &[]);
    }
}
