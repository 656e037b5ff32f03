//! The semiring abstraction and the built-in carriers.
//!
//! A semiring is a set with two operations ⊕ and ⊗, identities 0̄ and 1̄,
//! where ⊕ is commutative-associative, ⊗ is associative and distributes
//! over ⊕ on both sides, and 0̄ annihilates under ⊗. No subtraction is
//! assumed anywhere in this crate.
//!
//! Equality of carrier values is exact: integer carriers use arbitrary
//! precision and the tropical carriers use a distinguished infinity
//! element, so there is no approximate comparison in the library.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use thiserror::Error;

/// Literal parsing failure for a semiring carrier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    /// The token does not match the literal grammar of the semiring.
    #[error("malformed {semiring} literal: {token:?}")]
    Malformed { semiring: &'static str, token: String },
    /// The token denotes a value outside the carrier (e.g. "-3" in natural).
    #[error("value {token:?} is outside the {semiring} carrier")]
    OutOfCarrier { semiring: &'static str, token: String },
}

/// A named carrier with ⊕, ⊗, 0̄, 1̄, a literal parser and a renderer.
///
/// Implementations are value-level descriptors: operations take `&self`,
/// so a semiring instance can be passed around and stored alongside the
/// data it interprets. All builtin descriptors are zero-sized.
pub trait Semiring: Clone + Send + Sync + 'static {
    /// Carrier element. Equality is decidable and exact.
    type Elem: Clone + Eq + fmt::Debug + Send + Sync + 'static;

    /// Canonical name, also the CLI/file token for this semiring.
    fn name(&self) -> &'static str;

    /// Additive identity 0̄.
    fn zero(&self) -> Self::Elem;

    /// Multiplicative identity 1̄.
    fn one(&self) -> Self::Elem;

    /// Semiring addition ⊕.
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Semiring multiplication ⊗.
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Declared ⊗-commutativity. Verified on samples by the law checker;
    /// gates commutativity-dependent tests only.
    fn is_commutative_mul(&self) -> bool;

    /// Parse a literal token into a carrier value.
    fn parse_literal(&self, token: &str) -> Result<Self::Elem, LiteralError>;

    /// Render a carrier value as its canonical literal text.
    fn render(&self, value: &Self::Elem) -> String;

    /// Inject an ordinary integer into the carrier via the literal parser.
    ///
    /// This is how polynomial sequence specs reach the carrier: "n+1" is
    /// evaluated in signed arbitrary-precision arithmetic and the result
    /// injected, so over min-plus it means the number n+1, not a min/plus
    /// expression.
    fn inject_integer(&self, n: &BigInt) -> Result<Self::Elem, LiteralError> {
        self.parse_literal(&n.to_string())
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// ⊕-fold of an iterator, left to right, starting from 0̄.
    fn sum<'a>(&self, values: impl IntoIterator<Item = &'a Self::Elem>) -> Self::Elem {
        values
            .into_iter()
            .fold(self.zero(), |acc, v| self.add(&acc, v))
    }
}

/// The natural numbers (ℕ, +, ×) with arbitrary-precision arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Natural;

impl Semiring for Natural {
    type Elem = BigUint;

    fn name(&self) -> &'static str {
        "natural"
    }

    fn zero(&self) -> BigUint {
        BigUint::ZERO
    }

    fn one(&self) -> BigUint {
        BigUint::from(1u8)
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }

    fn is_commutative_mul(&self) -> bool {
        true
    }

    fn parse_literal(&self, token: &str) -> Result<BigUint, LiteralError> {
        match token.parse::<BigInt>() {
            Ok(n) if n.sign() != Sign::Minus => Ok(n.to_biguint().unwrap()),
            Ok(_) => Err(LiteralError::OutOfCarrier {
                semiring: self.name(),
                token: token.to_owned(),
            }),
            Err(_) => Err(LiteralError::Malformed {
                semiring: self.name(),
                token: token.to_owned(),
            }),
        }
    }

    fn render(&self, value: &BigUint) -> String {
        value.to_string()
    }
}

/// The integers (ℤ, +, ×) with arbitrary-precision arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Integer;

impl Semiring for Integer {
    type Elem = BigInt;

    fn name(&self) -> &'static str {
        "integer"
    }

    fn zero(&self) -> BigInt {
        BigInt::ZERO
    }

    fn one(&self) -> BigInt {
        BigInt::from(1)
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn is_commutative_mul(&self) -> bool {
        true
    }

    fn parse_literal(&self, token: &str) -> Result<BigInt, LiteralError> {
        token.parse::<BigInt>().map_err(|_| LiteralError::Malformed {
            semiring: self.name(),
            token: token.to_owned(),
        })
    }

    fn render(&self, value: &BigInt) -> String {
        value.to_string()
    }
}

/// The boolean semiring ({0, 1}, or, and).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Boolean;

impl Semiring for Boolean {
    type Elem = bool;

    fn name(&self) -> &'static str {
        "boolean"
    }

    fn zero(&self) -> bool {
        false
    }

    fn one(&self) -> bool {
        true
    }

    fn add(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }

    fn is_commutative_mul(&self) -> bool {
        true
    }

    fn parse_literal(&self, token: &str) -> Result<bool, LiteralError> {
        match token {
            "0" | "false" => Ok(false),
            "1" | "true" => Ok(true),
            _ => match token.parse::<BigInt>() {
                Ok(_) => Err(LiteralError::OutOfCarrier {
                    semiring: self.name(),
                    token: token.to_owned(),
                }),
                Err(_) => Err(LiteralError::Malformed {
                    semiring: self.name(),
                    token: token.to_owned(),
                }),
            },
        }
    }

    fn render(&self, value: &bool) -> String {
        if *value { "1".to_owned() } else { "0".to_owned() }
    }
}

/// Element of ℤ ∪ {+∞}, the min-plus carrier.
///
/// Variant order makes the derived `Ord` the natural one, with +∞ largest.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MinPlusElem {
    Finite(BigInt),
    Infinity,
}

/// The tropical min-plus semiring (ℤ ∪ {+∞}, min, +), 0̄ = +∞, 1̄ = 0.
///
/// Matrix powers over this carrier compute shortest-walk weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MinPlus;

impl Semiring for MinPlus {
    type Elem = MinPlusElem;

    fn name(&self) -> &'static str {
        "tropical_min_plus"
    }

    fn zero(&self) -> MinPlusElem {
        MinPlusElem::Infinity
    }

    fn one(&self) -> MinPlusElem {
        MinPlusElem::Finite(BigInt::ZERO)
    }

    fn add(&self, a: &MinPlusElem, b: &MinPlusElem) -> MinPlusElem {
        a.clone().min(b.clone())
    }

    fn mul(&self, a: &MinPlusElem, b: &MinPlusElem) -> MinPlusElem {
        match (a, b) {
            (MinPlusElem::Finite(x), MinPlusElem::Finite(y)) => MinPlusElem::Finite(x + y),
            _ => MinPlusElem::Infinity,
        }
    }

    fn is_commutative_mul(&self) -> bool {
        true
    }

    fn parse_literal(&self, token: &str) -> Result<MinPlusElem, LiteralError> {
        match token {
            "inf" => Ok(MinPlusElem::Infinity),
            "-inf" => Err(LiteralError::OutOfCarrier {
                semiring: self.name(),
                token: token.to_owned(),
            }),
            _ => token
                .parse::<BigInt>()
                .map(MinPlusElem::Finite)
                .map_err(|_| LiteralError::Malformed {
                    semiring: self.name(),
                    token: token.to_owned(),
                }),
        }
    }

    fn render(&self, value: &MinPlusElem) -> String {
        match value {
            MinPlusElem::Finite(n) => n.to_string(),
            MinPlusElem::Infinity => "inf".to_owned(),
        }
    }
}

/// Element of ℤ ∪ {−∞}, the max-plus carrier, with −∞ smallest under `Ord`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxPlusElem {
    NegInfinity,
    Finite(BigInt),
}

/// The max-plus semiring (ℤ ∪ {−∞}, max, +), 0̄ = −∞, 1̄ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MaxPlus;

impl Semiring for MaxPlus {
    type Elem = MaxPlusElem;

    fn name(&self) -> &'static str {
        "max_plus"
    }

    fn zero(&self) -> MaxPlusElem {
        MaxPlusElem::NegInfinity
    }

    fn one(&self) -> MaxPlusElem {
        MaxPlusElem::Finite(BigInt::ZERO)
    }

    fn add(&self, a: &MaxPlusElem, b: &MaxPlusElem) -> MaxPlusElem {
        a.clone().max(b.clone())
    }

    fn mul(&self, a: &MaxPlusElem, b: &MaxPlusElem) -> MaxPlusElem {
        match (a, b) {
            (MaxPlusElem::Finite(x), MaxPlusElem::Finite(y)) => MaxPlusElem::Finite(x + y),
            _ => MaxPlusElem::NegInfinity,
        }
    }

    fn is_commutative_mul(&self) -> bool {
        true
    }

    fn parse_literal(&self, token: &str) -> Result<MaxPlusElem, LiteralError> {
        match token {
            "-inf" => Ok(MaxPlusElem::NegInfinity),
            "inf" => Err(LiteralError::OutOfCarrier {
                semiring: self.name(),
                token: token.to_owned(),
            }),
            _ => token
                .parse::<BigInt>()
                .map(MaxPlusElem::Finite)
                .map_err(|_| LiteralError::Malformed {
                    semiring: self.name(),
                    token: token.to_owned(),
                }),
        }
    }

    fn render(&self, value: &MaxPlusElem) -> String {
        match value {
            MaxPlusElem::Finite(n) => n.to_string(),
            MaxPlusElem::NegInfinity => "-inf".to_owned(),
        }
    }
}

/// Name-level handle for the builtin semirings; the canonical CLI token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Natural,
    Boolean,
    TropicalMinPlus,
    MaxPlus,
    Integer,
}

/// Error for a semiring name outside the builtin set.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown semiring {name:?}; valid names are natural, boolean, tropical_min_plus, max_plus, integer")]
pub struct UnknownSemiring {
    pub name: String,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::Natural,
        Builtin::Boolean,
        Builtin::TropicalMinPlus,
        Builtin::MaxPlus,
        Builtin::Integer,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Natural => "natural",
            Builtin::Boolean => "boolean",
            Builtin::TropicalMinPlus => "tropical_min_plus",
            Builtin::MaxPlus => "max_plus",
            Builtin::Integer => "integer",
        }
    }

    /// Resolve a semiring name to its builtin descriptor handle.
    pub fn parse(name: &str) -> Result<Builtin, UnknownSemiring> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| UnknownSemiring { name: name.to_owned() })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Builtin {
    type Err = UnknownSemiring;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::parse(s)
    }
}

/// Run a generic block with the concrete descriptor named by a [`Builtin`].
///
/// ```
/// use zrec::semiring::{Builtin, Semiring};
/// use zrec::with_semiring;
///
/// let b = Builtin::parse("tropical_min_plus").unwrap();
/// let rendered = with_semiring!(b, s => {
///     let two = s.parse_literal("2").unwrap();
///     let three = s.parse_literal("3").unwrap();
///     s.render(&s.add(&two, &three))
/// });
/// assert_eq!(rendered, "2");
/// ```
#[macro_export]
macro_rules! with_semiring {
    ($builtin:expr, $s:ident => $body:expr) => {
        match $builtin {
            $crate::semiring::Builtin::Natural => {
                let $s = $crate::semiring::Natural;
                $body
            }
            $crate::semiring::Builtin::Boolean => {
                let $s = $crate::semiring::Boolean;
                $body
            }
            $crate::semiring::Builtin::TropicalMinPlus => {
                let $s = $crate::semiring::MinPlus;
                $body
            }
            $crate::semiring::Builtin::MaxPlus => {
                let $s = $crate::semiring::MaxPlus;
                $body
            }
            $crate::semiring::Builtin::Integer => {
                let $s = $crate::semiring::Integer;
                $body
            }
        }
    };
}
