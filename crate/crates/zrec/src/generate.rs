//! Seeded random generation of system and composition documents.
//!
//! Coefficient entries are drawn from a small pool (0̄, 1̄ and two small
//! semiring-specific elements) so annihilators and identities show up
//! often; inputs mix polynomial and table specs. Everything an Rng
//! produces here is consumed in a fixed order, so a seed pins the run.

use rand::Rng;

use crate::files::{CoefficientSpec, CompositionFile, SystemFile, FORMAT_VERSION};
use crate::semiring::Builtin;
use crate::seq::{LiteralText, SeqSpec, TailRule};

/// Coefficient entry pool: 0̄, 1̄, plus two small elements.
pub fn entry_pool(builtin: Builtin) -> &'static [&'static str] {
    match builtin {
        Builtin::Natural => &["0", "1", "2", "3"],
        Builtin::Integer => &["0", "1", "-1", "2"],
        Builtin::Boolean => &["0", "1"],
        Builtin::TropicalMinPlus => &["inf", "0", "1", "3"],
        Builtin::MaxPlus => &["-inf", "0", "1", "2"],
    }
}

/// Polynomial specs whose integer values inject into the carrier at
/// every n. Boolean has none: only 0 and 1 inject.
fn polynomial_pool(builtin: Builtin) -> &'static [&'static str] {
    match builtin {
        Builtin::Natural => &["n", "n+1", "2*n", "n*n"],
        Builtin::Integer => &["n", "n+1", "2*n", "n-2"],
        Builtin::Boolean => &[],
        Builtin::TropicalMinPlus => &["n", "n+1", "n-3", "2*n"],
        Builtin::MaxPlus => &["n", "n+1", "n-1", "3*n"],
    }
}

/// The 0̄ literal of a builtin carrier.
pub fn zero_literal(builtin: Builtin) -> &'static str {
    match builtin {
        Builtin::Natural | Builtin::Integer | Builtin::Boolean => "0",
        Builtin::TropicalMinPlus => "inf",
        Builtin::MaxPlus => "-inf",
    }
}

fn random_literal(rng: &mut impl Rng, builtin: Builtin) -> LiteralText {
    let pool = entry_pool(builtin);
    pool[rng.random_range(0..pool.len())].into()
}

fn random_table(rng: &mut impl Rng, builtin: Builtin) -> SeqSpec {
    let count = rng.random_range(1..=3usize);
    let mut indices: Vec<u64> = Vec::new();
    while indices.len() < count {
        let idx = rng.random_range(0..=4u64);
        if !indices.contains(&idx) {
            indices.push(idx);
        }
    }
    indices.sort_unstable();
    let entries = indices
        .into_iter()
        .map(|n| (n, random_literal(rng, builtin)))
        .collect();
    let tail = if rng.random_bool(0.5) {
        TailRule::RepeatLast
    } else {
        TailRule::Zero
    };
    SeqSpec::Table { entries, tail }
}

fn random_polynomial(rng: &mut impl Rng, builtin: Builtin) -> Option<SeqSpec> {
    let pool = polynomial_pool(builtin);
    if pool.is_empty() {
        return None;
    }
    Some(SeqSpec::polynomial(pool[rng.random_range(0..pool.len())]))
}

/// A random coefficient-entry spec for variable systems.
fn random_entry_spec(rng: &mut impl Rng, builtin: Builtin) -> SeqSpec {
    match rng.random_range(0..10u8) {
        0..=4 => SeqSpec::Constant(random_literal(rng, builtin)),
        5..=7 => random_polynomial(rng, builtin)
            .unwrap_or_else(|| random_table(rng, builtin)),
        _ => random_table(rng, builtin),
    }
}

/// A random input-component spec.
fn random_input_spec(rng: &mut impl Rng, builtin: Builtin) -> SeqSpec {
    match rng.random_range(0..10u8) {
        0..=3 => random_polynomial(rng, builtin)
            .unwrap_or_else(|| random_table(rng, builtin)),
        4..=7 => random_table(rng, builtin),
        _ => SeqSpec::Constant(random_literal(rng, builtin)),
    }
}

pub fn random_coefficients(
    rng: &mut impl Rng,
    builtin: Builtin,
    k: usize,
    variable: bool,
) -> CoefficientSpec {
    if variable {
        CoefficientSpec::Variable(
            (0..k)
                .map(|_| (0..k).map(|_| random_entry_spec(rng, builtin)).collect())
                .collect(),
        )
    } else {
        CoefficientSpec::Constant(
            (0..k)
                .map(|_| (0..k).map(|_| random_literal(rng, builtin)).collect())
                .collect(),
        )
    }
}

fn random_input(rng: &mut impl Rng, builtin: Builtin, k: usize) -> Vec<SeqSpec> {
    (0..k).map(|_| random_input_spec(rng, builtin)).collect()
}

fn zero_vector(builtin: Builtin, k: usize) -> Vec<LiteralText> {
    vec![zero_literal(builtin).into(); k]
}

/// A random k×k system with zero initial vector.
pub fn random_system_file(
    rng: &mut impl Rng,
    builtin: Builtin,
    k: usize,
    variable: bool,
) -> SystemFile {
    SystemFile {
        format: FORMAT_VERSION,
        semiring: builtin.name().to_owned(),
        k,
        coefficients: random_coefficients(rng, builtin, k, variable),
        input: random_input(rng, builtin, k),
        initial: zero_vector(builtin, k),
    }
}

/// A random composition of two k×k systems with zero initial vectors.
pub fn random_composition_file(
    rng: &mut impl Rng,
    builtin: Builtin,
    k: usize,
    variable: bool,
) -> CompositionFile {
    CompositionFile {
        format: FORMAT_VERSION,
        semiring: builtin.name().to_owned(),
        k,
        outer: random_coefficients(rng, builtin, k, variable),
        inner: random_coefficients(rng, builtin, k, variable),
        input_h: random_input(rng, builtin, k),
        initial_f: zero_vector(builtin, k),
        initial_g: zero_vector(builtin, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::with_semiring;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generation_is_reproducible() {
        for builtin in Builtin::ALL {
            let mut a = ChaCha8Rng::seed_from_u64(99);
            let mut b = ChaCha8Rng::seed_from_u64(99);
            for variable in [false, true] {
                assert_eq!(
                    random_system_file(&mut a, builtin, 2, variable),
                    random_system_file(&mut b, builtin, 2, variable)
                );
                assert_eq!(
                    random_composition_file(&mut a, builtin, 3, variable),
                    random_composition_file(&mut b, builtin, 3, variable)
                );
            }
        }
    }

    #[test]
    fn generated_files_instantiate_and_evaluate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for builtin in Builtin::ALL {
            for variable in [false, true] {
                for _ in 0..5 {
                    let k = rng.random_range(1..=3);
                    let file = random_system_file(&mut rng, builtin, k, variable);
                    with_semiring!(builtin, s => {
                        file.preflight(&s, 16).unwrap();
                        let sys = file.instantiate(&s).unwrap();
                        let f = sys.iterate();
                        let _ = f.eval(8);
                    });
                }
            }
        }
    }
}
