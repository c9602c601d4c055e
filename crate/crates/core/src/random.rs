//! Random finite algebras for property tests and benchmarks.
//!
//! Horizontal monoids are finite semilattices, drawn as union-closed families
//! of bitmasks containing the empty set (`0`); the full union is `inf`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{standard_names, ForestAlgebra, Transform};
use crate::error::{Error, Result};
use crate::hom::{Alphabet, Homomorphism};

const RESTARTS: usize = 64;

/// How letter actions are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapStyle {
    /// Any function `H -> H`.
    Arbitrary,
    /// `f(h) ⊇ h`: every step moves strictly down or stays, so reachability
    /// classes are trivial.
    Extensive,
    /// Each letter independently one of the above.
    Mixed,
}

/// A semilattice with `n` elements as `(names, plus, zero)`, zero at index 0.
pub fn random_semilattice<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<(Vec<String>, Vec<Vec<usize>>, usize)> {
    if n == 0 {
        return Err(Error::Structural("empty semilattice".into()));
    }
    let bits = (usize::BITS - n.leading_zeros()) as usize + 2;
    let bits = bits.min(63);
    for _ in 0..RESTARTS {
        if let Some(family) = grow_family(rng, n, bits) {
            let masks: Vec<u64> = family.into_iter().collect();
            let index = |m: u64| masks.binary_search(&m).expect("union-closed");
            let plus: Vec<Vec<usize>> = masks
                .iter()
                .map(|&x| masks.iter().map(|&y| index(x | y)).collect())
                .collect();
            let names = (0..n).map(|i| format!("h{i}")).collect();
            let names = standard_names(names, 0, &plus);
            return Ok((names, plus, 0));
        }
    }
    Err(Error::Internal(format!("could not draw a semilattice of size {n}")))
}

fn grow_family<R: Rng + ?Sized>(rng: &mut R, n: usize, bits: usize) -> Option<BTreeSet<u64>> {
    let mut family: BTreeSet<u64> = BTreeSet::from([0]);
    let mut misses = 0;
    while family.len() < n {
        let x: u64 = rng.gen_range(1..(1u64 << bits));
        if family.contains(&x) {
            misses += 1;
            if misses > 64 * n {
                return None;
            }
            continue;
        }
        let mut next = family.clone();
        for &f in &family {
            next.insert(f | x);
        }
        if next.len() <= n {
            family = next;
        } else {
            misses += 1;
            if misses > 64 * n {
                return None;
            }
        }
    }
    Some(family)
}

fn leq(plus: &[Vec<usize>], x: usize, y: usize) -> bool {
    plus[x][y] == y
}

fn random_map<R: Rng + ?Sized>(rng: &mut R, plus: &[Vec<usize>], extensive: bool) -> Transform {
    let n = plus.len();
    (0..n)
        .map(|h| {
            if extensive {
                let up: Vec<usize> = (0..n).filter(|&g| leq(plus, h, g)).collect();
                *up.choose(rng).expect("h itself")
            } else {
                rng.gen_range(0..n)
            }
        })
        .collect()
}

/// A homomorphism from the first `letters` letters into a random algebra
/// with an `n`-element semilattice. Not necessarily onto.
pub fn random_hom<R: Rng + ?Sized>(rng: &mut R, n: usize, letters: usize, style: MapStyle) -> Result<Homomorphism> {
    let (names, plus, zero) = random_semilattice(rng, n)?;
    let gens: Vec<(String, Transform)> = (0..letters)
        .map(|i| {
            let extensive = match style {
                MapStyle::Arbitrary => false,
                MapStyle::Extensive => true,
                MapStyle::Mixed => rng.gen_bool(0.5),
            };
            (format!("v{i}"), random_map(rng, &plus, extensive))
        })
        .collect();
    let (alg, pos) = ForestAlgebra::generated(names, plus, zero, gens)?;
    Homomorphism::new(letter_names(letters)?, Arc::new(alg), pos)
}

/// `a, b, c, ...`, or `a0, a1, ...` past 26 letters.
pub fn letter_names(letters: usize) -> Result<Alphabet> {
    let names: Vec<String> = if letters <= 26 {
        (b'a'..).take(letters).map(|c| (c as char).to_string()).collect()
    } else {
        (0..letters).map(|i| format!("a{i}")).collect()
    };
    Alphabet::from_names(&names)
}

/// A random onto homomorphism with exactly `n` horizontal elements.
pub fn random_onto_hom<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    letters: usize,
    style: MapStyle,
    tries: usize,
) -> Result<Homomorphism> {
    for _ in 0..tries {
        let (hom, _) = random_hom(rng, n, letters, style)?.image_restrict();
        if hom.target().h_len() == n {
            return Ok(hom);
        }
    }
    Err(Error::Internal(format!("no onto homomorphism of size {n} in {tries} tries")))
}

/// The image of a random homomorphism into an algebra with at most `n`
/// horizontal elements.
pub fn random_small_hom<R: Rng + ?Sized>(rng: &mut R, n: usize, letters: usize, style: MapStyle) -> Result<Homomorphism> {
    let size = rng.gen_range(1..=n);
    Ok(random_hom(rng, size, letters, style)?.image_restrict().0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Law;
    use crate::decide::nonconfusion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn semilattices_have_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 8, 17, 64] {
            let (names, plus, zero) = random_semilattice(&mut rng, n).unwrap();
            assert_eq!(names.len(), n);
            for x in 0..n {
                assert_eq!(plus[x][x], x);
                assert_eq!(plus[zero][x], x);
                for y in 0..n {
                    assert_eq!(plus[x][y], plus[y][x]);
                }
            }
        }
    }

    #[test]
    fn homs_are_valid_algebras() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for style in [MapStyle::Arbitrary, MapStyle::Extensive, MapStyle::Mixed] {
            for _ in 0..10 {
                let alpha = random_small_hom(&mut rng, 5, 3, style).unwrap();
                assert!(alpha.is_onto());
                let report = alpha.target().check_axioms();
                assert!(report.is_valid(), "{report:?}");
                assert!(!report.contains(Law::PlusCommutative) && !report.contains(Law::PlusIdempotent));
            }
        }
    }

    #[test]
    fn extensive_maps_are_nonconfusing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let alpha = random_small_hom(&mut rng, 6, 2, MapStyle::Extensive).unwrap();
            assert_eq!(nonconfusion(&alpha).unwrap().parameter(), Some(0));
        }
    }

    #[test]
    fn onto_of_exact_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alpha = random_onto_hom(&mut rng, 64, 4, MapStyle::Arbitrary, 200).unwrap();
        assert_eq!(alpha.target().h_len(), 64);
    }
}
