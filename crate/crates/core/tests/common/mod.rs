#![allow(dead_code)]

use forestalg::hom::Alphabet;
use forestalg::random::{random_small_hom, MapStyle};
use forestalg::{Forest, Formula, Homomorphism, Label, Tree};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const LETTERS: [&str; 3] = ["a", "b", "c"];

pub fn alphabet(n: usize) -> Alphabet {
    Alphabet::from_names(&LETTERS[..n]).unwrap()
}

/// Forests over the first `letters` letters, height at most `depth`, at most
/// `width` trees under any node.
pub fn forest(letters: usize, depth: u32, width: usize) -> impl Strategy<Value = Forest> {
    let names: Vec<&'static str> = LETTERS[..letters].to_vec();
    let leaf = Just(Forest::empty()).boxed();
    leaf.prop_recursive(depth, 64, width as u32, move |inner| {
        prop::collection::vec((prop::sample::select(names.clone()), inner), 0..=width)
            .prop_map(|trees| {
                Forest(
                    trees
                        .into_iter()
                        .map(|(l, children)| Tree::new(Label::letter(l), children))
                        .collect(),
                )
            })
            .boxed()
    })
}

fn any_formula(letters: usize) -> impl Strategy<Value = Formula> {
    let names: Vec<&'static str> = LETTERS[..letters].to_vec();
    let leaf = prop_oneof![
        3 => prop::sample::select(names).prop_map(Formula::letter),
        1 => Just(Formula::True),
    ];
    leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| x.and(y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| x.or(y)),
            inner.clone().prop_map(Formula::ef),
            inner.prop_map(Formula::ex),
        ]
    })
}

/// Forest formulas of modal depth at most 3.
pub fn forest_formula(letters: usize) -> impl Strategy<Value = Formula> {
    (any_formula(letters), any::<bool>())
        .prop_map(|(f, ef)| {
            if f.is_forest_formula() {
                f
            } else if ef {
                f.ef()
            } else {
                f.ex()
            }
        })
        .prop_filter("modal depth", |f| f.modal_depth() <= 3)
}

/// Seeded random onto homs with `|H| <= n`.
pub fn random_homs(seed: u64, count: usize, n: usize, letters: usize, style: MapStyle) -> Vec<Homomorphism> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_small_hom(&mut rng, n, letters, style).unwrap())
        .collect()
}
