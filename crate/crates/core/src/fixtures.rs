//! Small named instances used by tests, benchmarks and the CLI.

use std::sync::Arc;

use crate::algebra::u2;
use crate::hom::{Alphabet, Homomorphism, Recognizer};

/// The four element algebra `{0, a, b, inf}` over letters `a, b` with
/// `a + b = inf`. Letter `a` sends `0` to `a` and fixes the rest; letter `b`
/// sends `0` and `a` to `b` and fixes `b` and `inf`.
pub fn chain4_hom() -> Homomorphism {
    let plus = vec![
        vec![0, 1, 2, 3],
        vec![1, 1, 3, 3],
        vec![2, 3, 2, 3],
        vec![3, 3, 3, 3],
    ];
    Homomorphism::from_actions(
        Alphabet::from_names(&["a", "b"]).expect("letters"),
        vec!["0".into(), "a".into(), "b".into(), "inf".into()],
        plus,
        0,
        vec![vec![1, 1, 2, 3], vec![2, 2, 2, 3]],
    )
    .expect("chain4 tables")
}

/// [`chain4_hom`] accepting `inf`.
pub fn chain4_recognizer() -> Recognizer {
    Recognizer::new(chain4_hom(), &[3]).expect("accept set")
}

/// `a -> 1`, `b -> c0`, `c -> cinf` onto `U2`.
pub fn u2_example_hom() -> Homomorphism {
    Homomorphism::from_names(Arc::new(u2()), &[("a", "1"), ("b", "c0"), ("c", "cinf")])
        .expect("u2 names")
}

/// [`u2_example_hom`] accepting `0`; its syntactic algebra is all of `U2`.
pub fn u2_example_recognizer() -> Recognizer {
    Recognizer::new(u2_example_hom(), &[0]).expect("accept set")
}
