mod common;

use common::{alphabet, forest, forest_formula};
use forestalg::{models, parse_formula, to_recognizer};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn compiled_recognizer_agrees_with_semantics(s in forest(2, 4, 3), phi in forest_formula(2)) {
        let rec = to_recognizer(&phi, &alphabet(2)).unwrap();
        prop_assert_eq!(rec.accepts(&s).unwrap(), models(&s, &phi).unwrap(), "{}", phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn syntactic_recognizer_agrees(
        phi in forest_formula(3),
        forests in prop::collection::vec(forest(3, 4, 3), 16),
    ) {
        let rec = to_recognizer(&phi, &alphabet(3)).unwrap();
        let syn = rec.syntactic().recognizer;
        prop_assert!(syn.hom.target().h_len() <= rec.hom.target().h_len());
        for s in &forests {
            prop_assert_eq!(syn.accepts(s).unwrap(), rec.accepts(s).unwrap());
        }
    }

    #[test]
    fn formulas_print_and_parse(phi in forest_formula(3)) {
        prop_assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi);
    }
}
