mod common;

use common::{alphabet, forest, random_homs};
use forestalg::decide::{decide_hom, Fragment};
use forestalg::decompose::{
    decompose_ef, decompose_efex, decompose_kdefinite, relabeled_alphabet, verify_cascade, wreath_compose,
    StageKind, DEFAULT_MAX_SIZE,
};
use forestalg::defk::{alpha1, definiteness_degree, free_kdefinite, NoneCriterion};
use forestalg::fixtures::chain4_hom;
use forestalg::hom::{factors_through, factors_through_eval, Pair};
use forestalg::random::MapStyle;
use forestalg::{Error, Homomorphism};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wreath_compose_evaluates_through_relabeling(s in forest(2, 4, 3)) {
        let alpha = chain4_hom();
        let b = relabeled_alphabet(&alpha).unwrap();
        let beta = alpha1(&b).unwrap();
        let gamma = wreath_compose(&alpha, &beta).unwrap();
        let g = gamma.eval_forest(&s).unwrap();
        let want = format!(
            "({},{})",
            alpha.target().h_name(alpha.eval_forest(&s).unwrap()),
            beta.target().h_name(beta.eval_forest(&alpha.relabel(&s).unwrap()).unwrap()),
        );
        prop_assert_eq!(gamma.target().h_name(g), want.as_str());
    }
}

#[test]
fn product_embeds_in_wreath() {
    for pair in random_homs(5, 10, 4, 2, MapStyle::Arbitrary).chunks(2) {
        let (a1, a2) = (&pair[0], &pair[1]);
        let b = relabeled_alphabet(a1).unwrap();
        let assign: Vec<usize> = (0..b.len()).map(|i| a2.letter(i / a1.target().h_len())).collect();
        let beta = Homomorphism::new(b, a2.target_arc().clone(), assign).unwrap();
        let gamma = wreath_compose(a1, &beta).unwrap();
        assert!(factors_through_eval(&gamma, &Pair(a1, a2), 1 << 16).unwrap().holds());
        assert!(factors_through_eval(&Pair(a1, a2), &gamma, 1 << 16).unwrap().holds());
        assert!(factors_through(a1, &gamma).unwrap().holds());
    }
}

#[test]
fn constant_second_factor_keeps_first() {
    for alpha in random_homs(6, 5, 4, 2, MapStyle::Mixed) {
        let b = relabeled_alphabet(&alpha).unwrap();
        let beta = Homomorphism::new(b.clone(), std::sync::Arc::new(forestalg::u1()), vec![0; b.len()]).unwrap();
        let gamma = wreath_compose(&alpha, &beta).unwrap().image_restrict().0;
        assert_eq!(gamma.target().h_len(), alpha.target().h_len());
        assert!(factors_through(&gamma, &alpha).unwrap().holds());
    }
}

#[test]
fn ef_algebras_decompose() {
    for alpha in random_homs(8, 20, 6, 3, MapStyle::Extensive) {
        assert!(decide_hom(&alpha, Fragment::EF).unwrap().holds);
        let c = decompose_ef(&alpha, DEFAULT_MAX_SIZE).unwrap();
        assert_eq!(c.count(StageKind::U1), c.len());
        assert!(verify_cascade(&alpha, &c, 1 << 18).unwrap());
    }
}

#[test]
fn efex_round_trip() {
    let mut ok = 0;
    for alpha in random_homs(12, 40, 5, 2, MapStyle::Mixed) {
        let holds = decide_hom(&alpha, Fragment::EFEX).unwrap().holds;
        match decompose_efex(&alpha, DEFAULT_MAX_SIZE) {
            Ok(c) => {
                assert!(holds);
                assert!(verify_cascade(&alpha, &c, 1 << 20).unwrap());
                assert_eq!(c.count(StageKind::Other), 0);
                ok += 1;
            }
            Err(Error::NotNonconfusing { .. }) => assert!(!holds),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(ok > 0);
}

#[test]
fn definite_stages_are_one_definite() {
    let alpha = chain4_hom();
    let c = decompose_efex(&alpha, DEFAULT_MAX_SIZE).unwrap();
    for (i, stage) in c.stages().iter().enumerate() {
        if stage.kind == StageKind::OneDefinite {
            let (h, _) = c.stage_hom(i, 1 << 16).unwrap().image_restrict();
            let d = definiteness_degree(&h, NoneCriterion::RightZero, 1 << 16).unwrap();
            assert_eq!(d.degree, Some(1), "stage {i}");
        }
    }
}

#[test]
fn kdefinite_towers() {
    let a = alphabet(2);
    for k in 0..=2 {
        let alpha = free_kdefinite(&a, k, 1 << 16).unwrap();
        let c = decompose_kdefinite(&alpha, k, DEFAULT_MAX_SIZE).unwrap();
        assert_eq!(c.count(StageKind::OneDefinite), c.len());
        assert!(verify_cascade(&alpha, &c, 1 << 20).unwrap());
        assert_eq!(c.is_empty(), k == 0);
    }
}
