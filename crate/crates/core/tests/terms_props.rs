mod common;

use common::{forest, random_homs};
use forestalg::fixtures::chain4_hom;
use forestalg::random::MapStyle;
use forestalg::{Context, Forest, Label};
use proptest::prelude::*;

/// One rewrite at the node reached by `path`: swap two siblings, duplicate a
/// sibling, or drop a sibling that has an equal twin.
fn rewrite(s: &Forest, path: &[usize], op: u8, at: usize) -> Forest {
    let mut s = s.clone();
    let mut node = &mut s;
    for &i in path {
        if node.0.is_empty() {
            break;
        }
        let n = node.0.len();
        node = &mut node.0[i % n].children;
    }
    let n = node.0.len();
    if n == 0 {
        return s;
    }
    let i = at % n;
    match op % 3 {
        0 if n > 1 => node.0.swap(i, (i + 1) % n),
        1 => {
            let t = node.0[i].clone();
            node.0.insert(i, t);
        }
        2 => {
            if let Some(j) = (0..n).find(|&j| j != i && node.0[j] == node.0[i]) {
                node.0.remove(j);
            }
        }
        _ => {}
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ic_normal_form_is_idempotent(s in forest(3, 4, 3)) {
        let n = s.ic_normalize();
        prop_assert_eq!(n.ic_normalize(), n);
    }

    #[test]
    fn ic_normal_form_ignores_rewrites(
        s in forest(3, 4, 3),
        steps in prop::collection::vec((prop::collection::vec(0usize..4, 0..4), any::<u8>(), 0usize..8), 1..12),
    ) {
        let mut t = s.clone();
        for (path, op, at) in &steps {
            t = rewrite(&t, path, *op, *at);
        }
        prop_assert_eq!(t.ic_normalize(), s.ic_normalize());
    }

    #[test]
    fn truncation_bounds_height(s in forest(3, 5, 3), k in 0usize..5, j in 0usize..5) {
        let t = s.truncate(k);
        prop_assert!(t.height() <= k);
        prop_assert_eq!(t.truncate(j), s.truncate(k.min(j)));
    }

    #[test]
    fn evaluation_is_additive(s in forest(2, 4, 3), t in forest(2, 4, 3)) {
        let alpha = chain4_hom();
        let alg = alpha.target();
        let (x, y) = (alpha.eval_forest(&s).unwrap(), alpha.eval_forest(&t).unwrap());
        prop_assert_eq!(alpha.eval_forest(&s.clone().plus(t.clone())).unwrap(), alg.plus(x, y));
        let a = Label::letter("a");
        prop_assert_eq!(
            alpha.eval_forest(&s.under(a)).unwrap(),
            alg.act(alpha.letter(0), x)
        );
    }

    #[test]
    fn context_evaluation_composes(
        l1 in forest(2, 2, 2), r1 in forest(2, 2, 2), l2 in forest(2, 2, 2), s in forest(2, 3, 2),
        a in prop::sample::select(vec!["a", "b"]), b in prop::sample::select(vec!["a", "b"]),
    ) {
        let p = Context::hole().under(Label::letter(a)).between(l1, r1);
        let q = Context::hole().between(l2, Forest::empty()).under(Label::letter(b));
        let pq = p.compose(&q);
        prop_assert_eq!(pq.apply(&s), p.apply(&q.apply(&s)));
        for alpha in random_homs(3, 4, 5, 2, MapStyle::Arbitrary).iter().chain([chain4_hom()].iter()) {
            let (tp, _) = alpha.eval_context(&p).unwrap();
            let (tq, _) = alpha.eval_context(&q).unwrap();
            let (tpq, _) = alpha.eval_context(&pq).unwrap();
            let composed: Vec<usize> = tq.iter().map(|&h| tp[h]).collect();
            prop_assert_eq!(&tpq, &composed);
            let h = alpha.eval_forest(&s).unwrap();
            prop_assert_eq!(alpha.eval_forest(&pq.apply(&s)).unwrap(), tpq[h]);
        }
    }

    #[test]
    fn forests_print_and_parse(s in forest(3, 4, 3)) {
        let text = s.to_string();
        prop_assert_eq!(forestalg::parse_forest(&text).unwrap(), s);
    }
}
