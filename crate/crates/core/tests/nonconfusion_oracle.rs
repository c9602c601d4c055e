mod common;

use std::sync::Arc;

use common::random_homs;
use forestalg::algebra::quotient_by_ideal;
use forestalg::decide::{decide_hom, nonconfusion, Fragment};
use forestalg::decompose::{relabeled_alphabet, wreath_compose};
use forestalg::defk::alpha1;
use forestalg::fixtures::{chain4_hom, u2_example_hom};
use forestalg::oracle::{brute_confused_pairs, literal_confused_pairs};
use forestalg::random::MapStyle;
use forestalg::{u1, u2, Homomorphism, Reachability};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instances() -> Vec<Homomorphism> {
    let mut out = vec![chain4_hom(), u2_example_hom()];
    out.extend(random_homs(2024, 25, 5, 3, MapStyle::Arbitrary));
    out.extend(random_homs(2025, 25, 5, 3, MapStyle::Mixed));
    out
}

fn nonconfusing_instances(count: usize) -> Vec<Homomorphism> {
    let mut out = Vec::new();
    let mut seed = 100;
    while out.len() < count {
        for alpha in random_homs(seed, 20, 5, 2, MapStyle::Mixed) {
            if out.len() < count && nonconfusion(&alpha).unwrap().nonconfusing() {
                out.push(alpha);
            }
        }
        seed += 1;
    }
    out
}

#[test]
fn fixpoint_levels_equal_brute_force() {
    let mut confused = 0;
    for alpha in instances() {
        let report = nonconfusion(&alpha).unwrap();
        let n = alpha.target().h_len();
        assert!(report.rounds() <= n * n);
        for trace in &report.traces {
            for k in 0..=3 {
                let got: std::collections::BTreeSet<_> = trace.level(k).keys().copied().collect();
                let want = brute_confused_pairs(&alpha, trace.class, k).unwrap();
                assert_eq!(got, want, "class {:?}, k={k}", trace.members);
            }
        }
        if !report.nonconfusing() {
            confused += 1;
        }
    }
    // the sample has both kinds
    assert!(confused > 0 && confused < 52);
}

#[test]
fn literal_closure_agrees_at_small_k() {
    for alpha in instances().into_iter().take(22) {
        let report = nonconfusion(&alpha).unwrap();
        for trace in &report.traces {
            for k in 0..=1 {
                let got: std::collections::BTreeSet<_> = trace.level(k).keys().copied().collect();
                match literal_confused_pairs(&alpha, trace.class, k, 1 << 14) {
                    Ok(want) => assert_eq!(got, want),
                    Err(forestalg::Error::SizeLimit { .. }) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

fn ideals(alpha: &Homomorphism) -> Vec<Vec<usize>> {
    let n = alpha.target().h_len();
    (1u32..(1 << n))
        .map(|m| (0..n).filter(|&h| m & (1 << h) != 0).collect::<Vec<_>>())
        .filter(|set| quotient_by_ideal(alpha.target(), set).is_ok())
        .collect()
}

#[test]
fn quotients_stay_nonconfusing() {
    for alpha in nonconfusing_instances(20) {
        let all = ideals(&alpha);
        assert!(!all.is_empty());
        for ideal in all {
            let (q, m) = quotient_by_ideal(alpha.target(), &ideal).unwrap();
            let beta = alpha.then(&m, Arc::new(q)).unwrap();
            assert!(nonconfusion(&beta).unwrap().nonconfusing(), "ideal {ideal:?}");
        }
    }
}

#[test]
fn wreath_with_small_stages_stays_nonconfusing() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (u1, u2) = (Arc::new(u1()), Arc::new(u2()));
    for alpha in nonconfusing_instances(20) {
        let b = relabeled_alphabet(&alpha).unwrap();
        let one = u1.find_v("1").unwrap();
        let cinf = u1.find_v("cinf").unwrap();
        let stage1: Vec<usize> = (0..b.len()).map(|_| if rng.gen_bool(0.5) { one } else { cinf }).collect();
        let beta1 = Homomorphism::new(b.clone(), u1.clone(), stage1).unwrap();
        let c0 = u2.find_v("c0").unwrap();
        let cinf2 = u2.find_v("cinf").unwrap();
        let stage2: Vec<usize> = (0..b.len()).map(|_| if rng.gen_bool(0.5) { c0 } else { cinf2 }).collect();
        let beta2 = Homomorphism::new(b.clone(), u2.clone(), stage2).unwrap();
        for beta in [beta1, beta2, alpha1(&b).unwrap()] {
            let gamma = wreath_compose(&alpha, &beta).unwrap().image_restrict().0;
            assert!(nonconfusion(&gamma).unwrap().nonconfusing());
        }
    }
}

#[test]
fn efex_verdict_matches_certificate() {
    for alpha in instances() {
        let d = decide_hom(&alpha, Fragment::EFEX).unwrap();
        assert_eq!(d.holds, nonconfusion(&alpha).unwrap().nonconfusing());
        if let forestalg::decide::Certificate::Confused(w) = &d.certificate {
            let (x, y) = (alpha.eval_forest(&w.s).unwrap(), alpha.eval_forest(&w.t).unwrap());
            assert_ne!(x, y);
            let rs = Reachability::of(alpha.target());
            assert_eq!(rs.class_of(x), rs.class_of(y));
        }
    }
}
