//! Independent brute-force computations used to validate the main algorithms.

use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use itertools::Itertools;

use crate::decide::ValuePair;
use crate::error::{Error, Result};
use crate::hom::{closure, Alphabet, Evaluator, Homomorphism};
use crate::reach::{quotient_hom, QuotientMode, Reachability};
use crate::terms::{Forest, Label, Tree};

/// Evaluates a forest to `(α(s), ~k key of its α_Γ relabeling)`.
pub struct TaggedEval<'a> {
    alpha: &'a Homomorphism,
    k: usize,
    /// `tags[a][h]`: the label `(a, α_Γ(h))`.
    tags: Vec<Vec<Label>>,
}

impl<'a> TaggedEval<'a> {
    pub fn new(alpha: &'a Homomorphism, class: usize, k: usize) -> Result<Self> {
        let (quot, m) = quotient_hom(alpha, class, QuotientMode::Strict)?;
        let tags = alpha
            .alphabet()
            .labels()
            .iter()
            .map(|a| {
                (0..alpha.target().h_len())
                    .map(|h| Label::pair(a.clone(), quot.target().h_name(m.hmap[h])))
                    .collect()
            })
            .collect();
        Ok(TaggedEval { alpha, k, tags })
    }
}

impl Evaluator for TaggedEval<'_> {
    type Value = (usize, Forest);

    fn num_letters(&self) -> usize {
        self.alpha.alphabet().len()
    }

    fn letter_label(&self, letter: usize) -> Label {
        self.alpha.alphabet().label(letter).clone()
    }

    fn zero(&self) -> Self::Value {
        (self.alpha.target().zero(), Forest::empty())
    }

    fn plus(&self, x: &Self::Value, y: &Self::Value) -> Self::Value {
        (
            self.alpha.target().plus(x.0, y.0),
            x.1.clone().plus(y.1.clone()).ic_normalize(),
        )
    }

    fn apply(&self, letter: usize, x: &Self::Value) -> Self::Value {
        let h = self.alpha.target().act(self.alpha.letter(letter), x.0);
        if self.k == 0 {
            return (h, Forest::empty());
        }
        let key = x.1.truncate(self.k - 1).ic_normalize().under(self.tags[letter][x.0].clone());
        (h, key)
    }
}

/// `{(α(s), ~k key of s^{α_Γ})}` over all forests.
#[derive(Clone, Debug)]
pub struct TaggedClassClosure {
    pub class: usize,
    pub k: usize,
    pub pairs: Vec<(usize, Forest)>,
}

impl TaggedClassClosure {
    /// Distinct values of the class sharing a key.
    pub fn confused_pairs(&self, members: &[usize]) -> BTreeSet<ValuePair> {
        let mut by_key: HashMap<&Forest, Vec<usize>> = HashMap::new();
        for (h, key) in &self.pairs {
            if members.contains(h) {
                by_key.entry(key).or_default().push(*h);
            }
        }
        let mut out = BTreeSet::new();
        for hs in by_key.values() {
            for (&h, &g) in hs.iter().cartesian_product(hs) {
                if h != g {
                    out.insert((h, g));
                }
            }
        }
        out
    }
}

pub fn tagged_class_closure(
    alpha: &Homomorphism,
    class: usize,
    k: usize,
    cap: usize,
) -> Result<TaggedClassClosure> {
    let eval = TaggedEval::new(alpha, class, k)?;
    let mut pairs = closure(&eval, cap)?.values;
    pairs.sort();
    Ok(TaggedClassClosure { class, k, pairs })
}

/// Confused pairs of `class` at level `k` read off the literal closure.
pub fn literal_confused_pairs(
    alpha: &Homomorphism,
    class: usize,
    k: usize,
    cap: usize,
) -> Result<BTreeSet<ValuePair>> {
    let rs = Reachability::of(alpha.target());
    Ok(tagged_class_closure(alpha, class, k, cap)?.confused_pairs(rs.class(class)))
}

/// Confused pairs of `class` at level `k`, computed on value sets.
///
/// For every `~k` class of relabeled forests only the set of `α` values of
/// its members matters. A tree class `(a, t)` over a child class with values
/// `W` has values `{α(a) h : h in W, tag(h) = t}`, closed under `+`; the value
/// set of a forest class is the sum of those of its tree classes. So the
/// value sets of level `k` are generated from those of level `k - 1` without
/// building any keys. Exact, and cheap for small `H`.
pub fn brute_confused_pairs(alpha: &Homomorphism, class: usize, k: usize) -> Result<BTreeSet<ValuePair>> {
    let alg = alpha.target();
    let n = alg.h_len();
    let rs = Reachability::of(alg);
    let members = rs.class(class).to_vec();
    // tag(h) is h itself above the class and one shared value otherwise
    let tag = |h: usize| if rs.above(h, class) { h } else { n };
    let close = |set: &FixedBitSet| -> FixedBitSet {
        let mut out = set.clone();
        let mut items: Vec<usize> = out.ones().collect();
        let mut i = 0;
        while i < items.len() {
            for j in 0..=i {
                let s = alg.plus(items[i], items[j]);
                if !out.put(s) {
                    items.push(s);
                }
            }
            i += 1;
        }
        out
    };
    let sum = |x: &FixedBitSet, y: &FixedBitSet| -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(n);
        for (a, b) in x.ones().cartesian_product(y.ones().collect::<Vec<_>>()) {
            out.insert(alg.plus(a, b));
        }
        out
    };

    let mut level: HashSet<FixedBitSet> = HashSet::new();
    let mut image = FixedBitSet::with_capacity(n);
    for h in alpha.image() {
        image.insert(h);
    }
    level.insert(image);
    for _ in 0..k {
        let mut trees: HashSet<FixedBitSet> = HashSet::new();
        for w in &level {
            for a in 0..alpha.alphabet().len() {
                let v = alpha.letter(a);
                let mut by_tag: HashMap<usize, FixedBitSet> = HashMap::new();
                for h in w.ones() {
                    by_tag
                        .entry(tag(h))
                        .or_insert_with(|| FixedBitSet::with_capacity(n))
                        .insert(alg.act(v, h));
                }
                trees.extend(by_tag.into_values().map(|s| close(&s)));
            }
        }
        let mut zero = FixedBitSet::with_capacity(n);
        zero.insert(alg.zero());
        let mut next: Vec<FixedBitSet> = vec![zero];
        let mut seen: HashSet<FixedBitSet> = next.iter().cloned().collect();
        let trees: Vec<FixedBitSet> = trees.into_iter().collect();
        let mut i = 0;
        while i < next.len() {
            for t in &trees {
                let s = sum(&next[i], t);
                if seen.insert(s.clone()) {
                    next.push(s);
                }
            }
            i += 1;
        }
        level = seen;
    }

    let mut out = BTreeSet::new();
    for w in &level {
        let inside: Vec<usize> = members.iter().copied().filter(|&h| w.contains(h)).collect();
        for (&h, &g) in inside.iter().cartesian_product(&inside) {
            if h != g {
                out.insert((h, g));
            }
        }
    }
    Ok(out)
}

/// `~k` through the recursive definition: `s ~{k+1} t` iff both have the
/// same set of pairs (root label, `~k` class of the root's children).
///
/// Classes get small integer ids, interned per level.
#[derive(Clone, Debug, Default)]
pub struct TsetOracle {
    ids: HashMap<(usize, BTreeSet<(Label, usize)>), usize>,
}

impl TsetOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn class(&mut self, s: &Forest, k: usize) -> usize {
        if k == 0 {
            return 0;
        }
        let set: BTreeSet<(Label, usize)> = s
            .trees()
            .iter()
            .map(|t| (t.label.clone(), self.class(&t.children, k - 1)))
            .collect();
        let fresh = self.ids.len() + 1;
        *self.ids.entry((k, set)).or_insert(fresh)
    }

    pub fn equiv(&mut self, s: &Forest, t: &Forest, k: usize) -> bool {
        self.class(s, k) == self.class(t, k)
    }
}

/// Every ic-normal forest of height at most `depth` in which every node has
/// at most `width` children (and at most `width` roots), in increasing order.
pub fn enumerate_forests(alphabet: &Alphabet, depth: usize, width: usize) -> Result<Vec<Forest>> {
    const LIMIT: usize = 1 << 20;
    let mut forests = vec![Forest::empty()];
    for _ in 0..depth {
        let trees: Vec<Tree> = alphabet
            .labels()
            .iter()
            .cartesian_product(&forests)
            .map(|(a, f)| Tree::new(a.clone(), f.clone()))
            .sorted()
            .collect();
        let mut next = Vec::new();
        for size in 0..=width.min(trees.len()) {
            for combo in trees.iter().combinations(size) {
                next.push(Forest(combo.into_iter().cloned().collect()));
                if next.len() > LIMIT {
                    return Err(Error::size("forest enumeration", LIMIT));
                }
            }
        }
        next.sort();
        forests = next;
    }
    Ok(forests)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::nonconfusion;
    use crate::defk::simk_equiv;
    use crate::fixtures::{chain4_hom, u2_example_hom};
    use crate::hom::trivial_hom;

    fn f(s: &str) -> Forest {
        s.parse().unwrap()
    }

    #[test]
    fn u2_example_closure() {
        let alpha = u2_example_hom();
        let cl = tagged_class_closure(&alpha, 0, 1, 1 << 16).unwrap();
        let key = f("(a,inf)");
        assert!(cl.pairs.contains(&(0, key.clone())));
        assert!(cl.pairs.contains(&(1, key)));
        let expected: BTreeSet<_> = [(0, 1), (1, 0)].into_iter().collect();
        assert_eq!(cl.confused_pairs(&[0, 1]), expected);
        assert_eq!(brute_confused_pairs(&alpha, 0, 1).unwrap(), expected);
        let cl0 = tagged_class_closure(&alpha, 0, 0, 1 << 16).unwrap();
        assert_eq!(cl0.pairs.len(), 2);
    }

    #[test]
    fn chain4_and_trivial_have_no_confusion() {
        let alpha = chain4_hom();
        let rs = Reachability::of(alpha.target());
        for c in 0..rs.classes().len() {
            for k in 0..4 {
                assert!(brute_confused_pairs(&alpha, c, k).unwrap().is_empty());
            }
            for k in 0..2 {
                assert!(literal_confused_pairs(&alpha, c, k, 1 << 14).unwrap().is_empty());
            }
        }
        let t = trivial_hom(Alphabet::from_names(&["a", "b"]).unwrap());
        assert!(brute_confused_pairs(&t, 0, 2).unwrap().is_empty());
    }

    #[test]
    fn value_sets_match_literal_closure() {
        for alpha in [u2_example_hom(), chain4_hom()] {
            let report = nonconfusion(&alpha).unwrap();
            let rs = Reachability::of(alpha.target());
            for c in 0..rs.classes().len() {
                for k in 0..2 {
                    let lit = literal_confused_pairs(&alpha, c, k, 1 << 14).unwrap();
                    assert_eq!(brute_confused_pairs(&alpha, c, k).unwrap(), lit);
                    let b: BTreeSet<_> = report.traces[c].level(k).keys().copied().collect();
                    assert_eq!(b, lit);
                }
            }
        }
    }

    #[test]
    fn closure_projects_to_image() {
        let alpha = chain4_hom();
        let cl = tagged_class_closure(&alpha, 1, 1, 1 << 14).unwrap();
        let values: BTreeSet<usize> = cl.pairs.iter().map(|p| p.0).collect();
        assert_eq!(values.into_iter().collect::<Vec<_>>(), alpha.image());
    }

    #[test]
    fn tsets_agree_with_truncation() {
        let mut o = TsetOracle::new();
        let forests = enumerate_forests(&Alphabet::from_names(&["a", "b"]).unwrap(), 3, 2).unwrap();
        let sample: Vec<&Forest> = forests.iter().step_by(7).collect();
        for k in 0..4 {
            for s in &sample {
                for t in &sample {
                    assert_eq!(o.equiv(s, t, k), simk_equiv(s, t, k), "{s} {t} {k}");
                }
            }
        }
        assert!(o.equiv(&f("a(b+b)+a(b)"), &f("a(b)"), 3));
    }

    #[test]
    fn enumeration_counts() {
        let a = Alphabet::from_names(&["a"]).unwrap();
        let show = |v: Vec<Forest>| v.iter().map(|f| f.to_string()).collect::<Vec<_>>();
        assert_eq!(show(enumerate_forests(&a, 1, 1).unwrap()), ["0", "a"]);
        assert_eq!(show(enumerate_forests(&a, 2, 1).unwrap()), ["0", "a", "a(a)"]);
        let ab = Alphabet::from_names(&["a", "b"]).unwrap();
        let mut last = 0;
        for d in 0..3 {
            let n = enumerate_forests(&ab, d, 2).unwrap().len();
            assert!(n >= last);
            last = n;
        }
        assert!(enumerate_forests(&ab, 2, 3).unwrap().len() > enumerate_forests(&ab, 2, 2).unwrap().len());
    }
}
