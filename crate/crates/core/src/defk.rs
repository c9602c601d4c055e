//! The congruences `~k`, free k-definite algebras and the definiteness test.
//!
//! `s ~k t` iff the two forests agree on their top `k` levels up to
//! idempotent-commutative equivalence; the canonical key of a class is the
//! normalized truncation.

use std::collections::{BTreeSet, HashMap};
use crate::algebra::Transform;
use crate::error::{Error, Result};
use crate::hom::{closure, realize, Alphabet, Evaluator, Homomorphism, DEFAULT_CLOSURE_CAP};
use crate::terms::{Context, Forest, Label};

/// Canonical representative of the `~k` class of a forest.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimkKey {
    pub k: usize,
    pub key: Forest,
}

pub fn simk_key(s: &Forest, k: usize) -> SimkKey {
    SimkKey {
        k,
        key: s.truncate(k).ic_normalize(),
    }
}

pub fn simk_equiv(s: &Forest, t: &Forest, k: usize) -> bool {
    simk_key(s, k) == simk_key(t, k)
}

/// Evaluates forests to their `~k` keys.
#[derive(Clone, Debug)]
pub struct KeyEval {
    pub alphabet: Alphabet,
    pub k: usize,
}

impl Evaluator for KeyEval {
    type Value = Forest;

    fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    fn letter_label(&self, letter: usize) -> Label {
        self.alphabet.label(letter).clone()
    }

    fn zero(&self) -> Forest {
        Forest::empty()
    }

    fn plus(&self, x: &Forest, y: &Forest) -> Forest {
        x.clone().plus(y.clone()).ic_normalize()
    }

    fn apply(&self, letter: usize, x: &Forest) -> Forest {
        if self.k == 0 {
            return Forest::empty();
        }
        x.truncate(self.k - 1)
            .ic_normalize()
            .under(self.letter_label(letter))
    }
}

/// The quotient map `α_{A,k}` onto `A^Δ / ~k`. Horizontal elements are named
/// by their keys.
pub fn free_kdefinite(alphabet: &Alphabet, k: usize, cap: usize) -> Result<Homomorphism> {
    let eval = KeyEval {
        alphabet: alphabet.clone(),
        k,
    };
    let mut keys = closure(&eval, cap)
        .map_err(|_| Error::size(format!("classes of ~{k}"), cap))?
        .values;
    keys.sort();
    let index: HashMap<&Forest, usize> = keys.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let plus: Vec<Vec<usize>> = keys
        .iter()
        .map(|x| keys.iter().map(|y| index[&eval.plus(x, y)]).collect())
        .collect();
    let actions: Vec<Transform> = (0..alphabet.len())
        .map(|a| keys.iter().map(|x| index[&eval.apply(a, x)]).collect())
        .collect();
    let names = keys.iter().map(|f| f.to_string()).collect();
    Homomorphism::from_actions(alphabet.clone(), names, plus, 0, actions)
}

/// Largest alphabet accepted by [`alpha1`].
pub const ALPHA1_MAX_LETTERS: usize = 16;

/// `α_{A,1}`: a forest goes to the set of its root labels, as a bitmask.
pub fn alpha1(alphabet: &Alphabet) -> Result<Homomorphism> {
    let n = alphabet.len();
    if n > ALPHA1_MAX_LETTERS {
        return Err(Error::size("root label sets", 1 << ALPHA1_MAX_LETTERS));
    }
    let size = 1usize << n;
    let plus: Vec<Vec<usize>> = (0..size).map(|x| (0..size).map(|y| x | y).collect()).collect();
    let names = (0..size)
        .map(|m| {
            let members: Vec<String> = (0..n)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| alphabet.label(i).to_string())
                .collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    // the tree a(s) has root set {a}, whatever s is
    let actions = (0..n).map(|a| vec![1 << a; size]).collect();
    Homomorphism::from_actions(alphabet.clone(), names, plus, 0, actions)
}

/// The semigroup `α(V_A^gu)` of guarded contexts, as transformations of `H`.
#[derive(Clone, Debug)]
pub struct GuardedSemigroup {
    pub elements: Vec<Transform>,
    /// Indices of the generators `h -> g + α(a) h`.
    pub generators: Vec<usize>,
    index: HashMap<Transform, usize>,
}

impl GuardedSemigroup {
    /// Assumes `alpha` is onto its target.
    pub fn of(alpha: &Homomorphism, cap: usize) -> Result<Self> {
        let alg = alpha.target();
        let n = alg.h_len();
        let mut elements: Vec<Transform> = Vec::new();
        let mut index: HashMap<Transform, usize> = HashMap::new();
        let mut generators = Vec::new();
        for a in 0..alpha.alphabet().len() {
            let v = alpha.letter(a);
            for g in 0..n {
                let t: Transform = (0..n).map(|h| alg.plus(g, alg.act(v, h))).collect();
                let i = *index.entry(t.clone()).or_insert_with(|| {
                    elements.push(t);
                    elements.len() - 1
                });
                if !generators.contains(&i) {
                    generators.push(i);
                }
            }
        }
        let mut next = 0;
        while next < elements.len() {
            for gi in 0..generators.len() {
                let t = compose(&elements[next], &elements[generators[gi]]);
                if !index.contains_key(&t) {
                    if elements.len() >= cap {
                        return Err(Error::size("guarded semigroup", cap));
                    }
                    index.insert(t.clone(), elements.len());
                    elements.push(t);
                }
            }
            next += 1;
        }
        Ok(GuardedSemigroup {
            elements,
            generators,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of `x y`, acting as `h -> x(y(h))`.
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.index[&compose(&self.elements[x], &self.elements[y])]
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.mul(e, e) == e).collect()
    }
}

fn compose(x: &[usize], y: &[usize]) -> Transform {
    y.iter().map(|&h| x[h]).collect()
}

/// Which idempotent law is used to rule out definiteness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoneCriterion {
    /// `e s = e` for all idempotents `e`: the consequence of
    /// `x1...xk y = x1...xk`.
    #[default]
    RightZero,
    /// `e s = s`, the transposed form.
    Transposed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinitenessReport {
    /// Least `k` with `α` k-definite; `Some(0)` for a constant map.
    pub degree: Option<usize>,
    pub semigroup_size: usize,
    /// An idempotent `e` and an `s` violating the chosen criterion, as
    /// transformations of `H`.
    pub witness: Option<(Transform, Transform)>,
}

/// Least `k` such that `α` is k-definite, or `None`.
///
/// `alpha` must be onto its target.
pub fn definiteness_degree(
    alpha: &Homomorphism,
    criterion: NoneCriterion,
    cap: usize,
) -> Result<DefinitenessReport> {
    if alpha.target().h_len() == 1 {
        return Ok(DefinitenessReport {
            degree: Some(0),
            semigroup_size: 0,
            witness: None,
        });
    }
    let s = GuardedSemigroup::of(alpha, cap)?;
    for e in s.idempotents() {
        for x in 0..s.len() {
            let ex = s.mul(e, x);
            let bad = match criterion {
                NoneCriterion::RightZero => ex != e,
                NoneCriterion::Transposed => ex != x,
            };
            if bad {
                return Ok(DefinitenessReport {
                    degree: None,
                    semigroup_size: s.len(),
                    witness: Some((s.elements[e].clone(), s.elements[x].clone())),
                });
            }
        }
    }
    // P_1 = S, P_{j+1} = P_j S; k is the first j with p s = p on P_j.
    let all: Vec<usize> = (0..s.len()).collect();
    let mut p: BTreeSet<usize> = all.iter().copied().collect();
    for j in 1..=s.len() + 1 {
        if p.iter().all(|&x| all.iter().all(|&y| s.mul(x, y) == x)) {
            return Ok(DefinitenessReport {
                degree: Some(j),
                semigroup_size: s.len(),
                witness: None,
            });
        }
        let next: BTreeSet<usize> = p.iter().flat_map(|&x| all.iter().map(move |&y| (x, y))).map(|(x, y)| s.mul(x, y)).collect();
        if next == p {
            break;
        }
        p = next;
    }
    if criterion == NoneCriterion::RightZero {
        return Err(Error::Internal(
            "idempotent test passed but the product chain did not stabilize".into(),
        ));
    }
    Ok(DefinitenessReport {
        degree: None,
        semigroup_size: s.len(),
        witness: None,
    })
}

/// Checks k-definiteness by evaluating concrete context terms.
///
/// Every context whose hole sits at depth `d` (`k <= d <= depth_bound`) is, up
/// to its value, a nest `t0 + a1(t1 + a2(... + ad([]) ...))`; siblings are
/// taken from minimal witness forests of every element, and the hole is filled
/// with a witness of every element. Returns whether all fillings agree.
pub fn definiteness_oracle(
    alpha: &Homomorphism,
    k: usize,
    depth_bound: usize,
    cap: usize,
) -> Result<bool> {
    let witnesses: Vec<Forest> = realize(alpha, false, DEFAULT_CLOSURE_CAP)?.into_values().collect();
    let letters: Vec<Label> = alpha.alphabet().labels().to_vec();
    let mut visited = 0usize;
    let mut check = |p: &Context| -> Result<bool> {
        visited += 1;
        if visited > cap {
            return Err(Error::size("definiteness oracle contexts", cap));
        }
        let first = alpha.eval_forest(&p.apply(&witnesses[0]))?;
        for s in &witnesses[1..] {
            if alpha.eval_forest(&p.apply(s))? != first {
                return Ok(false);
            }
        }
        Ok(true)
    };
    // Contexts of depth d with siblings at every level above the hole. Hole
    // level siblings are not needed: they only precompose with an insertion.
    let mut layer: Vec<Context> = vec![Context::hole()];
    for d in 0..=depth_bound {
        if d >= k {
            for p in &layer {
                if d == 0 {
                    for top in &witnesses {
                        if !check(&p.clone().between(top.clone(), Forest::empty()))? {
                            return Ok(false);
                        }
                    }
                } else if !check(p)? {
                    return Ok(false);
                }
            }
        }
        if d == depth_bound {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * letters.len() * witnesses.len());
        for p in &layer {
            for a in &letters {
                for t in &witnesses {
                    next.push(p.clone().under(a.clone()).between(t.clone(), Forest::empty()));
                }
            }
            if next.len() > cap {
                return Err(Error::size("definiteness oracle contexts", cap));
            }
        }
        layer = next;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::factors_through;
    use crate::terms::parse_forest;

    fn f(s: &str) -> Forest {
        parse_forest(s).unwrap()
    }

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    #[test]
    fn simk_examples() {
        assert!(simk_equiv(&f("a(b)"), &f("c+d"), 0));
        assert!(simk_equiv(&f("a(b)+a(b+b)"), &f("a(c)"), 1));
        for k in 1..5 {
            let mut s = f("b");
            let mut t = f("c");
            for _ in 0..k {
                s = s.under(Label::letter("a"));
                t = t.under(Label::letter("a"));
            }
            assert!(simk_equiv(&s, &t, k));
            assert!(!simk_equiv(&s, &t, k + 1));
        }
    }

    #[test]
    fn free_algebras() {
        let a1 = free_kdefinite(&ab(), 1, 1000).unwrap();
        assert_eq!(a1.target().h_len(), 4);
        assert_eq!(free_kdefinite(&ab(), 0, 1000).unwrap().target().h_len(), 1);
        let root = alpha1(&ab()).unwrap();
        assert!(factors_through(&root, &a1).unwrap().holds());
        assert!(factors_through(&a1, &root).unwrap().holds());
        assert_eq!(root.eval_forest(&f("a(b)")).unwrap(), 1);
        assert_eq!(root.eval_forest(&f("0")).unwrap(), 0);
        let a = Alphabet::from_names(&["a"]).unwrap();
        // {0, a, a(a), a+a(a)}
        assert_eq!(free_kdefinite(&a, 2, 1000).unwrap().target().h_len(), 4);
    }

    #[test]
    fn degree_of_free_algebras() {
        for k in 1..=2 {
            let alpha = free_kdefinite(&ab(), k, 1 << 12).unwrap();
            let r = definiteness_degree(&alpha, NoneCriterion::RightZero, 1 << 16).unwrap();
            assert_eq!(r.degree, Some(k), "k={k}");
        }
    }
}
