//! Homomorphisms out of the free forest algebra.
//!
//! A homomorphism is fixed by the vertical element assigned to each letter.
//! Most questions about it (images, factoring, witnesses) are answered by
//! closing `{0}` under `+` and the letter actions, which visits exactly the
//! values of all forests. [`Evaluator`] abstracts the value domain so the same
//! closure serves plain homomorphisms, products of them and cascades.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use itertools::Itertools;

use crate::algebra::{standard_names, AlgebraMorphism, ForestAlgebra, Transform};
use crate::error::{Error, Result};
use crate::format::AlgebraFile;
use crate::terms::{Context, Forest, Label, Site, Tree};

/// Default cap on the number of values visited by a closure.
pub const DEFAULT_CLOSURE_CAP: usize = 1 << 20;

/// A finite, ordered set of letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

impl Alphabet {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::AlphabetMismatch(format!("letter `{l}` listed twice")));
            }
        }
        Ok(Alphabet { labels, index })
    }

    /// Plain letters from names.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Alphabet::new(names.iter().map(|n| Label::letter(n.as_ref())).collect())
    }

    /// Parses a comma separated list such as `a,b,c`.
    pub fn parse(list: &str) -> Result<Self> {
        let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        for n in &names {
            if !crate::format::is_letter(n) {
                return Err(Error::Parse {
                    line: 1,
                    column: 1,
                    message: format!("`{n}` is not a letter"),
                });
            }
        }
        Alphabet::from_names(&names)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn index(&self, l: &Label) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn lookup(&self, l: &Label) -> Result<usize> {
        self.index(l).ok_or_else(|| Error::UnknownLetter(l.to_string()))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// A value domain closed under the forest operations.
pub trait Evaluator {
    type Value: Clone + Eq + Hash + Ord;

    fn num_letters(&self) -> usize;
    fn letter_label(&self, letter: usize) -> Label;
    fn zero(&self) -> Self::Value;
    fn plus(&self, x: &Self::Value, y: &Self::Value) -> Self::Value;
    /// Value of the tree `letter(x)`.
    fn apply(&self, letter: usize, x: &Self::Value) -> Self::Value;

    /// Letters that act as the identity; witness search avoids them.
    fn letter_is_identity(&self, _letter: usize) -> bool {
        false
    }

    fn eval(&self, s: &Forest, letters: &Alphabet) -> Result<Self::Value> {
        let mut acc = self.zero();
        for t in s.trees() {
            let a = letters.lookup(&t.label)?;
            let inner = self.eval(&t.children, letters)?;
            acc = self.plus(&acc, &self.apply(a, &inner));
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug)]
pub struct Homomorphism {
    alphabet: Alphabet,
    target: Arc<ForestAlgebra>,
    assign: Vec<usize>,
}

impl Homomorphism {
    pub fn new(alphabet: Alphabet, target: Arc<ForestAlgebra>, assign: Vec<usize>) -> Result<Self> {
        if assign.len() != alphabet.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} letters but {} assignments",
                alphabet.len(),
                assign.len()
            )));
        }
        if let Some(&v) = assign.iter().find(|&&v| v >= target.v_len()) {
            return Err(Error::Structural(format!("letter image {v} out of range")));
        }
        Ok(Homomorphism {
            alphabet,
            target,
            assign,
        })
    }

    /// Builds a homomorphism from letter names and vertical element names.
    pub fn from_names(target: Arc<ForestAlgebra>, pairs: &[(&str, &str)]) -> Result<Self> {
        let alphabet = Alphabet::from_names(&pairs.iter().map(|p| p.0).collect::<Vec<_>>())?;
        let assign = pairs
            .iter()
            .map(|(a, v)| {
                target
                    .find_v(v)
                    .ok_or_else(|| Error::Structural(format!("unknown vertical element `{v}` for `{a}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Homomorphism::new(alphabet, target, assign)
    }

    /// A homomorphism given by letter actions; the target is generated by
    /// them together with the insertions.
    pub fn from_actions(
        alphabet: Alphabet,
        h_names: Vec<String>,
        plus: Vec<Vec<usize>>,
        zero: usize,
        actions: Vec<Transform>,
    ) -> Result<Self> {
        let gens = alphabet
            .labels()
            .iter()
            .zip(actions)
            .map(|(l, t)| (l.to_string(), t))
            .collect();
        let (alg, idx) = ForestAlgebra::generated(h_names, plus, zero, gens)?;
        Homomorphism::new(alphabet, Arc::new(alg), idx)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn target(&self) -> &ForestAlgebra {
        &self.target
    }

    pub fn target_arc(&self) -> &Arc<ForestAlgebra> {
        &self.target
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    /// Vertical element of letter `a`.
    pub fn letter(&self, a: usize) -> usize {
        self.assign[a]
    }

    pub fn eval_forest(&self, s: &Forest) -> Result<usize> {
        self.eval(s, &self.alphabet)
    }

    /// The action of a context, and the listed vertical element with that
    /// action if there is one.
    pub fn eval_context(&self, p: &Context) -> Result<(Transform, Option<usize>)> {
        let t = self.context_action(p)?;
        let v = self.target.find_action(&t);
        Ok((t, v))
    }

    fn context_action(&self, p: &Context) -> Result<Transform> {
        let left = self.eval_forest(&Forest(p.left.clone()))?;
        let right = self.eval_forest(&Forest(p.right.clone()))?;
        let side = self.target.plus(left, right);
        let inner: Transform = match &p.site {
            Site::Hole => (0..self.target.h_len()).collect(),
            Site::Node(label, q) => {
                let a = self.alphabet.lookup(label)?;
                let v = self.assign[a];
                self.context_action(q)?
                    .into_iter()
                    .map(|h| self.target.act(v, h))
                    .collect()
            }
        };
        Ok(inner.into_iter().map(|h| self.target.plus(side, h)).collect())
    }

    /// Replaces each node `a(t)` by `(a, name of α(t))`.
    pub fn relabel(&self, s: &Forest) -> Result<Forest> {
        Ok(self.relabel_with_values(s)?.0)
    }

    fn relabel_with_values(&self, s: &Forest) -> Result<(Forest, usize)> {
        let mut trees = Vec::with_capacity(s.trees().len());
        let mut acc = self.target.zero();
        for t in s.trees() {
            let a = self.alphabet.lookup(&t.label)?;
            let (children, h) = self.relabel_with_values(&t.children)?;
            let label = Label::pair(t.label.clone(), self.target.h_name(h));
            trees.push(Tree::new(label, children));
            acc = self.target.plus(acc, self.target.act(self.assign[a], h));
        }
        Ok((Forest(trees), acc))
    }

    /// Composes with an algebra morphism out of the target.
    pub fn then(&self, m: &AlgebraMorphism, target: Arc<ForestAlgebra>) -> Result<Homomorphism> {
        let assign = self.assign.iter().map(|&v| m.vmap[v]).collect();
        Homomorphism::new(self.alphabet.clone(), target, assign)
    }

    /// Same letters and target, restricted or reordered alphabet check.
    pub fn same_alphabet(&self, other: &Alphabet) -> Result<()> {
        if self.alphabet.labels() != other.labels() {
            return Err(Error::AlphabetMismatch(format!(
                "`{}` vs `{}`",
                self.alphabet, other
            )));
        }
        Ok(())
    }

    /// The values of all forests, in increasing index order.
    pub fn image(&self) -> Vec<usize> {
        let mut v: Vec<usize> = closure(self, DEFAULT_CLOSURE_CAP)
            .expect("closure of a finite algebra")
            .values;
        v.sort();
        v
    }

    /// The homomorphism onto the subalgebra generated by the letters, and the
    /// embedding of its horizontal elements into the old target.
    ///
    /// Surviving elements keep their relative order.
    pub fn image_restrict(&self) -> (Homomorphism, Vec<usize>) {
        let image = self.image();
        let mut new_index = vec![usize::MAX; self.target.h_len()];
        for (i, &h) in image.iter().enumerate() {
            new_index[h] = i;
        }
        let n = image.len();
        let plus: Vec<Vec<usize>> = image
            .iter()
            .map(|&x| image.iter().map(|&y| new_index[self.target.plus(x, y)]).collect())
            .collect();
        let names: Vec<String> = image.iter().map(|&h| self.target.h_name(h).to_string()).collect();
        let zero = new_index[self.target.zero()];
        let names = standard_names(names, zero, &plus);
        let actions: Vec<Transform> = self
            .assign
            .iter()
            .map(|&v| image.iter().map(|&h| new_index[self.target.act(v, h)]).collect())
            .collect();
        let gens: Vec<(String, Transform)> = self
            .assign
            .iter()
            .zip(actions)
            .map(|(&v, t)| (self.target.v_name(v).to_string(), t))
            .collect();
        debug_assert!(n > 0);
        let (alg, idx) = ForestAlgebra::generated(names, plus, zero, gens).expect("image tables");
        let hom = Homomorphism::new(self.alphabet.clone(), Arc::new(alg), idx).expect("image hom");
        (hom, image)
    }

    /// Whether every horizontal element is the value of some forest.
    pub fn is_onto(&self) -> bool {
        self.image().len() == self.target.h_len()
    }

    /// A minimal witness forest for each value in the image.
    pub fn realize(&self) -> BTreeMap<usize, Forest> {
        realize(self, false, DEFAULT_CLOSURE_CAP).expect("finite closure")
    }

    /// Like [`Homomorphism::realize`] but never uses the empty forest.
    pub fn realize_nonempty(&self) -> BTreeMap<usize, Forest> {
        realize(self, true, DEFAULT_CLOSURE_CAP).expect("finite closure")
    }
}

impl Evaluator for Homomorphism {
    type Value = usize;

    fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    fn letter_label(&self, letter: usize) -> Label {
        self.alphabet.label(letter).clone()
    }

    fn zero(&self) -> usize {
        self.target.zero()
    }

    fn plus(&self, x: &usize, y: &usize) -> usize {
        self.target.plus(*x, *y)
    }

    fn apply(&self, letter: usize, x: &usize) -> usize {
        self.target.act(self.assign[letter], *x)
    }

    fn letter_is_identity(&self, letter: usize) -> bool {
        let t = self.target.action(self.assign[letter]);
        t.iter().enumerate().all(|(h, &x)| h == x)
    }
}

/// Two evaluators over the same letters, run side by side.
pub struct Pair<'a, E1: ?Sized, E2: ?Sized>(pub &'a E1, pub &'a E2);

impl<E1: Evaluator + ?Sized, E2: Evaluator + ?Sized> Evaluator for Pair<'_, E1, E2> {
    type Value = (E1::Value, E2::Value);

    fn num_letters(&self) -> usize {
        self.0.num_letters()
    }

    fn letter_label(&self, letter: usize) -> Label {
        self.0.letter_label(letter)
    }

    fn zero(&self) -> Self::Value {
        (self.0.zero(), self.1.zero())
    }

    fn plus(&self, x: &Self::Value, y: &Self::Value) -> Self::Value {
        (self.0.plus(&x.0, &y.0), self.1.plus(&x.1, &y.1))
    }

    fn apply(&self, letter: usize, x: &Self::Value) -> Self::Value {
        (self.0.apply(letter, &x.0), self.1.apply(letter, &x.1))
    }

    fn letter_is_identity(&self, letter: usize) -> bool {
        self.0.letter_is_identity(letter) && self.1.letter_is_identity(letter)
    }
}

/// Values reachable from `0` under `+` and the letters, in discovery order.
#[derive(Clone, Debug)]
pub struct Closure<V> {
    pub values: Vec<V>,
}

/// Least set containing `0` closed under `+` and every letter.
pub fn closure<E: Evaluator + ?Sized>(eval: &E, cap: usize) -> Result<Closure<E::Value>> {
    let mut values: Vec<E::Value> = vec![eval.zero()];
    let mut seen: HashSet<E::Value> = values.iter().cloned().collect();
    let mut next = 0;
    while next < values.len() {
        let x = values[next].clone();
        let mut fresh = Vec::new();
        for a in 0..eval.num_letters() {
            fresh.push(eval.apply(a, &x));
        }
        for y in &values[..=next] {
            fresh.push(eval.plus(&x, y));
        }
        for v in fresh {
            if seen.insert(v.clone()) {
                if values.len() >= cap {
                    return Err(Error::size("forest value closure", cap));
                }
                values.push(v);
            }
        }
        next += 1;
    }
    Ok(Closure { values })
}

/// `{(α(s), β(s))}` over all forests `s`.
pub fn reachable_pairs(alpha: &Homomorphism, beta: &Homomorphism) -> Result<Vec<(usize, usize)>> {
    alpha.same_alphabet(beta.alphabet())?;
    let mut v = closure(&Pair(alpha, beta), DEFAULT_CLOSURE_CAP)?.values;
    v.sort();
    Ok(v)
}

/// Outcome of an exact factoring check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factoring<A, B> {
    Yes,
    /// Two forests agree under the finer map (value `at`) but differ under the
    /// coarser one (values `left`, `right`).
    No { at: A, left: B, right: B },
}

impl<A, B> Factoring<A, B> {
    pub fn holds(&self) -> bool {
        matches!(self, Factoring::Yes)
    }
}

/// Whether `beta` factors through `alpha`: `α(s) = α(t)` implies `β(s) = β(t)`.
pub fn factors_through_eval<B, A>(
    beta: &B,
    alpha: &A,
    cap: usize,
) -> Result<Factoring<A::Value, B::Value>>
where
    A: Evaluator + ?Sized,
    B: Evaluator + ?Sized,
{
    if alpha.num_letters() != beta.num_letters()
        || (0..alpha.num_letters()).any(|a| alpha.letter_label(a) != beta.letter_label(a))
    {
        return Err(Error::AlphabetMismatch("factoring needs the same letters".into()));
    }
    let pairs = closure(&Pair(alpha, beta), cap)?.values;
    let mut seen: HashMap<&A::Value, &B::Value> = HashMap::new();
    for (x, y) in &pairs {
        if let Some(&prev) = seen.get(x) {
            if prev != y {
                let (l, r) = if prev < y { (prev, y) } else { (y, prev) };
                return Ok(Factoring::No {
                    at: x.clone(),
                    left: l.clone(),
                    right: r.clone(),
                });
            }
        } else {
            seen.insert(x, y);
        }
    }
    Ok(Factoring::Yes)
}

pub fn factors_through(beta: &Homomorphism, alpha: &Homomorphism) -> Result<Factoring<usize, usize>> {
    alpha.same_alphabet(beta.alphabet())?;
    factors_through_eval(beta, alpha, DEFAULT_CLOSURE_CAP)
}

/// Minimal witness forests for every reachable value.
///
/// Witnesses minimize node count, then the number of nodes whose letter acts
/// as the identity; remaining ties go to the smaller printed form. With
/// `nonempty` the empty forest is never used as a witness (though it may be
/// the child forest of a leaf).
pub fn realize<E: Evaluator + ?Sized>(
    eval: &E,
    nonempty: bool,
    cap: usize,
) -> Result<BTreeMap<E::Value, Forest>> {
    // Dijkstra on (cost, printed form): combining never decreases cost.
    let idle: HashSet<Label> = (0..eval.num_letters())
        .filter(|&a| eval.letter_is_identity(a))
        .map(|a| eval.letter_label(a))
        .collect();
    let cost_of = |f: &Forest| -> usize {
        let labels = f.labels();
        let idle_nodes = labels.iter().filter(|l| idle.contains(**l)).count();
        labels.len() * (1 << 16) + idle_nodes
    };
    let mut best: HashMap<E::Value, (usize, String, Forest)> = HashMap::new();
    let mut done: Vec<(E::Value, Forest, usize)> = Vec::new();
    let mut finished: HashSet<E::Value> = HashSet::new();
    let mut heap: BinaryHeap<Reverse<(usize, String, usize)>> = BinaryHeap::new();
    let mut pending: Vec<(E::Value, Forest)> = Vec::new();

    let offer = |v: E::Value,
                     f: Forest,
                     best: &mut HashMap<E::Value, (usize, String, Forest)>,
                     heap: &mut BinaryHeap<Reverse<(usize, String, usize)>>,
                     pending: &mut Vec<(E::Value, Forest)>,
                     finished: &HashSet<E::Value>| {
        if finished.contains(&v) {
            return;
        }
        let f = f.ic_normalize();
        let cost = cost_of(&f);
        let key = f.to_string();
        let better = match best.get(&v) {
            None => true,
            Some((c, k, _)) => (cost, &key) < (*c, k),
        };
        if better {
            best.insert(v.clone(), (cost, key.clone(), f.clone()));
            heap.push(Reverse((cost, key, pending.len())));
            pending.push((v, f));
        }
    };

    let zero = eval.zero();
    if nonempty {
        for a in 0..eval.num_letters() {
            let v = eval.apply(a, &zero);
            offer(v, Forest::empty().under(eval.letter_label(a)), &mut best, &mut heap, &mut pending, &finished);
        }
    } else {
        offer(zero, Forest::empty(), &mut best, &mut heap, &mut pending, &finished);
    }

    while let Some(Reverse((cost, key, slot))) = heap.pop() {
        let (v, f) = pending[slot].clone();
        if finished.contains(&v) {
            continue;
        }
        match best.get(&v) {
            Some((c, k, _)) if *c == cost && *k == key => {}
            _ => continue,
        }
        finished.insert(v.clone());
        if finished.len() > cap {
            return Err(Error::size("witness search", cap));
        }
        for a in 0..eval.num_letters() {
            let w = eval.apply(a, &v);
            offer(w, f.clone().under(eval.letter_label(a)), &mut best, &mut heap, &mut pending, &finished);
        }
        done.push((v.clone(), f.clone(), cost));
        for (u, g, _) in &done {
            let w = eval.plus(&v, u);
            offer(w, f.clone().plus(g.clone()), &mut best, &mut heap, &mut pending, &finished);
        }
    }
    Ok(done.into_iter().map(|(v, f, _)| (v, f)).collect())
}

/// A homomorphism together with an accepting set.
#[derive(Clone, Debug)]
pub struct Recognizer {
    pub hom: Homomorphism,
    accept: Vec<bool>,
}

impl Recognizer {
    pub fn new(hom: Homomorphism, accept: &[usize]) -> Result<Self> {
        let n = hom.target().h_len();
        let mut mask = vec![false; n];
        for &h in accept {
            if h >= n {
                return Err(Error::Structural(format!("accepting element {h} out of range")));
            }
            mask[h] = true;
        }
        Ok(Recognizer { hom, accept: mask })
    }

    pub fn from_file(file: &AlgebraFile) -> Result<Self> {
        let hom = hom_from_file(file)?;
        let accept = file
            .accept
            .as_ref()
            .ok_or_else(|| Error::Structural("file has no `accept:` section".into()))?;
        Recognizer::new(hom, accept)
    }

    pub fn accepts_value(&self, h: usize) -> bool {
        self.accept[h]
    }

    pub fn accepting(&self) -> Vec<usize> {
        (0..self.accept.len()).filter(|&h| self.accept[h]).collect()
    }

    pub fn accepts(&self, s: &Forest) -> Result<bool> {
        Ok(self.accept[self.hom.eval_forest(s)?])
    }

    pub fn to_file(&self) -> AlgebraFile {
        AlgebraFile {
            algebra: self.hom.target().clone(),
            accept: Some(self.accepting()),
            letters: Some(
                self.hom
                    .alphabet()
                    .labels()
                    .iter()
                    .zip(self.hom.assign())
                    .map(|(l, &v)| (l.to_string(), v))
                    .collect(),
            ),
        }
    }

    /// The recognizer restricted to the image of its homomorphism.
    pub fn image_restrict(&self) -> Recognizer {
        let (hom, embed) = self.hom.image_restrict();
        let accept: Vec<usize> = (0..embed.len()).filter(|&i| self.accept[embed[i]]).collect();
        Recognizer::new(hom, &accept).expect("restricted accept set")
    }

    /// The syntactic recognizer of the recognized language.
    pub fn syntactic(&self) -> Syntactic {
        let image = self.image_restrict();
        let alg = image.hom.target();
        let n = alg.h_len();
        let gens: Vec<usize> = (0..alg.v_len()).collect();
        // Moore refinement from {X, H - X}
        let mut class: Vec<usize> = (0..n).map(|h| usize::from(image.accept[h])).collect();
        loop {
            let mut sig_index: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0; n];
            for h in 0..n {
                let mut sig = Vec::with_capacity(gens.len() + 1);
                sig.push(class[h]);
                sig.extend(gens.iter().map(|&v| class[alg.act(v, h)]));
                let fresh = sig_index.len();
                next[h] = *sig_index.entry(sig).or_insert(fresh);
            }
            let stable = sig_index.len() == class.iter().collect::<HashSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        // renumber classes by smallest member
        let mut renum: HashMap<usize, usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        for h in 0..n {
            renum.entry(class[h]).or_insert_with(|| {
                reps.push(h);
                reps.len() - 1
            });
        }
        let hmap: Vec<usize> = (0..n).map(|h| renum[&class[h]]).collect();
        let m = reps.len();
        let plus: Vec<Vec<usize>> = reps
            .iter()
            .map(|&x| reps.iter().map(|&y| hmap[alg.plus(x, y)]).collect())
            .collect();
        let zero = hmap[alg.zero()];
        let witnesses = image.hom.realize();
        let names: Vec<String> = reps
            .iter()
            .map(|h| {
                let w = witnesses[h].to_string();
                if w.chars().all(|c| c.is_ascii_alphanumeric() || "+()_,".contains(c)) {
                    w
                } else {
                    alg.h_name(*h).to_string()
                }
            })
            .collect();
        let names = standard_names(names, zero, &plus);
        let elements: Vec<(String, Transform)> = (0..alg.v_len())
            .map(|v| {
                let t = reps.iter().map(|&h| hmap[alg.act(v, h)]).collect();
                (alg.v_name(v).to_string(), t)
            })
            .collect();
        let (target, vmap) =
            ForestAlgebra::from_transforms(names, plus, zero, elements, false).expect("quotient");
        let target = Arc::new(target);
        let assign = image.hom.assign().iter().map(|&v| vmap[v]).collect();
        let hom = Homomorphism::new(image.hom.alphabet().clone(), target, assign).expect("syntactic");
        let accept: Vec<usize> = (0..m).filter(|&c| image.accept[reps[c]]).collect();
        let recognizer = Recognizer::new(hom, &accept).expect("syntactic accept");
        debug_assert_eq!(recognizer.hom.target().h_len(), m);
        Syntactic {
            recognizer,
            image,
            projection: AlgebraMorphism { hmap, vmap },
        }
    }
}

/// Result of [`Recognizer::syntactic`].
#[derive(Clone, Debug)]
pub struct Syntactic {
    pub recognizer: Recognizer,
    /// The image-restricted input recognizer.
    pub image: Recognizer,
    /// From the image algebra onto the syntactic algebra.
    pub projection: AlgebraMorphism,
}

pub fn hom_from_file(file: &AlgebraFile) -> Result<Homomorphism> {
    let letters = file
        .letters
        .as_ref()
        .ok_or_else(|| Error::Structural("file has no `letters:` section".into()))?;
    let alphabet = Alphabet::from_names(&letters.iter().map(|l| l.0.as_str()).collect::<Vec<_>>())?;
    let assign = letters.iter().map(|l| l.1).collect();
    Homomorphism::new(alphabet, Arc::new(file.algebra.clone()), assign)
}

/// The constant homomorphism into the trivial algebra.
pub fn trivial_hom(alphabet: Alphabet) -> Homomorphism {
    let n = alphabet.len();
    Homomorphism::new(alphabet, Arc::new(ForestAlgebra::trivial()), vec![0; n]).expect("trivial")
}

/// A bijection between the horizontal monoids of two homomorphisms over the
/// same letters that preserves `0`, `+` and every letter action.
///
/// Found by exhaustive search; meant for small algebras.
pub fn isomorphism(a: &Homomorphism, b: &Homomorphism) -> Option<Vec<usize>> {
    let (x, y) = (a.target(), b.target());
    let n = x.h_len();
    if n != y.h_len() || a.alphabet.labels() != b.alphabet.labels() {
        return None;
    }
    (0..n).permutations(n).find(|m| {
        m[x.zero()] == y.zero()
            && (0..n).all(|h| {
                (0..n).all(|g| m[x.plus(h, g)] == y.plus(m[h], m[g]))
                    && a.assign.iter().zip(&b.assign).all(|(&v, &w)| m[x.act(v, h)] == y.act(w, m[h]))
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::u2;
    use crate::terms::{parse_context, parse_forest};

    pub(crate) fn chain4() -> Homomorphism {
        let plus = vec![
            vec![0, 1, 2, 3],
            vec![1, 1, 3, 3],
            vec![2, 3, 2, 3],
            vec![3, 3, 3, 3],
        ];
        Homomorphism::from_actions(
            Alphabet::from_names(&["a", "b"]).unwrap(),
            vec!["0".into(), "a".into(), "b".into(), "inf".into()],
            plus,
            0,
            vec![vec![1, 1, 2, 3], vec![2, 2, 2, 3]],
        )
        .unwrap()
    }

    fn u2ex() -> Homomorphism {
        Homomorphism::from_names(Arc::new(u2()), &[("a", "1"), ("b", "c0"), ("c", "cinf")]).unwrap()
    }

    fn f(s: &str) -> Forest {
        parse_forest(s).unwrap()
    }

    #[test]
    fn chain4_evaluation() {
        let h = chain4();
        let name = |s: &str| h.target().h_name(h.eval_forest(&f(s)).unwrap()).to_string();
        assert_eq!(name("b(a)"), "b");
        assert_eq!(name("a+b"), "inf");
        assert_eq!(name("0"), "0");
        assert!(matches!(h.eval_forest(&f("z")), Err(Error::UnknownLetter(_))));
    }

    #[test]
    fn context_evaluation_respects_apply() {
        let h = chain4();
        let p = parse_context("a(b+[])+a").unwrap();
        let (t, _) = h.eval_context(&p).unwrap();
        for s in ["0", "a", "b(a)", "a+b"] {
            let s = f(s);
            assert_eq!(h.eval_forest(&p.apply(&s)).unwrap(), t[h.eval_forest(&s).unwrap()]);
        }
    }

    #[test]
    fn reachable_pairs_and_factoring() {
        let h = chain4();
        let triv = trivial_hom(h.alphabet().clone());
        let pairs = reachable_pairs(&h, &triv).unwrap();
        assert_eq!(pairs, vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
        let diag = reachable_pairs(&h, &h).unwrap();
        assert!(diag.iter().all(|(x, y)| x == y));
        assert!(factors_through(&h, &h).unwrap().holds());
        assert!(factors_through(&triv, &h).unwrap().holds());
        assert!(!factors_through(&h, &triv).unwrap().holds());
    }

    #[test]
    fn image_restriction() {
        let only_a = Homomorphism::from_names(Arc::new(u2()), &[("a", "1")]).unwrap();
        let (r, embed) = only_a.image_restrict();
        assert_eq!(r.target().h_len(), 1);
        assert_eq!(embed, vec![0]);
        assert!(chain4().is_onto());
        assert!(u2ex().is_onto());
        let (r, embed) = chain4().image_restrict();
        assert_eq!(embed, vec![0, 1, 2, 3]);
        assert_eq!(r.target().plus_table(), chain4().target().plus_table());
    }

    #[test]
    fn witnesses() {
        let w = chain4().realize();
        assert_eq!(w[&0].to_string(), "0");
        assert_eq!(w[&3].to_string(), "a+b");
        let w = u2ex().realize();
        assert_eq!(w[&1].to_string(), "c");
        let w = u2ex().realize_nonempty();
        assert_eq!(w[&0].to_string(), "b");
    }

    #[test]
    fn relabeling() {
        let h = u2ex();
        assert_eq!(h.relabel(&f("a(b)")).unwrap(), f("(a,0)((b,0))"));
        assert_eq!(h.relabel(&f("0")).unwrap(), f("0"));
    }

    #[test]
    fn syntactic_of_trivial_languages() {
        let h = chain4();
        for acc in [vec![], vec![0, 1, 2, 3]] {
            let r = Recognizer::new(h.clone(), &acc).unwrap();
            assert_eq!(r.syntactic().recognizer.hom.target().h_len(), 1);
        }
        let r = Recognizer::new(h, &[3]).unwrap();
        let syn = r.syntactic();
        assert_eq!(syn.recognizer.hom.target().h_len(), 4);
        assert_eq!(syn.recognizer.hom.target().h_names(), &["0", "a", "b", "inf"]);
    }
}
