//! Wreath product decompositions.
//!
//! A [`Cascade`] is a list of stages; stage `i` reads the current letter and
//! the values of stages `0..i` on the child forest, and picks a vertical
//! element of its own target. This is `α1 ⊗ ... ⊗ αr` evaluated stagewise,
//! so nothing is ever materialized beyond the reachable tuples.
//!
//! Every decomposition is checked by an exact closure before it is returned.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::ops::Range;
use std::sync::Arc;

use log::debug;

use crate::algebra::{u1, u2, ForestAlgebra, Transform, U_C0, U_CINF, U_ONE};
use crate::decide::{ef_violation, nonconfusion, EfViolation, Verdict};
use crate::defk::{definiteness_degree, NoneCriterion};
use crate::error::{Error, Result};
use crate::hom::{closure, factors_through_eval, Alphabet, Evaluator, Homomorphism, Pair};
use crate::reach::{quotient_hom, QuotientMode, Reachability};
use crate::terms::{Forest, Label};

/// Default cap on the reachable tuples of any cascade prefix.
pub const DEFAULT_MAX_SIZE: usize = 4096;

/// Picks the vertical element of a stage from the letter and the values of
/// the earlier stages on the child forest.
pub type Rule = Arc<dyn Fn(usize, &[usize]) -> usize + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StageKind {
    U1,
    OneDefinite,
    Other,
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageKind::U1 => "U1",
            StageKind::OneDefinite => "ONE_DEFINITE",
            StageKind::Other => "OTHER",
        })
    }
}

#[derive(Clone)]
pub struct Stage {
    pub kind: StageKind,
    pub target: Arc<ForestAlgebra>,
    rule: Rule,
    /// Number of distinct inputs `(letter, earlier values)` the rule can see.
    pub alphabet_size: usize,
    pub note: String,
}

impl Stage {
    pub fn new(kind: StageKind, target: Arc<ForestAlgebra>, rule: Rule, alphabet_size: usize, note: String) -> Self {
        Stage {
            kind,
            target,
            rule,
            alphabet_size,
            note,
        }
    }

    pub fn rule(&self, letter: usize, prior: &[usize]) -> usize {
        (self.rule)(letter, prior)
    }

    fn shifted(self, offset: usize) -> Stage {
        if offset == 0 {
            return self;
        }
        let inner = self.rule;
        Stage {
            rule: Arc::new(move |a, p: &[usize]| inner(a, &p[offset..])),
            ..self
        }
    }
}

impl fmt::Debug for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stage")
            .field("kind", &self.kind)
            .field("h_len", &self.target.h_len())
            .field("alphabet_size", &self.alphabet_size)
            .field("note", &self.note)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub struct Cascade {
    alphabet: Alphabet,
    stages: Vec<Stage>,
}

impl Cascade {
    pub fn empty(alphabet: Alphabet) -> Self {
        Cascade {
            alphabet,
            stages: Vec::new(),
        }
    }

    /// A one-stage cascade running `alpha` directly.
    pub fn from_hom(alpha: &Homomorphism) -> Self {
        let assign = alpha.assign().to_vec();
        let letters = assign.len();
        let rule: Rule = Arc::new(move |a, _: &[usize]| assign[a]);
        let mut c = Cascade::empty(alpha.alphabet().clone());
        c.push(Stage::new(
            StageKind::Other,
            alpha.target_arc().clone(),
            rule,
            letters,
            "plain homomorphism".into(),
        ));
        c
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn count(&self, kind: StageKind) -> usize {
        self.stages.iter().filter(|s| s.kind == kind).count()
    }

    pub fn push(&mut self, stage: Stage) {
        self.stages.push(stage);
    }

    /// Appends `other` as an independent block: its rules only see its own
    /// earlier stages. This is the product-to-wreath embedding.
    pub fn append(&mut self, other: Cascade) {
        let offset = self.stages.len();
        self.stages
            .extend(other.stages.into_iter().map(|s| s.shifted(offset)));
    }

    /// The first `n` stages.
    pub fn prefix(&self, n: usize) -> Cascade {
        Cascade {
            alphabet: self.alphabet.clone(),
            stages: self.stages[..n].to_vec(),
        }
    }

    pub fn eval_forest(&self, s: &Forest) -> Result<Vec<usize>> {
        self.eval(s, &self.alphabet)
    }

    /// Stage `i` as a homomorphism over `A × (reachable tuples of stages 0..i)`.
    ///
    /// Letter `(a,tj)` stands for `a` above a child forest whose earlier
    /// stages evaluate to the `j`-th reachable tuple. The value of stage `i`
    /// on `s` is this hom applied to `s` relabeled by the prefix.
    pub fn stage_hom(&self, i: usize, cap: usize) -> Result<Homomorphism> {
        let prefix = self.prefix(i);
        let mut tuples = closure(&prefix, cap)?.values;
        tuples.sort();
        let stage = &self.stages[i];
        let mut labels = Vec::new();
        let mut assign = Vec::new();
        for a in 0..self.alphabet.len() {
            for (j, t) in tuples.iter().enumerate() {
                labels.push(Label::pair(self.alphabet.label(a).clone(), format!("t{j}")));
                assign.push(stage.rule(a, t));
            }
        }
        Homomorphism::new(Alphabet::new(labels)?, stage.target.clone(), assign)
    }

    /// Human-readable listing: one header per stage, then the non-default
    /// letter assignments over reachable inputs (at most `per_stage` lines).
    pub fn listing(&self, cap: usize, per_stage: usize) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "cascade over {{{}}}: {} stages", self.alphabet, self.stages.len());
        let mut tuples = vec![Vec::new()];
        for (i, stage) in self.stages.iter().enumerate() {
            let names = stage.target.h_names().join(",");
            let _ = writeln!(
                out,
                "stage {i}: {} into ({{{names}}}), {} input letters; {}",
                stage.kind, stage.alphabet_size, stage.note
            );
            let default = match stage.kind {
                StageKind::OneDefinite => Some(U_C0),
                StageKind::U1 => Some(U_ONE),
                StageKind::Other => None,
            };
            let mut shown = 0;
            let mut hidden = 0;
            for a in 0..self.alphabet.len() {
                for t in &tuples {
                    let v = stage.rule(a, t);
                    if Some(v) == default {
                        continue;
                    }
                    if shown < per_stage {
                        let tuple: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                        let _ = writeln!(
                            out,
                            "  {} @ ({}) -> {}",
                            self.alphabet.label(a),
                            tuple.join(""),
                            stage.target.v_name(v)
                        );
                        shown += 1;
                    } else {
                        hidden += 1;
                    }
                }
            }
            if hidden > 0 {
                let _ = writeln!(out, "  ... {hidden} more");
            }
            if i + 1 < self.stages.len() {
                tuples = closure(&self.prefix(i + 1), cap)?.values;
                tuples.sort();
            }
        }
        Ok(out)
    }
}

impl Evaluator for Cascade {
    type Value = Vec<usize>;

    fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    fn letter_label(&self, letter: usize) -> Label {
        self.alphabet.label(letter).clone()
    }

    fn zero(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.target.zero()).collect()
    }

    fn plus(&self, x: &Vec<usize>, y: &Vec<usize>) -> Vec<usize> {
        self.stages
            .iter()
            .enumerate()
            .map(|(i, s)| s.target.plus(x[i], y[i]))
            .collect()
    }

    fn apply(&self, letter: usize, x: &Vec<usize>) -> Vec<usize> {
        self.stages
            .iter()
            .enumerate()
            .map(|(i, s)| s.target.act(s.rule(letter, &x[..i]), x[i]))
            .collect()
    }
}

/// The alphabet `A × H` that `α` relabels into: `(a,h)` in letter-major order.
pub fn relabeled_alphabet(alpha: &Homomorphism) -> Result<Alphabet> {
    let alg = alpha.target();
    let mut labels = Vec::with_capacity(alpha.alphabet().len() * alg.h_len());
    for l in alpha.alphabet().labels() {
        for h in 0..alg.h_len() {
            labels.push(Label::pair(l.clone(), alg.h_name(h)));
        }
    }
    Alphabet::new(labels)
}

/// `α ⊗ β` for `β` over `A × H1`.
///
/// The target is the subalgebra of the wreath product generated by the
/// letters, built on `H1 × H2` without materializing `V2^H1`.
pub fn wreath_compose(alpha: &Homomorphism, beta: &Homomorphism) -> Result<Homomorphism> {
    let (a1, a2) = (alpha.target(), beta.target());
    let (n1, n2) = (a1.h_len(), a2.h_len());
    let mut slot = vec![vec![0usize; n1]; alpha.alphabet().len()];
    for (a, l) in alpha.alphabet().labels().iter().enumerate() {
        for (h, row) in slot[a].iter_mut().enumerate() {
            let pair = Label::pair(l.clone(), a1.h_name(h));
            *row = beta.alphabet().index(&pair).ok_or_else(|| {
                Error::AlphabetMismatch(format!("second factor has no letter `{pair}`"))
            })?;
        }
    }
    let idx = |h1: usize, h2: usize| h1 * n2 + h2;
    let names: Vec<String> = (0..n1)
        .flat_map(|h1| (0..n2).map(move |h2| (h1, h2)))
        .map(|(h1, h2)| format!("({},{})", a1.h_name(h1), a2.h_name(h2)))
        .collect();
    let plus: Vec<Vec<usize>> = (0..n1 * n2)
        .map(|x| {
            (0..n1 * n2)
                .map(|y| idx(a1.plus(x / n2, y / n2), a2.plus(x % n2, y % n2)))
                .collect()
        })
        .collect();
    let zero = idx(a1.zero(), a2.zero());
    let gens: Vec<(String, Transform)> = alpha
        .alphabet()
        .labels()
        .iter()
        .enumerate()
        .map(|(a, l)| {
            let v1 = alpha.letter(a);
            let t: Transform = (0..n1 * n2)
                .map(|x| {
                    let (h1, h2) = (x / n2, x % n2);
                    idx(a1.act(v1, h1), a2.act(beta.letter(slot[a][h1]), h2))
                })
                .collect();
            (format!("g[{l}]"), t)
        })
        .collect();
    let (alg, pos) = ForestAlgebra::generated(names, plus, zero, gens)?;
    Homomorphism::new(alpha.alphabet().clone(), Arc::new(alg), pos)
}

type Decode = Arc<HashMap<Vec<usize>, usize>>;

/// Tuple-to-value map of `alpha` through `c`; fails if `c` does not
/// determine `alpha`.
fn decode_map(c: &Cascade, alpha: &Homomorphism, cap: usize) -> Result<Decode> {
    let pairs = closure(&Pair(c, alpha), cap)
        .map_err(|_| Error::size("reachable cascade tuples", cap))?
        .values;
    let mut map = HashMap::with_capacity(pairs.len());
    for (t, h) in pairs {
        if let Some(prev) = map.insert(t.clone(), h) {
            if prev != h {
                return Err(Error::Internal(format!(
                    "cascade does not determine the homomorphism: tuple {t:?} gives {} and {}",
                    alpha.target().h_name(prev),
                    alpha.target().h_name(h)
                )));
            }
        }
    }
    Ok(Arc::new(map))
}

/// Exact check that `alpha` factors through `c`.
pub fn verify_cascade(alpha: &Homomorphism, c: &Cascade, cap: usize) -> Result<bool> {
    alpha.same_alphabet(c.alphabet())?;
    Ok(factors_through_eval(alpha, c, cap)?.holds())
}

fn u1_arc() -> Arc<ForestAlgebra> {
    Arc::new(u1())
}

fn u2_arc() -> Arc<ForestAlgebra> {
    Arc::new(u2())
}

/// Decomposition of an EF-homomorphism into a cascade of `U1` stages.
pub fn decompose_ef(alpha: &Homomorphism, max_size: usize) -> Result<Cascade> {
    let (alpha, _) = alpha.image_restrict();
    if let Some(v) = ef_violation(alpha.target()) {
        let alg = alpha.target();
        return Err(match v {
            EfViolation::NotCommutative { h, g } => Error::NotEfAlgebra {
                v: format!("+{}", alg.h_name(g)),
                h: alg.h_name(h).to_string(),
            },
            EfViolation::NotAbsorbing { v, h } => Error::NotEfAlgebra {
                v: alg.v_name(v).to_string(),
                h: alg.h_name(h).to_string(),
            },
        });
    }
    Ok(ef_rec(&alpha, max_size)?.0)
}

fn trivial_result(alpha: &Homomorphism) -> (Cascade, Decode) {
    let mut m = HashMap::new();
    m.insert(Vec::new(), 0);
    (Cascade::empty(alpha.alphabet().clone()), Arc::new(m))
}

/// Splits over several subminimal classes: one block per `α_{≥Γj}`.
fn split_subminimal(
    alpha: &Homomorphism,
    rs: &Reachability,
    max_size: usize,
    rec: fn(&Homomorphism, usize) -> Result<(Cascade, Decode)>,
) -> Result<Cascade> {
    let mut c = Cascade::empty(alpha.alphabet().clone());
    for g in rs.subminimal() {
        let (q, _) = quotient_hom(alpha, g, QuotientMode::Weak)?;
        debug_assert!(q.target().h_len() < alpha.target().h_len());
        c.append(rec(&q, max_size)?.0);
    }
    Ok(c)
}

fn ef_rec(alpha: &Homomorphism, max_size: usize) -> Result<(Cascade, Decode)> {
    let alg = alpha.target();
    if alg.h_len() == 1 {
        return Ok(trivial_result(alpha));
    }
    let rs = Reachability::of(alg);
    if rs.classes().iter().any(|c| c.len() > 1) {
        return Err(Error::Internal("EF-algebra with a nontrivial reachability class".into()));
    }
    let sub = rs.subminimal();
    let c = if sub.len() > 1 {
        split_subminimal(alpha, &rs, max_size, ef_rec)?
    } else {
        let g = sub[0];
        let star = rs.class(g)[0];
        let (q, m) = quotient_hom(alpha, g, QuotientMode::Strict)?;
        let (mut c, dec) = ef_rec(&q, max_size)?;
        // Representative in H of each quotient value; the collapsed value maps to h*.
        let qinf = q.target().infinity();
        let mut back = vec![star; q.target().h_len()];
        for h in 0..alg.h_len() {
            if m.hmap[h] != qinf {
                back[m.hmap[h]] = h;
            }
        }
        let inf = alg.infinity();
        let assign = alpha.assign().to_vec();
        let target = alpha.target_arc().clone();
        let n = c.len();
        let rule: Rule = Arc::new(move |a, p: &[usize]| match dec.get(&p[..n]) {
            Some(&h) if target.act(assign[a], back[h]) != inf => U_ONE,
            _ => U_CINF,
        });
        let note = format!("cinf iff a.h = inf, h read through the first {n} stages (h* = {})", alg.h_name(star));
        c.push(Stage::new(StageKind::U1, u1_arc(), rule, alpha.alphabet().len() * q.target().h_len(), note));
        c
    };
    let dec = decode_map(&c, alpha, max_size)?;
    debug!("EF stage block for |H|={}: {} stages", alg.h_len(), c.len());
    Ok((c, dec))
}

/// Level-wise `U2` stages computing `∼k` of the child forest relabeled by
/// `tag`. Level `j` has one stage per reachable `(letter, tag, level j-1 bits)`;
/// the bits of level `j` are exactly the `∼j` class.
fn append_definite_block(
    c: &mut Cascade,
    tag: Option<(usize, Decode)>,
    k: usize,
    max_size: usize,
) -> Result<()> {
    let letters = c.alphabet.len();
    let mut prev: Option<Range<usize>> = None;
    for level in 1..=k {
        let tuples = closure(&*c, max_size)
            .map_err(|_| Error::size("reachable cascade tuples", max_size))?
            .values;
        let tag_of = |p: &[usize]| tag.as_ref().map_or(0, |(n, d)| d[&p[..*n]]);
        let mut inputs: BTreeSet<(usize, usize, Vec<usize>)> = BTreeSet::new();
        for p in &tuples {
            let bits = prev.clone().map_or_else(Vec::new, |r| p[r].to_vec());
            for a in 0..letters {
                inputs.insert((a, tag_of(p), bits.clone()));
            }
        }
        if c.len() + inputs.len() > max_size {
            return Err(Error::size(format!("stages of a {k}-definite block"), max_size));
        }
        let start = c.len();
        let size = inputs.len();
        for (a, t, bits) in inputs {
            let tag = tag.clone();
            let range = prev.clone();
            let note = format!(
                "level {level}: cinf iff letter {}{}{}",
                c.alphabet.label(a),
                if tag.is_some() { format!(", tag {t}") } else { String::new() },
                if bits.is_empty() {
                    String::new()
                } else {
                    format!(", previous level {}", bits.iter().map(|b| b.to_string()).collect::<String>())
                }
            );
            let rule: Rule = Arc::new(move |a2, p: &[usize]| {
                let hit = a2 == a
                    && tag.as_ref().is_none_or(|(n, d)| d.get(&p[..*n]) == Some(&t))
                    && range.as_ref().is_none_or(|r| p[r.clone()] == bits[..]);
                if hit {
                    U_CINF
                } else {
                    U_C0
                }
            });
            c.push(Stage::new(StageKind::OneDefinite, u2_arc(), rule, size, note));
        }
        prev = Some(start..c.len());
    }
    Ok(())
}

/// Decomposition of a `k`-definite homomorphism into 1-definite `U2` stages.
pub fn decompose_kdefinite(alpha: &Homomorphism, k: usize, max_size: usize) -> Result<Cascade> {
    let (alpha, _) = alpha.image_restrict();
    let report = definiteness_degree(&alpha, NoneCriterion::RightZero, max_size.max(1 << 16))?;
    match report.degree {
        Some(d) if d <= k => {}
        _ => return Err(Error::NotKDefinite { k }),
    }
    let mut c = Cascade::empty(alpha.alphabet().clone());
    append_definite_block(&mut c, None, k, max_size)?;
    decode_map(&c, &alpha, max_size)?;
    Ok(c)
}

/// Decomposition of an (EF,EX)-homomorphism into `U1` and 1-definite `U2`
/// stages.
pub fn decompose_efex(alpha: &Homomorphism, max_size: usize) -> Result<Cascade> {
    let (alpha, _) = alpha.image_restrict();
    let report = nonconfusion(&alpha)?;
    if let Some(t) = report.first_confused() {
        let names: Vec<&str> = t.members.iter().map(|&h| alpha.target().h_name(h)).collect();
        return Err(Error::NotNonconfusing {
            class: names.join(", "),
        });
    }
    Ok(efex_rec(&alpha, max_size)?.0)
}

/// The stabilization index for `class`, at least 1.
fn class_parameter(alpha: &Homomorphism, class: usize) -> Result<usize> {
    let report = nonconfusion(alpha)?;
    let trace = report
        .traces
        .iter()
        .find(|t| t.class == class)
        .ok_or_else(|| Error::Internal("missing class trace".into()))?;
    match trace.verdict {
        Verdict::Empty { k } => Ok(k.max(1)),
        Verdict::Stable { .. } => {
            let names: Vec<&str> = trace.members.iter().map(|&h| alpha.target().h_name(h)).collect();
            Err(Error::NotNonconfusing {
                class: names.join(", "),
            })
        }
    }
}

/// Joint value for the `α3` lookup: cascade tuple, value under `α`, and
/// whether some tree of the forest has value `inf`.
struct Flagged<'a> {
    c: &'a Cascade,
    alpha: &'a Homomorphism,
    inf: usize,
}

impl Evaluator for Flagged<'_> {
    type Value = (Vec<usize>, usize, bool);

    fn num_letters(&self) -> usize {
        self.c.num_letters()
    }

    fn letter_label(&self, letter: usize) -> Label {
        self.c.letter_label(letter)
    }

    fn zero(&self) -> Self::Value {
        (self.c.zero(), self.alpha.target().zero(), false)
    }

    fn plus(&self, x: &Self::Value, y: &Self::Value) -> Self::Value {
        (
            self.c.plus(&x.0, &y.0),
            self.alpha.target().plus(x.1, y.1),
            x.2 || y.2,
        )
    }

    fn apply(&self, letter: usize, x: &Self::Value) -> Self::Value {
        let h = self.alpha.apply(letter, &x.1);
        (self.c.apply(letter, &x.0), h, x.2 || h == self.inf)
    }
}

fn efex_rec(alpha: &Homomorphism, max_size: usize) -> Result<(Cascade, Decode)> {
    let alg = alpha.target();
    if alg.h_len() == 1 {
        return Ok(trivial_result(alpha));
    }
    let rs = Reachability::of(alg);
    let gmin = rs.min_class();
    let c = if rs.class(gmin).len() > 1 {
        let k = class_parameter(alpha, gmin)?;
        let (q, _) = quotient_hom(alpha, gmin, QuotientMode::Strict)?;
        let (mut c, dec) = efex_rec(&q, max_size)?;
        let n = c.len();
        append_definite_block(&mut c, Some((n, dec)), k, max_size)?;
        c
    } else if rs.subminimal().len() > 1 {
        split_subminimal(alpha, &rs, max_size, efex_rec)?
    } else {
        let g = rs.subminimal()[0];
        let k = class_parameter(alpha, g)?;
        let (q, _) = quotient_hom(alpha, g, QuotientMode::Strict)?;
        let (mut c, dec) = efex_rec(&q, max_size)?;
        let n = c.len();
        append_definite_block(&mut c, Some((n, dec)), k, max_size)?;
        // For child forests without an inf-valued tree the tuple so far
        // determines the value; anything else already fired below.
        let inf = alg.infinity();
        let joint = closure(&Flagged { c: &c, alpha, inf }, max_size)
            .map_err(|_| Error::size("reachable cascade tuples", max_size))?
            .values;
        let mut value_of: HashMap<Vec<usize>, usize> = HashMap::new();
        for (t, h, flagged) in joint {
            if flagged {
                continue;
            }
            if let Some(prev) = value_of.insert(t, h) {
                if prev != h {
                    return Err(Error::Internal(
                        "second component does not determine the value".into(),
                    ));
                }
            }
        }
        let assign = alpha.assign().to_vec();
        let target = alpha.target_arc().clone();
        let rule: Rule = Arc::new(move |a, p: &[usize]| match value_of.get(p) {
            Some(&h) if h != inf && target.act(assign[a], h) != inf => U_ONE,
            _ => U_CINF,
        });
        let note = format!("cinf iff h = inf or a.h = inf, h read from the first {} stages", c.len());
        let inputs = alpha.alphabet().len() * closure(&c, max_size)?.values.len();
        c.push(Stage::new(StageKind::U1, u1_arc(), rule, inputs, note));
        c
    };
    let dec = decode_map(&c, alpha, max_size)?;
    debug!("EF+EX block for |H|={}: {} stages", alg.h_len(), c.len());
    Ok((c, dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defk::{alpha1, free_kdefinite};
    use crate::fixtures::{chain4_hom, u2_example_hom};
    use crate::hom::{factors_through, trivial_hom};
    use crate::logic::{parse_formula, to_recognizer};
    use crate::terms::parse_forest;

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    fn syntactic(formula: &str, alphabet: &Alphabet) -> Homomorphism {
        let phi = parse_formula(formula).unwrap();
        to_recognizer(&phi, alphabet).unwrap().syntactic().recognizer.hom
    }

    fn onto_u1() -> Homomorphism {
        Homomorphism::from_names(u1_arc(), &[("a", "cinf"), ("b", "1")]).unwrap()
    }

    #[test]
    fn cascade_eval_matches_stagewise_wreath() {
        let alpha = onto_u1();
        let c = Cascade::from_hom(&alpha);
        for s in ["0", "a", "b(b)", "b(a)+b"] {
            let s = parse_forest(s).unwrap();
            assert_eq!(c.eval_forest(&s).unwrap(), vec![alpha.eval_forest(&s).unwrap()]);
        }
        assert!(verify_cascade(&alpha, &c, 1 << 10).unwrap());
    }

    #[test]
    fn wreath_compose_projects() {
        let alpha = chain4_hom();
        let b = relabeled_alphabet(&alpha).unwrap();
        let beta = alpha1(&b).unwrap();
        let gamma = wreath_compose(&alpha, &beta).unwrap();
        for s in ["0", "a", "b(a)", "a(b)+b", "b(b(a)+a)"] {
            let s = parse_forest(s).unwrap();
            let g = gamma.eval_forest(&s).unwrap();
            let want = format!(
                "({},{})",
                alpha.target().h_name(alpha.eval_forest(&s).unwrap()),
                beta.target().h_name(beta.eval_forest(&alpha.relabel(&s).unwrap()).unwrap())
            );
            assert_eq!(gamma.target().h_name(g), want);
        }
        assert!(factors_through(&alpha, &gamma).unwrap().holds());
        let bad = alpha1(&ab()).unwrap();
        assert!(matches!(wreath_compose(&alpha, &bad), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn ef_decompositions() {
        let c = decompose_ef(&onto_u1(), DEFAULT_MAX_SIZE).unwrap();
        assert_eq!(c.len(), 1);
        let alpha = syntactic("EF a", &ab());
        let c = decompose_ef(&alpha, DEFAULT_MAX_SIZE).unwrap();
        assert!(c.len() <= 2 && c.count(StageKind::U1) == c.len());
        assert!(verify_cascade(&alpha, &c, 1 << 16).unwrap());
        assert!(matches!(
            decompose_ef(&chain4_hom(), DEFAULT_MAX_SIZE),
            Err(Error::NotEfAlgebra { .. })
        ));
    }

    #[test]
    fn kdefinite_decompositions() {
        let c = decompose_kdefinite(&alpha1(&ab()).unwrap(), 1, DEFAULT_MAX_SIZE).unwrap();
        assert_eq!(c.len(), 2);
        let alpha2 = free_kdefinite(&ab(), 2, 1 << 16).unwrap();
        let c = decompose_kdefinite(&alpha2, 2, DEFAULT_MAX_SIZE).unwrap();
        let sizes: Vec<usize> = c.stages().iter().map(|s| s.alphabet_size).collect();
        assert_eq!(&sizes[..2], &[2, 2]);
        assert!(sizes[2..].iter().all(|&s| s == 8));
        assert!(verify_cascade(&alpha2, &c, 1 << 16).unwrap());
        for i in 0..c.len() {
            let (h, _) = c.stage_hom(i, 1 << 16).unwrap().image_restrict();
            let d = definiteness_degree(&h, NoneCriterion::RightZero, 1 << 16).unwrap();
            assert_eq!(d.degree, Some(1));
        }
        assert!(decompose_kdefinite(&alpha2, 0, DEFAULT_MAX_SIZE).is_err());
        let c = decompose_kdefinite(&trivial_hom(ab()), 0, DEFAULT_MAX_SIZE).unwrap();
        assert!(c.is_empty());
        let ef = syntactic("EF a", &ab());
        assert!(matches!(
            decompose_kdefinite(&ef, 3, DEFAULT_MAX_SIZE),
            Err(Error::NotKDefinite { .. })
        ));
    }

    #[test]
    fn efex_decompositions() {
        let c = decompose_efex(&trivial_hom(ab()), DEFAULT_MAX_SIZE).unwrap();
        assert!(c.is_empty());
        let alpha = chain4_hom();
        let c = decompose_efex(&alpha, DEFAULT_MAX_SIZE).unwrap();
        assert!(verify_cascade(&alpha, &c, 1 << 18).unwrap());
        assert!(c.count(StageKind::U1) >= 1);
        assert_eq!(c.count(StageKind::Other), 0);
        assert!(matches!(
            decompose_efex(&u2_example_hom(), DEFAULT_MAX_SIZE),
            Err(Error::NotNonconfusing { .. })
        ));
        for f in ["EX a", "EX EX a", "EF (a & EX b)", "EX (a & EX !b) | EF b"] {
            let alpha = syntactic(f, &ab());
            let c = decompose_efex(&alpha, DEFAULT_MAX_SIZE).unwrap();
            assert!(verify_cascade(&alpha, &c, 1 << 18).unwrap(), "{f}");
        }
    }

    #[test]
    fn listing_mentions_every_stage() {
        let c = decompose_efex(&chain4_hom(), DEFAULT_MAX_SIZE).unwrap();
        let text = c.listing(DEFAULT_MAX_SIZE, 8).unwrap();
        assert_eq!(text.matches("\nstage ").count(), c.len());
    }
}
