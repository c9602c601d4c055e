//! Deciders for EF, EX and EF+EX definability.
//!
//! A language is EF-definable iff its syntactic algebra satisfies
//! `h + g = g + h` and `vh + h = vh`, EX-definable iff its syntactic morphism
//! is k-definite for some `k`, and EF+EX-definable iff its syntactic morphism
//! is nonconfusing. Nonconfusion is decided per reachability class by the
//! descending fixpoint `B_0 ⊇ B_1 ⊇ ...` of confusable value pairs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::algebra::{ForestAlgebra, Transform};
use crate::defk::{definiteness_degree, simk_equiv, NoneCriterion};
use crate::error::{Error, Result};
use crate::hom::{Homomorphism, Recognizer, DEFAULT_CLOSURE_CAP};
use crate::reach::{quotient_hom, QuotientMode, Reachability};
use crate::terms::Forest;

/// A failure of the EF identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EfViolation {
    /// `h + g != g + h`.
    NotCommutative { h: usize, g: usize },
    /// `v h + h != v h` for a listed vertical element `v`.
    NotAbsorbing { v: usize, h: usize },
}

/// The first violation of the EF identities, scanning listed vertical
/// elements in order. Generators suffice: the identity `vh + h = vh` is
/// closed under composition.
pub fn ef_violation(alg: &ForestAlgebra) -> Option<EfViolation> {
    let n = alg.h_len();
    for h in 0..n {
        for g in 0..n {
            if alg.plus(h, g) != alg.plus(g, h) {
                return Some(EfViolation::NotCommutative { h, g });
            }
        }
    }
    for v in 0..alg.v_len() {
        for h in 0..n {
            let vh = alg.act(v, h);
            if alg.plus(vh, h) != vh {
                return Some(EfViolation::NotAbsorbing { v, h });
            }
        }
    }
    None
}

pub fn is_ef_algebra(alg: &ForestAlgebra) -> bool {
    ef_violation(alg).is_none()
}

pub type ValuePair = (usize, usize);

/// How a pair entered its level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    Base,
    /// `(a h, a h')` for `(h, h')` on the previous level.
    Letter { letter: usize, parent: ValuePair },
    /// `(h + g, h' + g)` for `(h, h')` on the same level.
    AddConst { g: usize, parent: ValuePair },
    /// `(h + g, h' + g')` for two pairs on the same level.
    AddPair { left: ValuePair, right: ValuePair },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `B_k` is empty.
    Empty { k: usize },
    /// `B_k = B_{k-1}` is nonempty, so every later level is the same.
    Stable { k: usize },
}

/// The `B_j` run for one reachability class.
#[derive(Clone, Debug)]
pub struct ConfusionTrace {
    pub class: usize,
    pub members: Vec<usize>,
    /// `levels[j]` is `B_j` with one derivation per pair.
    pub levels: Vec<BTreeMap<ValuePair, Derivation>>,
    pub verdict: Verdict,
}

impl ConfusionTrace {
    pub fn is_confused(&self) -> bool {
        matches!(self.verdict, Verdict::Stable { .. })
    }

    /// `B_k` for any `k`; levels past a stable verdict repeat the last one.
    pub fn level(&self, k: usize) -> &BTreeMap<ValuePair, Derivation> {
        &self.levels[k.min(self.levels.len() - 1)]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }
}

/// Runs the fixpoint for class `class` of the (onto) homomorphism `alpha`.
pub fn class_trace(alpha: &Homomorphism, rs: &Reachability, class: usize) -> Result<ConfusionTrace> {
    let alg = alpha.target();
    let n = alg.h_len();
    let members = rs.class(class).to_vec();
    let in_class = |h: usize| rs.class_of(h) == class;
    let in_b0 = |(h, g): ValuePair| h != g && in_class(h) && in_class(g);

    let mut b0 = BTreeMap::new();
    for &h in &members {
        for &g in &members {
            if h != g {
                b0.insert((h, g), Derivation::Base);
            }
        }
    }
    let mut levels = vec![b0];
    let bound = n * n;
    loop {
        let j = levels.len() - 1;
        if levels[j].is_empty() {
            return Ok(ConfusionTrace {
                class,
                members,
                levels,
                verdict: Verdict::Empty { k: j },
            });
        }
        if j > bound {
            return Err(Error::Internal(format!(
                "fixpoint for class {class} ran past {bound} rounds"
            )));
        }
        let prev = &levels[j];
        // dense membership; the BTreeMap is only built at the end of the round
        let mut found: Vec<Option<Derivation>> = vec![None; n * n];
        let mut order: Vec<ValuePair> = Vec::new();
        let mut add = |q: ValuePair, d: Derivation, order: &mut Vec<ValuePair>| {
            let slot = &mut found[q.0 * n + q.1];
            if slot.is_none() && in_b0(q) {
                *slot = Some(d);
                order.push(q);
                true
            } else {
                false
            }
        };
        for &(h, g) in prev.keys() {
            for a in 0..alpha.alphabet().len() {
                let v = alpha.letter(a);
                let p = (alg.act(v, h), alg.act(v, g));
                add(p, Derivation::Letter { letter: a, parent: (h, g) }, &mut order);
            }
        }
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for g in 0..n {
                let q = (alg.plus(p.0, g), alg.plus(p.1, g));
                add(q, Derivation::AddConst { g, parent: p }, &mut order);
            }
            let mut i = 0;
            while i < order.len() {
                let r = order[i];
                for (left, right) in [(p, r), (r, p)] {
                    let q = (alg.plus(left.0, right.0), alg.plus(left.1, right.1));
                    add(q, Derivation::AddPair { left, right }, &mut order);
                }
                i += 1;
            }
        }
        let next: BTreeMap<ValuePair, Derivation> = order
            .iter()
            .map(|&q| (q, found[q.0 * n + q.1].expect("recorded")))
            .collect();
        if let Some(p) = next.keys().find(|p| !prev.contains_key(p)) {
            return Err(Error::Internal(format!(
                "B_{} is not contained in B_{j}: {p:?}",
                j + 1
            )));
        }
        let stable = next.len() == prev.len();
        levels.push(next);
        if stable {
            return Ok(ConfusionTrace {
                class,
                members,
                levels,
                verdict: Verdict::Stable { k: j + 1 },
            });
        }
    }
}

#[derive(Clone, Debug)]
pub struct NonconfusionReport {
    /// One trace per reachability class, in class order.
    pub traces: Vec<ConfusionTrace>,
}

impl NonconfusionReport {
    pub fn nonconfusing(&self) -> bool {
        self.traces.iter().all(|t| !t.is_confused())
    }

    /// Least `k` with `B_k` empty for every class.
    pub fn parameter(&self) -> Option<usize> {
        self.traces
            .iter()
            .map(|t| match t.verdict {
                Verdict::Empty { k } => Some(k),
                Verdict::Stable { .. } => None,
            })
            .try_fold(0, |acc, k| k.map(|k| acc.max(k)))
    }

    pub fn first_confused(&self) -> Option<&ConfusionTrace> {
        self.traces.iter().find(|t| t.is_confused())
    }

    /// Largest number of rounds used by any class.
    pub fn rounds(&self) -> usize {
        self.traces.iter().map(|t| t.levels.len() - 1).max().unwrap_or(0)
    }
}

/// The `B_k` fixpoint for every class. `alpha` must be onto its target.
pub fn nonconfusion(alpha: &Homomorphism) -> Result<NonconfusionReport> {
    if !alpha.is_onto() {
        return Err(Error::Structural(
            "nonconfusion needs a homomorphism onto its target; restrict to the image first".into(),
        ));
    }
    let rs = Reachability::of(alpha.target());
    let traces = (0..rs.classes().len())
        .map(|c| class_trace(alpha, &rs, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(NonconfusionReport { traces })
}

/// Two forests certifying a confused pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionWitness {
    pub s: Forest,
    pub t: Forest,
    pub k: usize,
    pub values: ValuePair,
}

/// Unwinds the derivation of `pair` on level `k` into forests `s, t` with the
/// pair as values whose `α_Γ` relabelings are `~k` equivalent. All three
/// properties are checked before returning.
pub fn confusion_witness(
    alpha: &Homomorphism,
    trace: &ConfusionTrace,
    pair: ValuePair,
    k: usize,
) -> Result<ConfusionWitness> {
    if !trace.level(k).contains_key(&pair) {
        return Err(Error::Internal(format!("{pair:?} is not on level {k}")));
    }
    let base = alpha.realize_nonempty();
    let any = alpha.realize();
    let mut memo: HashMap<(ValuePair, usize), (Forest, Forest)> = HashMap::new();
    let (s, t) = unwind(alpha, trace, pair, k, &base, &any, &mut memo)?;
    let s = s.ic_normalize();
    let t = t.ic_normalize();

    let (quot, _) = quotient_hom(alpha, trace.class, QuotientMode::Strict)?;
    let hs = alpha.eval_forest(&s)?;
    let ht = alpha.eval_forest(&t)?;
    let ok_values = (hs, ht) == pair;
    let ok_class = trace.members.contains(&hs) && trace.members.contains(&ht);
    let ok_simk = simk_equiv(&quot.relabel(&s)?, &quot.relabel(&t)?, k);
    if !(ok_values && ok_class && ok_simk) {
        return Err(Error::Internal(format!(
            "witness ({s}, {t}) for {pair:?} at level {k} failed verification"
        )));
    }
    Ok(ConfusionWitness { s, t, k, values: pair })
}

fn unwind(
    alpha: &Homomorphism,
    trace: &ConfusionTrace,
    pair: ValuePair,
    k: usize,
    base: &BTreeMap<usize, Forest>,
    any: &BTreeMap<usize, Forest>,
    memo: &mut HashMap<(ValuePair, usize), (Forest, Forest)>,
) -> Result<(Forest, Forest)> {
    if let Some(w) = memo.get(&(pair, k)) {
        return Ok(w.clone());
    }
    let missing = || Error::Internal(format!("no derivation for {pair:?} at level {k}"));
    let d = *trace.level(k).get(&pair).ok_or_else(missing)?;
    let w = match d {
        Derivation::Base => {
            let pick = |h: usize| base.get(&h).or_else(|| any.get(&h)).cloned().ok_or_else(missing);
            (pick(pair.0)?, pick(pair.1)?)
        }
        Derivation::Letter { letter, parent } => {
            let (s, t) = unwind(alpha, trace, parent, k - 1, base, any, memo)?;
            let l = alpha.alphabet().label(letter).clone();
            (s.under(l.clone()), t.under(l))
        }
        Derivation::AddConst { g, parent } => {
            let (s, t) = unwind(alpha, trace, parent, k, base, any, memo)?;
            let u = any.get(&g).cloned().ok_or_else(missing)?;
            (s.plus(u.clone()), t.plus(u))
        }
        Derivation::AddPair { left, right } => {
            let (s1, t1) = unwind(alpha, trace, left, k, base, any, memo)?;
            let (s2, t2) = unwind(alpha, trace, right, k, base, any, memo)?;
            (s1.plus(s2), t1.plus(t2))
        }
    };
    memo.insert((pair, k), w.clone());
    Ok(w)
}

/// The smallest confused pair of the first confused class, taken from the
/// level at which its trace stabilized.
pub fn first_confusion_witness(
    alpha: &Homomorphism,
    report: &NonconfusionReport,
) -> Result<Option<ConfusionWitness>> {
    let Some(trace) = report.first_confused() else {
        return Ok(None);
    };
    let Verdict::Stable { k } = trace.verdict else {
        unreachable!()
    };
    let pair = *trace.level(k).keys().next().expect("stable levels are nonempty");
    confusion_witness(alpha, trace, pair, k).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    EF,
    EX,
    EFEX,
}

impl FromStr for Fragment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ef" => Ok(Fragment::EF),
            "ex" => Ok(Fragment::EX),
            "efex" | "ef+ex" => Ok(Fragment::EFEX),
            _ => Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("unknown logic `{s}`; expected ef, ex or efex"),
            }),
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::EF => "ef",
            Fragment::EX => "ex",
            Fragment::EFEX => "efex",
        })
    }
}

/// Why a decision came out the way it did.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// The syntactic algebra is an EF-algebra.
    EfAlgebra,
    EfViolation(EfViolation),
    /// Least k with the syntactic morphism k-definite.
    Definite { degree: usize },
    /// An idempotent `e` and `s` with `e s != e` in the guarded semigroup.
    NotDefinite { e: Transform, s: Transform },
    Nonconfusing { parameter: usize },
    Confused(ConfusionWitness),
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub fragment: Fragment,
    pub holds: bool,
    /// The homomorphism the decision is about.
    pub hom: Homomorphism,
    pub certificate: Certificate,
    pub nonconfusion: Option<NonconfusionReport>,
}

/// Decides definability of the language of `rec` in the given fragment, on
/// its syntactic morphism.
pub fn decide(rec: &Recognizer, fragment: Fragment) -> Result<Decision> {
    let syn = rec.syntactic().recognizer.hom;
    decide_hom(&syn, fragment)
}

/// Runs the decision procedure directly on an onto homomorphism. The answer
/// is about the homomorphism rather than a language.
pub fn decide_hom(alpha: &Homomorphism, fragment: Fragment) -> Result<Decision> {
    let (holds, certificate, nonconfusion) = match fragment {
        Fragment::EF => match ef_violation(alpha.target()) {
            None => (true, Certificate::EfAlgebra, None),
            Some(v) => (false, Certificate::EfViolation(v), None),
        },
        Fragment::EX => {
            let r = definiteness_degree(alpha, NoneCriterion::RightZero, DEFAULT_CLOSURE_CAP)?;
            match (r.degree, r.witness) {
                (Some(degree), _) => (true, Certificate::Definite { degree }, None),
                (None, Some((e, s))) => (false, Certificate::NotDefinite { e, s }, None),
                (None, None) => return Err(Error::Internal("no definiteness witness".into())),
            }
        }
        Fragment::EFEX => {
            let report = nonconfusion(alpha)?;
            match report.parameter() {
                Some(parameter) => (true, Certificate::Nonconfusing { parameter }, Some(report)),
                None => {
                    let w = first_confusion_witness(alpha, &report)?.expect("a confused class");
                    (false, Certificate::Confused(w), Some(report))
                }
            }
        }
    };
    Ok(Decision {
        fragment,
        holds,
        hom: alpha.clone(),
        certificate,
        nonconfusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{u1, u2};
    use crate::fixtures::{chain4_hom, chain4_recognizer, u2_example_hom, u2_example_recognizer};
    use crate::hom::{trivial_hom, Alphabet};
    use crate::logic::{parse_formula, to_recognizer};

    fn lang(text: &str) -> Recognizer {
        to_recognizer(&parse_formula(text).unwrap(), &Alphabet::from_names(&["a", "b"]).unwrap()).unwrap()
    }

    #[test]
    fn ef_identities() {
        assert!(is_ef_algebra(&u1()));
        let alpha = chain4_hom();
        let alg = alpha.target();
        let v = alpha.letter(1);
        assert_eq!(
            ef_violation(alg),
            Some(EfViolation::NotAbsorbing { v, h: 1 })
        );
        let u = u2();
        match ef_violation(&u) {
            Some(EfViolation::NotAbsorbing { v, h }) => {
                assert_eq!(u.v_name(v), "c0");
                assert_eq!(u.h_name(h), "inf");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chain4_is_nonconfusing() {
        let r = nonconfusion(&chain4_hom()).unwrap();
        assert!(r.nonconfusing());
        assert_eq!(r.parameter(), Some(0));
        assert!(r.traces.iter().all(|t| t.levels[0].is_empty()));
        assert!(nonconfusion(&trivial_hom(Alphabet::from_names(&["a"]).unwrap()))
            .unwrap()
            .nonconfusing());
    }

    #[test]
    fn u2_example_is_confused() {
        let alpha = u2_example_hom();
        let r = nonconfusion(&alpha).unwrap();
        assert!(!r.nonconfusing());
        let t = r.first_confused().unwrap();
        assert_eq!(t.members, vec![0, 1]);
        assert_eq!(t.verdict, Verdict::Stable { k: 1 });
        let pairs: Vec<_> = t.levels[1].keys().copied().collect();
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(t.levels[0].len(), 2);

        let w = confusion_witness(&alpha, t, (0, 1), 1).unwrap();
        assert_eq!((w.s.to_string(), w.t.to_string()), ("a(b)".into(), "a(c)".into()));
        let w = confusion_witness(&alpha, t, (0, 1), 2).unwrap();
        assert_eq!((w.s.to_string(), w.t.to_string()), ("a(a(b))".into(), "a(a(c))".into()));
        let w = confusion_witness(&alpha, t, (1, 0), 0).unwrap();
        assert_eq!((w.s.to_string(), w.t.to_string()), ("c".into(), "b".into()));
    }

    #[test]
    fn deciders_on_examples() {
        let d = decide(&chain4_recognizer(), Fragment::EF).unwrap();
        assert!(!d.holds);
        let d = decide(&chain4_recognizer(), Fragment::EFEX).unwrap();
        assert!(d.holds);
        let d = decide(&u2_example_recognizer(), Fragment::EFEX).unwrap();
        assert!(!d.holds);
        match d.certificate {
            Certificate::Confused(w) => assert_eq!(w.s.to_string(), "a(b)"),
            other => panic!("{other:?}"),
        }

        let ef_a = lang("EF a");
        assert!(decide(&ef_a, Fragment::EF).unwrap().holds);
        assert!(!decide(&ef_a, Fragment::EX).unwrap().holds);
        assert!(decide(&ef_a, Fragment::EFEX).unwrap().holds);
        let ex_a = lang("EX a");
        assert!(decide(&ex_a, Fragment::EX).unwrap().holds);
        assert!(decide(&ex_a, Fragment::EFEX).unwrap().holds);
        let psi = lang("EX(a & !EF b) & EX(b | EF b)");
        let phi = lang("EX(a & !EF b) & EX(b | EF b) | EF(EX(a & !EF b) & EX(b | EF b))");
        assert!(decide(&psi, Fragment::EFEX).unwrap().holds);
        assert!(!decide(&phi, Fragment::EF).unwrap().holds);
        assert!(!decide(&phi, Fragment::EX).unwrap().holds);
        assert!(decide(&phi, Fragment::EFEX).unwrap().holds);
    }

    #[test]
    fn fragment_names() {
        assert_eq!("EF".parse::<Fragment>().unwrap(), Fragment::EF);
        assert_eq!("efex".parse::<Fragment>().unwrap(), Fragment::EFEX);
        assert!("ctl".parse::<Fragment>().is_err());
    }
}
