//! EF/EX formulas over forests.
//!
//! Every formula is a tree formula; forest formulas are those in which every
//! letter atom sits below an `EF` or `EX`. Trees and forests get separate
//! satisfaction relations: a forest formula holds in the tree `a(s)` iff it
//! holds in the forest `s`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::algebra::{standard_names, ForestAlgebra, Transform};
use crate::error::{Error, Result};
use crate::hom::{closure, Alphabet, Evaluator, Homomorphism, Recognizer, DEFAULT_CLOSURE_CAP};
use crate::terms::{Forest, Label, Tree};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    Letter(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    EF(Box<Formula>),
    EX(Box<Formula>),
}

impl Formula {
    pub fn letter(name: impl Into<String>) -> Self {
        Formula::Letter(name.into())
    }

    pub fn falsum() -> Self {
        Formula::True.not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn ef(self) -> Self {
        Formula::EF(Box::new(self))
    }

    pub fn ex(self) -> Self {
        Formula::EX(Box::new(self))
    }

    /// No letter atom outside the scope of a temporal operator.
    pub fn is_forest_formula(&self) -> bool {
        match self {
            Formula::True | Formula::EF(_) | Formula::EX(_) => true,
            Formula::Letter(_) => false,
            Formula::Not(x) => x.is_forest_formula(),
            Formula::And(x, y) | Formula::Or(x, y) => x.is_forest_formula() && y.is_forest_formula(),
        }
    }

    pub fn check_forest(&self) -> Result<()> {
        if self.is_forest_formula() {
            Ok(())
        } else {
            Err(Error::Role(format!(
                "`{self}` is a tree formula only; letters are not interpreted in forests"
            )))
        }
    }

    /// Nesting depth of temporal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::Letter(_) => 0,
            Formula::Not(x) => x.modal_depth(),
            Formula::And(x, y) | Formula::Or(x, y) => x.modal_depth().max(y.modal_depth()),
            Formula::EF(x) | Formula::EX(x) => 1 + x.modal_depth(),
        }
    }

    pub fn uses_ef(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::EF(_)))
    }

    pub fn uses_ex(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::EX(_)))
    }

    fn any_node(&self, p: &dyn Fn(&Formula) -> bool) -> bool {
        p(self)
            || match self {
                Formula::True | Formula::Letter(_) => false,
                Formula::Not(x) | Formula::EF(x) | Formula::EX(x) => x.any_node(p),
                Formula::And(x, y) | Formula::Or(x, y) => x.any_node(p) || y.any_node(p),
            }
    }

    pub fn letters(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_letters<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::True => {}
            Formula::Letter(a) => out.push(a),
            Formula::Not(x) | Formula::EF(x) | Formula::EX(x) => x.collect_letters(out),
            Formula::And(x, y) | Formula::Or(x, y) => {
                x.collect_letters(out);
                y.collect_letters(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.precedence() < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::True => f.write_str("T")?,
            Formula::Not(x) if **x == Formula::True => f.write_str("F")?,
            Formula::Letter(a) => f.write_str(a)?,
            Formula::Not(x) => {
                f.write_str("!")?;
                x.write_at(f, 3)?;
            }
            Formula::And(x, y) => {
                x.write_at(f, 2)?;
                f.write_str(" & ")?;
                y.write_at(f, 3)?;
            }
            Formula::Or(x, y) => {
                x.write_at(f, 1)?;
                f.write_str(" | ")?;
                y.write_at(f, 2)?;
            }
            Formula::EF(x) | Formula::EX(x) => {
                f.write_str(if matches!(self, Formula::EF(_)) { "EF" } else { "EX" })?;
                if x.precedence() == 3 {
                    f.write_str(" ")?;
                }
                x.write_at(f, 3)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    True,
    False,
    Not,
    And,
    Or,
    EF,
    EX,
    Open,
    Close,
    Letter(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let start = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let tok = match c {
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::Open,
            ')' => Tok::Close,
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "T" => Tok::True,
                    "F" => Tok::False,
                    "EF" => Tok::EF,
                    "EX" => Tok::EX,
                    _ => Tok::Letter(word),
                };
                out.push((tok, start.0, start.1));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        col += 1;
        out.push((tok, start.0, start.1));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2));
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            f = f.or(self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of formula"));
        };
        self.pos += 1;
        match tok {
            Tok::Not => Ok(self.unary()?.not()),
            Tok::EF => Ok(self.unary()?.ef()),
            Tok::EX => Ok(self.unary()?.ex()),
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::falsum()),
            Tok::Letter(a) => Ok(Formula::Letter(a)),
            Tok::Open => {
                let f = self.or()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(f)
            }
            Tok::And | Tok::Or | Tok::Close => {
                self.pos -= 1;
                Err(self.error("expected a formula"))
            }
        }
    }
}

/// Parses `T F ! & | EF EX ( )` and letters, with `|` binding weakest.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let last_line = text.lines().count().max(1);
    let last_col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    let mut p = Parser {
        toks,
        pos: 0,
        end: (last_line, last_col),
    };
    let f = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

/// Parses a formula that must be usable as a forest formula.
pub fn parse_forest_formula(text: &str) -> Result<Formula> {
    let f = parse_formula(text)?;
    f.check_forest()?;
    Ok(f)
}

/// `s |=_f φ`.
pub fn models(s: &Forest, phi: &Formula) -> Result<bool> {
    phi.check_forest()?;
    Ok(holds_forest(s, phi))
}

/// `t |=_t φ`.
pub fn models_tree(t: &Tree, phi: &Formula) -> bool {
    match phi {
        Formula::True => true,
        Formula::Letter(a) => matches!(&t.label, Label::Letter(b) if b == a),
        Formula::Not(x) => !models_tree(t, x),
        Formula::And(x, y) => models_tree(t, x) && models_tree(t, y),
        Formula::Or(x, y) => models_tree(t, x) || models_tree(t, y),
        Formula::EF(_) | Formula::EX(_) => holds_forest(&t.children, phi),
    }
}

fn holds_forest(s: &Forest, phi: &Formula) -> bool {
    match phi {
        Formula::True => true,
        Formula::Letter(_) => unreachable!("role checked"),
        Formula::Not(x) => !holds_forest(s, x),
        Formula::And(x, y) => holds_forest(s, x) && holds_forest(s, y),
        Formula::Or(x, y) => holds_forest(s, x) || holds_forest(s, y),
        Formula::EX(x) => s.trees().iter().any(|t| models_tree(t, x)),
        Formula::EF(x) => s
            .trees()
            .iter()
            .any(|t| models_tree(t, x) || holds_forest(&t.children, phi)),
    }
}

/// Forest types: the set of `EF`/`EX` subformulas a forest satisfies.
///
/// Both operators are existential over nodes, so the type of a sum is the
/// union of the types.
struct TypeEval {
    alphabet: Alphabet,
    atoms: Vec<Formula>,
    index: HashMap<Formula, usize>,
    /// Letter name of each alphabet position, if it is a plain letter.
    names: Vec<Option<String>>,
}

impl TypeEval {
    fn new(phi: &Formula, alphabet: &Alphabet) -> Self {
        let mut atoms = Vec::new();
        let mut index = HashMap::new();
        collect_atoms(phi, &mut atoms, &mut index);
        let names = alphabet
            .labels()
            .iter()
            .map(|l| match l {
                Label::Letter(a) => Some(a.clone()),
                Label::Pair(..) => None,
            })
            .collect();
        TypeEval {
            alphabet: alphabet.clone(),
            atoms,
            index,
            names,
        }
    }

    fn tree_holds(&self, phi: &Formula, letter: usize, ty: &FixedBitSet) -> bool {
        match phi {
            Formula::True => true,
            Formula::Letter(a) => self.names[letter].as_deref() == Some(a),
            Formula::Not(x) => !self.tree_holds(x, letter, ty),
            Formula::And(x, y) => self.tree_holds(x, letter, ty) && self.tree_holds(y, letter, ty),
            Formula::Or(x, y) => self.tree_holds(x, letter, ty) || self.tree_holds(y, letter, ty),
            Formula::EF(_) | Formula::EX(_) => ty.contains(self.index[phi]),
        }
    }

    fn forest_holds(&self, phi: &Formula, ty: &FixedBitSet) -> bool {
        match phi {
            Formula::True => true,
            Formula::Letter(_) => false,
            Formula::Not(x) => !self.forest_holds(x, ty),
            Formula::And(x, y) => self.forest_holds(x, ty) && self.forest_holds(y, ty),
            Formula::Or(x, y) => self.forest_holds(x, ty) || self.forest_holds(y, ty),
            Formula::EF(_) | Formula::EX(_) => ty.contains(self.index[phi]),
        }
    }
}

fn collect_atoms(phi: &Formula, atoms: &mut Vec<Formula>, index: &mut HashMap<Formula, usize>) {
    match phi {
        Formula::True | Formula::Letter(_) => {}
        Formula::Not(x) => collect_atoms(x, atoms, index),
        Formula::And(x, y) | Formula::Or(x, y) => {
            collect_atoms(x, atoms, index);
            collect_atoms(y, atoms, index);
        }
        Formula::EF(x) | Formula::EX(x) => {
            collect_atoms(x, atoms, index);
            if !index.contains_key(phi) {
                index.insert(phi.clone(), atoms.len());
                atoms.push(phi.clone());
            }
        }
    }
}

impl Evaluator for TypeEval {
    type Value = FixedBitSet;

    fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    fn letter_label(&self, letter: usize) -> Label {
        self.alphabet.label(letter).clone()
    }

    fn zero(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.atoms.len())
    }

    fn plus(&self, x: &FixedBitSet, y: &FixedBitSet) -> FixedBitSet {
        x | y
    }

    fn apply(&self, letter: usize, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.atoms.len());
        for (i, atom) in self.atoms.iter().enumerate() {
            let bit = match atom {
                Formula::EF(xi) => self.tree_holds(xi, letter, x) || x.contains(i),
                Formula::EX(xi) => self.tree_holds(xi, letter, x),
                _ => unreachable!(),
            };
            out.set(i, bit);
        }
        out
    }
}

/// A recognizer for `L_φ` whose horizontal elements are the reachable types.
pub fn to_recognizer(phi: &Formula, alphabet: &Alphabet) -> Result<Recognizer> {
    phi.check_forest()?;
    for a in phi.letters() {
        alphabet.lookup(&Label::letter(a))?;
    }
    let eval = TypeEval::new(phi, alphabet);
    let mut types = closure(&eval, DEFAULT_CLOSURE_CAP)?.values;
    // zero first, then by size and content
    types[1..].sort_by(|x, y| (x.count_ones(..), x).cmp(&(y.count_ones(..), y)));
    let index: HashMap<&FixedBitSet, usize> = types.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let plus: Vec<Vec<usize>> = types
        .iter()
        .map(|x| types.iter().map(|y| index[&eval.plus(x, y)]).collect())
        .collect();
    let names: Vec<String> = (0..types.len()).map(|i| format!("t{i}")).collect();
    let names = standard_names(names, 0, &plus);
    let gens: Vec<(String, Transform)> = (0..alphabet.len())
        .map(|a| {
            let t = types.iter().map(|x| index[&eval.apply(a, x)]).collect();
            (alphabet.label(a).to_string(), t)
        })
        .collect();
    let (alg, idx) = ForestAlgebra::generated(names, plus, 0, gens)?;
    let hom = Homomorphism::new(alphabet.clone(), Arc::new(alg), idx)?;
    let accept: Vec<usize> = (0..types.len())
        .filter(|&i| eval.forest_holds(phi, &types[i]))
        .collect();
    Recognizer::new(hom, &accept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::chain4_hom;
    use crate::hom::isomorphism;

    fn f(s: &str) -> Forest {
        s.parse().unwrap()
    }

    fn psi() -> Formula {
        parse_formula("EX(a & !EF b) & EX(b | EF b)").unwrap()
    }

    #[test]
    fn parse_and_print() {
        let p = psi();
        let a = Formula::letter("a");
        let b = Formula::letter("b");
        let expected = a
            .and(b.clone().ef().not())
            .ex()
            .and(b.clone().or(b.ef()).ex());
        assert_eq!(p, expected);
        assert_eq!(p.to_string(), "EX(a & !EF b) & EX(b | EF b)");
        for text in ["EF T", "!(a | b) & EX F", "a | b & c", "(a | b) & c", "EX EF !a", "a & (b & c)"] {
            let g = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&g.to_string()).unwrap(), g, "{text}");
        }
        assert_eq!(parse_formula("a | b & c").unwrap().to_string(), "a | b & c");
        assert_eq!(parse_formula("a & (b & c)").unwrap().to_string(), "a & (b & c)");
    }

    #[test]
    fn parse_errors_and_roles() {
        assert!(matches!(parse_formula("EX(a"), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula("a &"), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula("a b"), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(parse_formula("a ? b"), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(parse_forest_formula("a"), Err(Error::Role(_))));
        assert!(matches!(parse_forest_formula("EX a | b"), Err(Error::Role(_))));
        assert!(parse_forest_formula("EF T").is_ok());
        assert!(matches!(models(&f("a"), &Formula::letter("a")), Err(Error::Role(_))));
    }

    #[test]
    fn semantics() {
        let s = f("a+b(b)");
        assert!(models(&s, &parse_formula("EX a").unwrap()).unwrap());
        assert!(models(&s, &parse_formula("EX(a & !EF b)").unwrap()).unwrap());
        assert!(models(&s, &psi()).unwrap());
        let t = &f("a(b)").0[0];
        assert!(!models_tree(t, &parse_formula("EX a").unwrap()));
        assert!(models_tree(t, &parse_formula("EX b").unwrap()));
        assert!(models(&Forest::empty(), &Formula::True).unwrap());
        assert!(!models(&Forest::empty(), &parse_formula("EX a").unwrap()).unwrap());
        assert!(models(&f("c(c(a))"), &parse_formula("EF a").unwrap()).unwrap());
        assert!(!models(&f("c(c(a))"), &parse_formula("EX a").unwrap()).unwrap());
    }

    #[test]
    fn compiled_recognizers() {
        let ab = Alphabet::from_names(&["a", "b"]).unwrap();
        let r = to_recognizer(&Formula::True, &ab).unwrap();
        assert!(r.hom.target().check_axioms().is_valid());
        assert_eq!(r.hom.target().h_len(), 1);
        assert_eq!(r.accepting(), vec![0]);

        let r = to_recognizer(&parse_formula("EX a").unwrap(), &ab).unwrap();
        let syn = r.syntactic().recognizer;
        assert!(syn.hom.target().h_len() <= 2);

        let phi = psi().or(psi().ef());
        let r = to_recognizer(&phi, &ab).unwrap();
        assert!(r.hom.target().check_axioms().is_valid());
        for s in ["a+b", "a+b(b)", "a(a+b)", "b(a(a)+a(b))", "a(a)+a(b)", "0"] {
            let s = f(s);
            assert_eq!(r.accepts(&s).unwrap(), models(&s, &phi).unwrap(), "{s}");
        }
        let syn = r.syntactic().recognizer;
        assert_eq!(syn.hom.target().h_len(), 4);
        assert!(isomorphism(&syn.hom, &chain4_hom()).is_some());
    }

    #[test]
    fn unknown_letters_are_rejected() {
        let ab = Alphabet::from_names(&["a", "b"]).unwrap();
        assert!(matches!(
            to_recognizer(&parse_formula("EF c").unwrap(), &ab),
            Err(Error::UnknownLetter(_))
        ));
    }
}
