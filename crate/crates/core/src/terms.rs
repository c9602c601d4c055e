//! Forests, trees and contexts of the free forest algebra.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! forest := "0" | item ("+" item)*
//! item   := tree | "[]"            (holes only in contexts)
//! tree   := label [ "(" forest ")" ]
//! label  := letter | "(" label "," name ")"
//! ```
//!
//! Forests are stored ordered. Commutativity and idempotence of `+` only enter
//! through [`Forest::ic_normalize`] and through evaluation.

use std::fmt;

use crate::error::{Error, Result};

/// A node label: a plain letter, or a letter tagged with an algebra element
/// name as produced by relabeling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Letter(String),
    Pair(Box<Label>, String),
}

impl Label {
    pub fn letter(name: impl Into<String>) -> Self {
        Label::Letter(name.into())
    }

    pub fn pair(inner: Label, tag: impl Into<String>) -> Self {
        Label::Pair(Box::new(inner), tag.into())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Letter(a) => f.write_str(a),
            Label::Pair(l, h) => write!(f, "({l},{h})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub label: Label,
    pub children: Forest,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest(pub Vec<Tree>);

impl Tree {
    pub fn new(label: Label, children: Forest) -> Self {
        Tree { label, children }
    }

    pub fn leaf(label: Label) -> Self {
        Tree::new(label, Forest::empty())
    }
}

impl Forest {
    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn trees(&self) -> &[Tree] {
        &self.0
    }

    /// `a(self)`: the tree with root `label` over this forest.
    pub fn under(self, label: Label) -> Forest {
        Forest(vec![Tree::new(label, self)])
    }

    /// Concatenation `self + other`.
    pub fn plus(mut self, other: Forest) -> Forest {
        self.0.extend(other.0);
        self
    }

    pub fn node_count(&self) -> usize {
        self.0.iter().map(|t| 1 + t.children.node_count()).sum()
    }

    /// Number of levels; `0` has height 0 and a single leaf height 1.
    pub fn height(&self) -> usize {
        self.0
            .iter()
            .map(|t| 1 + t.children.height())
            .max()
            .unwrap_or(0)
    }

    /// Sorts siblings and removes duplicates, recursively.
    pub fn ic_normalize(&self) -> Forest {
        let mut trees: Vec<Tree> = self
            .0
            .iter()
            .map(|t| Tree::new(t.label.clone(), t.children.ic_normalize()))
            .collect();
        trees.sort();
        trees.dedup();
        Forest(trees)
    }

    /// Keeps the nodes at depth `< k` (roots have depth 0).
    pub fn truncate(&self, k: usize) -> Forest {
        if k == 0 {
            return Forest::empty();
        }
        Forest(
            self.0
                .iter()
                .map(|t| Tree::new(t.label.clone(), t.children.truncate(k - 1)))
                .collect(),
        )
    }

    /// All labels occurring in the forest, in preorder.
    pub fn labels(&self) -> Vec<&Label> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Forest, out: &mut Vec<&'a Label>) {
            for t in &f.0 {
                out.push(&t.label);
                walk(&t.children, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Rewrites labels bottom-up; `f` sees the original label and the
    /// already relabeled children.
    pub fn map_labels(&self, f: &mut impl FnMut(&Label, &Forest) -> Label) -> Forest {
        Forest(
            self.0
                .iter()
                .map(|t| {
                    let children = t.children.map_labels(f);
                    let label = f(&t.label, &t.children);
                    Tree::new(label, children)
                })
                .collect(),
        )
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            write!(f, "({})", self.children)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Forest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_forest(s)
    }
}

/// A forest with exactly one hole.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    pub left: Vec<Tree>,
    pub site: Site,
    pub right: Vec<Tree>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Site {
    Hole,
    Node(Label, Box<Context>),
}

impl Context {
    /// The context `[]`.
    pub fn hole() -> Self {
        Context {
            left: Vec::new(),
            site: Site::Hole,
            right: Vec::new(),
        }
    }

    /// `label(self)`.
    pub fn under(self, label: Label) -> Self {
        Context {
            left: Vec::new(),
            site: Site::Node(label, Box::new(self)),
            right: Vec::new(),
        }
    }

    /// `left + self + right`.
    pub fn between(mut self, left: Forest, right: Forest) -> Self {
        let mut l = left.0;
        l.append(&mut self.left);
        self.left = l;
        self.right.extend(right.0);
        self
    }

    /// Depth of the hole; `[]` has depth 0.
    pub fn depth(&self) -> usize {
        match &self.site {
            Site::Hole => 0,
            Site::Node(_, inner) => 1 + inner.depth(),
        }
    }

    pub fn is_guarded(&self) -> bool {
        self.depth() > 0
    }

    /// Substitutes `s` for the hole.
    pub fn apply(&self, s: &Forest) -> Forest {
        let mut trees = self.left.clone();
        match &self.site {
            Site::Hole => trees.extend(s.0.iter().cloned()),
            Site::Node(label, inner) => trees.push(Tree::new(label.clone(), inner.apply(s))),
        }
        trees.extend(self.right.iter().cloned());
        Forest(trees)
    }

    /// The context `self . q`: `q` substituted for the hole.
    pub fn compose(&self, q: &Context) -> Context {
        match &self.site {
            Site::Hole => {
                let mut left = self.left.clone();
                left.extend(q.left.iter().cloned());
                let mut right = q.right.clone();
                right.extend(self.right.iter().cloned());
                Context {
                    left,
                    site: q.site.clone(),
                    right,
                }
            }
            Site::Node(label, inner) => Context {
                left: self.left.clone(),
                site: Site::Node(label.clone(), Box::new(inner.compose(q))),
                right: self.right.clone(),
            },
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.left {
            write!(f, "{t}+")?;
        }
        match &self.site {
            Site::Hole => f.write_str("[]")?,
            Site::Node(label, inner) => write!(f, "{label}({inner})")?,
        }
        for t in &self.right {
            write!(f, "+{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Context {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_context(s)
    }
}

pub fn parse_forest(text: &str) -> Result<Forest> {
    let mut p = Parser::new(text);
    let term = p.forest()?;
    p.finish()?;
    term.into_forest()
        .ok_or_else(|| p.error_at(0, "holes are not allowed in a forest"))
}

pub fn parse_context(text: &str) -> Result<Context> {
    let mut p = Parser::new(text);
    let term = p.forest()?;
    p.finish()?;
    match term.holes() {
        1 => Ok(term.into_context()),
        0 => Err(p.error_at(0, "context has no hole")),
        n => Err(p.error_at(0, &format!("context has {n} holes"))),
    }
}

/// Parse tree before hole counting.
enum Item {
    Tree(Label, Vec<Item>),
    Hole,
}

struct Term(Vec<Item>);

impl Term {
    fn holes(&self) -> usize {
        fn count(items: &[Item]) -> usize {
            items
                .iter()
                .map(|i| match i {
                    Item::Hole => 1,
                    Item::Tree(_, c) => count(c),
                })
                .sum()
        }
        count(&self.0)
    }

    fn into_forest(self) -> Option<Forest> {
        fn conv(items: Vec<Item>) -> Option<Forest> {
            items
                .into_iter()
                .map(|i| match i {
                    Item::Hole => None,
                    Item::Tree(l, c) => Some(Tree::new(l, conv(c)?)),
                })
                .collect::<Option<Vec<_>>>()
                .map(Forest)
        }
        conv(self.0)
    }

    // caller guarantees exactly one hole
    fn into_context(self) -> Context {
        fn has_hole(i: &Item) -> bool {
            match i {
                Item::Hole => true,
                Item::Tree(_, c) => c.iter().any(has_hole),
            }
        }
        fn conv(items: Vec<Item>) -> Context {
            let pos = items.iter().position(has_hole).expect("one hole");
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut site = Site::Hole;
            for (i, item) in items.into_iter().enumerate() {
                if i == pos {
                    site = match item {
                        Item::Hole => Site::Hole,
                        Item::Tree(l, c) => Site::Node(l, Box::new(conv(c))),
                    };
                } else {
                    let t = Term(vec![item]).into_forest().expect("no hole").0.remove(0);
                    if i < pos {
                        left.push(t)
                    } else {
                        right.push(t)
                    }
                }
            }
            Context { left, site, right }
        }
        conv(self.0)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error_at(&self, pos: usize, message: &str) -> Error {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn error(&self, message: &str) -> Error {
        self.error_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            Err(self.error("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    fn forest(&mut self) -> Result<Term> {
        let mut items = Vec::new();
        loop {
            if self.peek() == Some('0') && !self.next_is_name_char(1) {
                self.pos += 1;
            } else {
                items.push(self.item()?);
            }
            if !self.eat("+") {
                break;
            }
        }
        Ok(Term(items))
    }

    fn next_is_name_char(&self, offset: usize) -> bool {
        self.src[self.pos + offset..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    fn item(&mut self) -> Result<Item> {
        if self.eat("[]") {
            return Ok(Item::Hole);
        }
        let label = self.label()?;
        let children = if self.eat("(") {
            let inner = self.forest()?;
            self.expect(")")?;
            inner.0
        } else {
            Vec::new()
        };
        Ok(Item::Tree(label, children))
    }

    fn label(&mut self) -> Result<Label> {
        if self.eat("(") {
            let inner = self.label()?;
            self.expect(",")?;
            let tag = self.name(true)?;
            self.expect(")")?;
            return Ok(Label::Pair(Box::new(inner), tag));
        }
        Ok(Label::Letter(self.name(false)?))
    }

    /// Letters are `[A-Za-z][A-Za-z0-9_]*`; tags may also start with a digit
    /// and contain primes.
    fn name(&mut self, tag: bool) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || (tag && (c.is_ascii_digit() || c == '+'))
            } else {
                c.is_ascii_alphanumeric() || c == '_' || (tag && c == '\'')
            };
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        if end == 0 {
            return Err(self.error(if tag { "expected a tag" } else { "expected a letter" }));
        }
        self.pos += end;
        Ok(rest[..end].to_string())
    }
}
