//! Finite forest algebras as explicit tables.
//!
//! The horizontal monoid `H` is written additively with identity `0`; it is
//! required to be idempotent and commutative, so the sum of all its elements is
//! the absorbing element `inf`. The vertical monoid `V` acts on `H` on the left.
//!
//! `V` is stored as a list of elements together with their actions. When the
//! list is closed under composition the algebra carries a full `compose` table;
//! otherwise the listed elements are a generating set and `V` is the monoid
//! they generate. Everything that only depends on the action (evaluation,
//! reachability, the decision procedures) works directly on a generating set,
//! so large vertical monoids never need to be enumerated.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A function `H -> H`, the action of a vertical element.
pub type Transform = Vec<usize>;

/// Default cap on the number of vertical elements materialized by
/// [`ForestAlgebra::materialize`] and the table constructions.
pub const DEFAULT_V_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestAlgebra {
    h_names: Vec<String>,
    plus: Vec<Vec<usize>>,
    zero: usize,
    v_names: Vec<String>,
    act: Vec<Transform>,
    one: usize,
    compose: Option<Vec<Vec<usize>>>,
    faithful: bool,
}

impl ForestAlgebra {
    /// Builds an algebra from raw tables, validating only their shape.
    ///
    /// `compose[v][w]` is the element `vw`, acting as `(vw)h = v(wh)`. Passing
    /// `None` declares the listed elements a generating set. Laws are checked
    /// separately by [`ForestAlgebra::check_axioms`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        h_names: Vec<String>,
        plus: Vec<Vec<usize>>,
        zero: usize,
        v_names: Vec<String>,
        compose: Option<Vec<Vec<usize>>>,
        act: Vec<Transform>,
        one: usize,
        faithful: bool,
    ) -> Result<Self> {
        let n = h_names.len();
        let m = v_names.len();
        if n == 0 {
            return Err(Error::Structural("horizontal monoid is empty".into()));
        }
        if m == 0 {
            return Err(Error::Structural("vertical monoid is empty".into()));
        }
        square_table("plus", &plus, n, n)?;
        if zero >= n {
            return Err(Error::Structural(format!("horizontal identity {zero} out of range")));
        }
        if one >= m {
            return Err(Error::Structural(format!("vertical identity {one} out of range")));
        }
        if let Some(c) = &compose {
            square_table("compose", c, m, m)?;
        }
        if act.len() != m {
            return Err(Error::Structural(format!(
                "act has {} rows, expected {m}",
                act.len()
            )));
        }
        for (i, row) in act.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "act row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return Err(Error::Structural(format!("act row {i} entry {x} out of range")));
            }
        }
        unique_names("H", &h_names)?;
        unique_names("V", &v_names)?;
        Ok(ForestAlgebra {
            h_names,
            plus,
            zero,
            v_names,
            act,
            one,
            compose,
            faithful,
        })
    }

    /// Builds a faithful algebra whose vertical elements are given by their actions.
    ///
    /// Elements with equal actions are merged (keeping the first name) and a
    /// warning is logged. The identity transform is added if absent. When
    /// `closed` is true the list must be closed under composition and the
    /// compose table is filled in. Returns the algebra and, for every input
    /// element, its index in the merged list.
    pub fn from_transforms(
        h_names: Vec<String>,
        plus: Vec<Vec<usize>>,
        zero: usize,
        elements: Vec<(String, Transform)>,
        closed: bool,
    ) -> Result<(Self, Vec<usize>)> {
        let n = h_names.len();
        let identity: Transform = (0..n).collect();
        let mut v_names: Vec<String> = Vec::new();
        let mut act: Vec<Transform> = Vec::new();
        let mut index: HashMap<Transform, usize> = HashMap::new();
        let mut positions = Vec::with_capacity(elements.len());
        for (name, t) in elements {
            if t.len() != n || t.iter().any(|&x| x >= n) {
                return Err(Error::Structural(format!("transform `{name}` is not a map on H")));
            }
            match index.get(&t) {
                Some(&i) => {
                    if v_names[i] != name {
                        log::debug!(
                            "vertical element `{name}` acts like `{}`; merged",
                            v_names[i]
                        );
                    }
                    positions.push(i);
                }
                None => {
                    let i = act.len();
                    index.insert(t.clone(), i);
                    v_names.push(name);
                    act.push(t);
                    positions.push(i);
                }
            }
        }
        let one = match index.get(&identity) {
            Some(&i) => i,
            None => {
                let i = act.len();
                index.insert(identity.clone(), i);
                v_names.push(fresh_name("1", &v_names));
                act.push(identity);
                i
            }
        };
        let compose = if closed {
            let m = act.len();
            let mut table = vec![vec![0; m]; m];
            for v in 0..m {
                for w in 0..m {
                    let t: Transform = act[w].iter().map(|&h| act[v][h]).collect();
                    table[v][w] = *index.get(&t).ok_or_else(|| {
                        Error::Structural("element list is not closed under composition".into())
                    })?;
                }
            }
            Some(table)
        } else {
            None
        };
        let alg = ForestAlgebra::from_tables(h_names, plus, zero, v_names, compose, act, one, true)?;
        Ok((alg, positions))
    }

    /// The algebra whose vertical monoid is generated by `gens` together with
    /// the identity and all insertions `h -> g + h`.
    ///
    /// Returns the algebra and the indices of the generators.
    pub fn generated(
        h_names: Vec<String>,
        plus: Vec<Vec<usize>>,
        zero: usize,
        gens: Vec<(String, Transform)>,
    ) -> Result<(Self, Vec<usize>)> {
        let n = h_names.len();
        square_table("plus", &plus, n, n)?;
        let mut elements: Vec<(String, Transform)> = Vec::with_capacity(n + gens.len());
        elements.push(("1".to_string(), (0..n).collect()));
        for g in 0..n {
            if g != zero {
                elements.push((format!("+{}", h_names[g]), plus[g].clone()));
            }
        }
        let base = elements.len();
        elements.extend(gens);
        let (alg, pos) = ForestAlgebra::from_transforms(h_names, plus, zero, elements, false)?;
        Ok((alg, pos[base..].to_vec()))
    }

    /// The trivial algebra with one horizontal and one vertical element.
    pub fn trivial() -> Self {
        ForestAlgebra::from_transforms(
            vec!["0".into()],
            vec![vec![0]],
            0,
            vec![("1".into(), vec![0])],
            true,
        )
        .expect("trivial algebra")
        .0
    }

    pub fn h_len(&self) -> usize {
        self.h_names.len()
    }

    /// Number of listed vertical elements (all of `V` when closed).
    pub fn v_len(&self) -> usize {
        self.v_names.len()
    }

    pub fn h_name(&self, h: usize) -> &str {
        &self.h_names[h]
    }

    pub fn v_name(&self, v: usize) -> &str {
        &self.v_names[v]
    }

    pub fn h_names(&self) -> &[String] {
        &self.h_names
    }

    pub fn v_names(&self) -> &[String] {
        &self.v_names
    }

    pub fn find_h(&self, name: &str) -> Option<usize> {
        self.h_names.iter().position(|n| n == name)
    }

    pub fn find_v(&self, name: &str) -> Option<usize> {
        self.v_names.iter().position(|n| n == name)
    }

    /// Index of a listed vertical element with the given action.
    pub fn find_action(&self, t: &[usize]) -> Option<usize> {
        self.act.iter().position(|row| row.as_slice() == t)
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    /// The sum of all horizontal elements.
    pub fn infinity(&self) -> usize {
        (0..self.h_len()).fold(self.zero, |acc, h| self.plus[acc][h])
    }

    #[inline]
    pub fn plus(&self, x: usize, y: usize) -> usize {
        self.plus[x][y]
    }

    #[inline]
    pub fn act(&self, v: usize, h: usize) -> usize {
        self.act[v][h]
    }

    pub fn action(&self, v: usize) -> &[usize] {
        &self.act[v]
    }

    pub fn plus_table(&self) -> &[Vec<usize>] {
        &self.plus
    }

    pub fn compose_table(&self) -> Option<&[Vec<usize>]> {
        self.compose.as_deref()
    }

    pub fn compose(&self, v: usize, w: usize) -> Option<usize> {
        self.compose.as_ref().map(|c| c[v][w])
    }

    /// Whether the listed vertical elements form all of `V`.
    pub fn is_closed(&self) -> bool {
        self.compose.is_some()
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    /// Closes the listed vertical elements under composition.
    ///
    /// Existing element indices are preserved; new elements are appended and
    /// named `v<i>`. Already-closed algebras are returned unchanged.
    pub fn materialize(&self, cap: usize) -> Result<ForestAlgebra> {
        if self.is_closed() {
            return Ok(self.clone());
        }
        let mut elements: Vec<Transform> = self.act.clone();
        let mut index: HashMap<Transform, usize> = HashMap::new();
        for (i, t) in elements.iter().enumerate() {
            index.entry(t.clone()).or_insert(i);
        }
        let gens: Vec<usize> = (0..self.v_len()).collect();
        let mut queue: VecDeque<usize> = (0..elements.len()).collect();
        while let Some(e) = queue.pop_front() {
            for &g in &gens {
                let t: Transform = self.act[g].iter().map(|&h| elements[e][h]).collect();
                if !index.contains_key(&t) {
                    if elements.len() >= cap {
                        return Err(Error::size("vertical monoid", cap));
                    }
                    index.insert(t.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(t);
                }
            }
        }
        let mut names = self.v_names.clone();
        for i in names.len()..elements.len() {
            names.push(fresh_name(&format!("v{i}"), &names));
        }
        let m = elements.len();
        let mut table = vec![vec![0; m]; m];
        for v in 0..m {
            for w in 0..m {
                let t: Transform = elements[w].iter().map(|&h| elements[v][h]).collect();
                table[v][w] = index[&t];
            }
        }
        ForestAlgebra::from_tables(
            self.h_names.clone(),
            self.plus.clone(),
            self.zero,
            names,
            Some(table),
            elements,
            self.one,
            self.faithful,
        )
    }

    /// Checks every law; the report is empty iff the algebra is valid.
    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.h_len();
        let m = self.v_len();
        let mut violations = Vec::new();
        let mut push = |law: Law, witness: Vec<usize>| violations.push(Violation { law, witness });

        'assoc: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.plus(self.plus(x, y), z) != self.plus(x, self.plus(y, z)) {
                        push(Law::PlusAssociative, vec![x, y, z]);
                        break 'assoc;
                    }
                }
            }
        }
        if let Some(h) = (0..n).find(|&h| self.plus(self.zero, h) != h || self.plus(h, self.zero) != h) {
            push(Law::PlusIdentity, vec![self.zero, h]);
        }
        'comm: for x in 0..n {
            for y in 0..n {
                if self.plus(x, y) != self.plus(y, x) {
                    push(Law::PlusCommutative, vec![x, y]);
                    break 'comm;
                }
            }
        }
        if let Some(h) = (0..n).find(|&h| self.plus(h, h) != h) {
            push(Law::PlusIdempotent, vec![h]);
        }

        if let Some(c) = &self.compose {
            'vassoc: for u in 0..m {
                for v in 0..m {
                    for w in 0..m {
                        if c[c[u][v]][w] != c[u][c[v][w]] {
                            push(Law::ComposeAssociative, vec![u, v, w]);
                            break 'vassoc;
                        }
                    }
                }
            }
            if let Some(v) = (0..m).find(|&v| c[self.one][v] != v || c[v][self.one] != v) {
                push(Law::ComposeIdentity, vec![self.one, v]);
            }
            'compat: for v in 0..m {
                for w in 0..m {
                    for h in 0..n {
                        if self.act(c[v][w], h) != self.act(v, self.act(w, h)) {
                            push(Law::ActionCompatible, vec![v, w, h]);
                            break 'compat;
                        }
                    }
                }
            }
        }
        if let Some(h) = (0..n).find(|&h| self.act(self.one, h) != h) {
            push(Law::ActionIdentity, vec![self.one, h]);
        }
        for g in 0..n {
            if self.find_action(&self.plus[g]).is_none() {
                push(Law::InsertionClosure, vec![g]);
            }
        }
        if self.faithful {
            'faith: for v in 0..m {
                for w in v + 1..m {
                    if self.act[v] == self.act[w] {
                        push(Law::Faithful, vec![v, w]);
                        break 'faith;
                    }
                }
            }
        }
        AxiomReport { violations }
    }

    /// Pairwise sums of all element pairs, used to sanity check absorption.
    pub fn is_absorbing(&self, h: usize) -> bool {
        (0..self.h_len()).all(|x| self.plus(h, x) == h)
    }
}

/// A law of forest algebras that an algebra can violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Law {
    PlusAssociative,
    PlusIdentity,
    PlusCommutative,
    PlusIdempotent,
    ComposeAssociative,
    ComposeIdentity,
    ActionIdentity,
    ActionCompatible,
    InsertionClosure,
    Faithful,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::PlusAssociative => "(x+y)+z = x+(y+z)",
            Law::PlusIdentity => "0+h = h = h+0",
            Law::PlusCommutative => "x+y = y+x",
            Law::PlusIdempotent => "h+h = h",
            Law::ComposeAssociative => "(uv)w = u(vw)",
            Law::ComposeIdentity => "1v = v = v1",
            Law::ActionIdentity => "1h = h",
            Law::ActionCompatible => "(vw)h = v(wh)",
            Law::InsertionClosure => "insertion g+_ is in V",
            Law::Faithful => "distinct vertical elements act differently",
        };
        f.write_str(s)
    }
}

/// A violated law with the indices that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: Law,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, law: Law) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }
}

/// A homomorphism of forest algebras, given by its two component maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraMorphism {
    pub hmap: Vec<usize>,
    /// Image of every listed vertical element of the source.
    pub vmap: Vec<usize>,
}

impl AlgebraMorphism {
    /// Checks that the maps preserve `+`, identities, the action and (when
    /// both sides are closed) composition.
    pub fn verify(&self, source: &ForestAlgebra, target: &ForestAlgebra) -> Result<(), String> {
        if self.hmap.len() != source.h_len() || self.vmap.len() != source.v_len() {
            return Err("map sizes do not match the source".into());
        }
        if self.hmap[source.zero()] != target.zero() {
            return Err("0 is not preserved".into());
        }
        if self.vmap[source.one()] != target.one() {
            return Err("1 is not preserved".into());
        }
        for x in 0..source.h_len() {
            for y in 0..source.h_len() {
                if self.hmap[source.plus(x, y)] != target.plus(self.hmap[x], self.hmap[y]) {
                    return Err(format!("+ not preserved at ({x},{y})"));
                }
            }
        }
        for v in 0..source.v_len() {
            for h in 0..source.h_len() {
                if self.hmap[source.act(v, h)] != target.act(self.vmap[v], self.hmap[h]) {
                    return Err(format!("action not preserved at ({v},{h})"));
                }
            }
        }
        if let (Some(_), Some(_)) = (source.compose_table(), target.compose_table()) {
            for v in 0..source.v_len() {
                for w in 0..source.v_len() {
                    let lhs = self.vmap[source.compose(v, w).unwrap()];
                    let rhs = target.compose(self.vmap[v], self.vmap[w]).unwrap();
                    if lhs != rhs {
                        return Err(format!("composition not preserved at ({v},{w})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_surjective(&self, target: &ForestAlgebra) -> bool {
        let hs: BTreeSet<usize> = self.hmap.iter().copied().collect();
        let vs: BTreeSet<usize> = self.vmap.iter().copied().collect();
        hs.len() == target.h_len() && vs.len() == target.v_len()
    }
}

/// `U1 = ({0, inf}, {1, cinf})`: the vertical element `cinf` sends everything to `inf`.
pub fn u1() -> ForestAlgebra {
    let plus = vec![vec![0, 1], vec![1, 1]];
    ForestAlgebra::from_transforms(
        vec!["0".into(), "inf".into()],
        plus,
        0,
        vec![("1".into(), vec![0, 1]), ("cinf".into(), vec![1, 1])],
        true,
    )
    .expect("U1")
    .0
}

/// `U2 = ({0, inf}, {1, cinf, c0})`: `cinf` and `c0` are the constant maps.
pub fn u2() -> ForestAlgebra {
    let plus = vec![vec![0, 1], vec![1, 1]];
    ForestAlgebra::from_transforms(
        vec!["0".into(), "inf".into()],
        plus,
        0,
        vec![
            ("1".into(), vec![0, 1]),
            ("cinf".into(), vec![1, 1]),
            ("c0".into(), vec![0, 0]),
        ],
        true,
    )
    .expect("U2")
    .0
}

/// Vertical indices of the two constants in [`u1`] and [`u2`].
pub const U_ONE: usize = 0;
pub const U_CINF: usize = 1;
pub const U_C0: usize = 2;

/// The wreath product `left o right = (H1 x H2, V1 x V2^H1)` with action
/// `(v, f)(h1, h2) = (v h1, f(h1) h2)`, fully materialized, together with the
/// projection onto `left`.
///
/// Both factors must be closed. Fails with `SizeLimit` when
/// `|V1| * |V2|^|H1|` exceeds `cap`.
pub fn wreath(
    left: &ForestAlgebra,
    right: &ForestAlgebra,
    cap: usize,
) -> Result<(ForestAlgebra, AlgebraMorphism)> {
    let left = left.materialize(cap)?;
    let right = right.materialize(cap)?;
    let (n1, n2) = (left.h_len(), right.h_len());
    let (m1, m2) = (left.v_len(), right.v_len());
    let mut total = m1;
    for _ in 0..n1 {
        total = total
            .checked_mul(m2)
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::size("wreath product vertical monoid", cap))?;
    }
    if total > cap {
        return Err(Error::size("wreath product vertical monoid", cap));
    }
    let (h_names, plus, zero) = product_horizontal(&left, &right);
    let pair = |x: usize, y: usize| x * n2 + y;
    let funcs = total / m1;
    let decode = |mut code: usize| -> Vec<usize> {
        let mut f = vec![0; n1];
        for slot in f.iter_mut() {
            *slot = code % m2;
            code /= m2;
        }
        f
    };
    let mut v_names = Vec::with_capacity(total);
    let mut act = Vec::with_capacity(total);
    let mut vmap = Vec::with_capacity(total);
    for v in 0..m1 {
        for code in 0..funcs {
            let f = decode(code);
            let fname: Vec<&str> = f.iter().map(|&w| right.v_name(w)).collect();
            v_names.push(format!("({};{})", left.v_name(v), fname.join(",")));
            let mut row = vec![0; n1 * n2];
            for h1 in 0..n1 {
                for h2 in 0..n2 {
                    row[pair(h1, h2)] = pair(left.act(v, h1), right.act(f[h1], h2));
                }
            }
            act.push(row);
            vmap.push(v);
        }
    }
    let encode = |v: usize, f: &[usize]| -> usize {
        let mut code = 0;
        for &w in f.iter().rev() {
            code = code * m2 + w;
        }
        v * funcs + code
    };
    let mut compose = vec![vec![0; total]; total];
    for a in 0..total {
        let (v, f) = (a / funcs, decode(a % funcs));
        for b in 0..total {
            let (w, g) = (b / funcs, decode(b % funcs));
            // (v,f)(w,g) = (vw, h -> f(w h) g(h))
            let vw = left.compose(v, w).unwrap();
            let fg: Vec<usize> = (0..n1)
                .map(|h| right.compose(f[left.act(w, h)], g[h]).unwrap())
                .collect();
            compose[a][b] = encode(vw, &fg);
        }
    }
    let one = encode(left.one(), &vec![right.one(); n1]);
    let faithful = left.is_faithful() && right.is_faithful();
    let alg = ForestAlgebra::from_tables(
        standard_names(h_names, zero, &plus),
        plus,
        zero,
        v_names,
        Some(compose),
        act,
        one,
        faithful,
    )?;
    let hmap = (0..n1 * n2).map(|p| p / n2).collect();
    Ok((alg, AlgebraMorphism { hmap, vmap }))
}

/// Direct product with both projections. Both factors must materialize within `cap`.
pub fn direct_product(
    a: &ForestAlgebra,
    b: &ForestAlgebra,
    cap: usize,
) -> Result<(ForestAlgebra, AlgebraMorphism, AlgebraMorphism)> {
    let a = a.materialize(cap)?;
    let b = b.materialize(cap)?;
    let (n1, n2) = (a.h_len(), b.h_len());
    let (m1, m2) = (a.v_len(), b.v_len());
    if m1.saturating_mul(m2) > cap {
        return Err(Error::size("direct product vertical monoid", cap));
    }
    let (h_names, plus, zero) = product_horizontal(&a, &b);
    let mut v_names = Vec::with_capacity(m1 * m2);
    let mut act = Vec::with_capacity(m1 * m2);
    for v in 0..m1 {
        for w in 0..m2 {
            v_names.push(format!("({},{})", a.v_name(v), b.v_name(w)));
            let mut row = vec![0; n1 * n2];
            for h1 in 0..n1 {
                for h2 in 0..n2 {
                    row[h1 * n2 + h2] = a.act(v, h1) * n2 + b.act(w, h2);
                }
            }
            act.push(row);
        }
    }
    let mut compose = vec![vec![0; m1 * m2]; m1 * m2];
    for x in 0..m1 * m2 {
        for y in 0..m1 * m2 {
            let v = a.compose(x / m2, y / m2).unwrap();
            let w = b.compose(x % m2, y % m2).unwrap();
            compose[x][y] = v * m2 + w;
        }
    }
    let one = a.one() * m2 + b.one();
    let alg = ForestAlgebra::from_tables(
        standard_names(h_names, zero, &plus),
        plus,
        zero,
        v_names,
        Some(compose),
        act,
        one,
        a.is_faithful() && b.is_faithful(),
    )?;
    let p1 = AlgebraMorphism {
        hmap: (0..n1 * n2).map(|p| p / n2).collect(),
        vmap: (0..m1 * m2).map(|p| p / m2).collect(),
    };
    let p2 = AlgebraMorphism {
        hmap: (0..n1 * n2).map(|p| p % n2).collect(),
        vmap: (0..m1 * m2).map(|p| p % m2).collect(),
    };
    Ok((alg, p1, p2))
}

pub(crate) fn product_horizontal(
    a: &ForestAlgebra,
    b: &ForestAlgebra,
) -> (Vec<String>, Vec<Vec<usize>>, usize) {
    let (n1, n2) = (a.h_len(), b.h_len());
    let mut names = Vec::with_capacity(n1 * n2);
    for x in 0..n1 {
        for y in 0..n2 {
            names.push(format!("({},{})", a.h_name(x), b.h_name(y)));
        }
    }
    let mut plus = vec![vec![0; n1 * n2]; n1 * n2];
    for p in 0..n1 * n2 {
        for q in 0..n1 * n2 {
            plus[p][q] = a.plus(p / n2, q / n2) * n2 + b.plus(p % n2, q % n2);
        }
    }
    (names, plus, a.zero() * n2 + b.zero())
}

/// Collapses a reachability ideal to the absorbing element.
///
/// The quotient horizontal monoid is `(H - I) u {inf}`, listed in the order of
/// the surviving elements with the collapsed class in the position of the
/// original `inf`. Vertical elements with equal induced actions are merged.
pub fn quotient_by_ideal(
    alg: &ForestAlgebra,
    ideal: &[usize],
) -> Result<(ForestAlgebra, AlgebraMorphism)> {
    let n = alg.h_len();
    let mut in_ideal = vec![false; n];
    for &h in ideal {
        if h >= n {
            return Err(Error::Structural(format!("ideal element {h} out of range")));
        }
        in_ideal[h] = true;
    }
    for h in 0..n {
        if !in_ideal[h] {
            continue;
        }
        for v in 0..alg.v_len() {
            let below = alg.act(v, h);
            if !in_ideal[below] {
                return Err(Error::IdealViolation {
                    member: alg.h_name(h).to_string(),
                    below: alg.h_name(below).to_string(),
                });
            }
        }
        for g in 0..n {
            let below = alg.plus(g, h);
            if !in_ideal[below] {
                return Err(Error::IdealViolation {
                    member: alg.h_name(h).to_string(),
                    below: alg.h_name(below).to_string(),
                });
            }
        }
    }
    let inf = alg.infinity();
    if ideal.is_empty() {
        let id = AlgebraMorphism {
            hmap: (0..n).collect(),
            vmap: (0..alg.v_len()).collect(),
        };
        return Ok((alg.clone(), id));
    }
    // representative of each element, then dense renumbering
    let rep: Vec<usize> = (0..n).map(|h| if in_ideal[h] { inf } else { h }).collect();
    let survivors: Vec<usize> = (0..n).filter(|&h| rep[h] == h).collect();
    let mut new_index = vec![usize::MAX; n];
    for (i, &h) in survivors.iter().enumerate() {
        new_index[h] = i;
    }
    let hmap: Vec<usize> = (0..n).map(|h| new_index[rep[h]]).collect();
    let k = survivors.len();
    let mut plus = vec![vec![0; k]; k];
    for (i, &x) in survivors.iter().enumerate() {
        for (j, &y) in survivors.iter().enumerate() {
            plus[i][j] = hmap[alg.plus(x, y)];
        }
    }
    let names: Vec<String> = survivors.iter().map(|&h| alg.h_name(h).to_string()).collect();
    let zero = hmap[alg.zero()];
    let elements: Vec<(String, Transform)> = (0..alg.v_len())
        .map(|v| {
            let t = survivors.iter().map(|&h| hmap[alg.act(v, h)]).collect();
            (alg.v_name(v).to_string(), t)
        })
        .collect();
    let mut names = standard_names(names, zero, &plus);
    if k == 1 {
        // everything collapsed: the element stands for the ideal
        names[0] = "inf".into();
    }
    let (q, vmap) = ForestAlgebra::from_transforms(names, plus, zero, elements, alg.is_closed())?;
    Ok((q, AlgebraMorphism { hmap, vmap }))
}

/// Renames the identity to `0` and the absorbing element to `inf`.
pub(crate) fn standard_names(
    mut names: Vec<String>,
    zero: usize,
    plus: &[Vec<usize>],
) -> Vec<String> {
    let n = names.len();
    let inf = (0..n).fold(zero, |acc, h| plus[acc][h]);
    let reserved = |s: &str| s == "0" || s == "inf";
    for (i, name) in names.iter_mut().enumerate() {
        if i != zero && i != inf && reserved(name) {
            name.push('\'');
        }
    }
    names[zero] = "0".into();
    if inf != zero {
        names[inf] = "inf".into();
    }
    // collisions introduced by the renaming
    let mut seen = std::collections::HashSet::new();
    for name in names.iter_mut() {
        while !seen.insert(name.clone()) {
            name.push('\'');
        }
    }
    names
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn square_table(what: &str, table: &[Vec<usize>], rows: usize, cols: usize) -> Result<()> {
    if table.len() != rows {
        return Err(Error::Structural(format!(
            "{what} has {} rows, expected {rows}",
            table.len()
        )));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Structural(format!(
                "{what} row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if let Some(&x) = row.iter().find(|&&x| x >= cols) {
            return Err(Error::Structural(format!("{what} row {i} entry {x} out of range")));
        }
    }
    Ok(())
}

fn unique_names(what: &str, names: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if n.is_empty() || n.chars().any(char::is_whitespace) {
            return Err(Error::Structural(format!("{what} element name `{n}` is not a token")));
        }
        if !seen.insert(n) {
            return Err(Error::Structural(format!("duplicate {what} element name `{n}`")));
        }
    }
    Ok(())
}
