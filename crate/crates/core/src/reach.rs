//! Reachability preorder, its classes and the associated ideal quotients.
//!
//! `h <= h'` iff `h = v h'` for some vertical `v`. Since `V` is generated by the
//! listed elements, the preorder is the reflexive-transitive closure of the
//! one-step edges `h' -> v h'` over listed `v`.

use std::fmt::Write as _;
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::visit::Dfs;

use crate::algebra::{quotient_by_ideal, AlgebraMorphism, ForestAlgebra};
use crate::error::Result;
use crate::hom::Homomorphism;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    /// `below[h'][h]` iff `h <= h'`.
    below: Vec<Vec<bool>>,
    class_of: Vec<usize>,
    /// Classes sorted by smallest member; members sorted.
    classes: Vec<Vec<usize>>,
    min_class: usize,
}

impl Reachability {
    pub fn of(alg: &ForestAlgebra) -> Self {
        let n = alg.h_len();
        let mut g: DiGraph<usize, ()> = DiGraph::with_capacity(n, n * alg.v_len());
        let nodes: Vec<_> = (0..n).map(|h| g.add_node(h)).collect();
        for v in 0..alg.v_len() {
            for h in 0..n {
                let w = alg.act(v, h);
                if w != h {
                    g.update_edge(nodes[h], nodes[w], ());
                }
            }
        }
        let mut below = vec![vec![false; n]; n];
        for h in 0..n {
            let mut dfs = Dfs::new(&g, nodes[h]);
            while let Some(x) = dfs.next(&g) {
                below[h][g[x]] = true;
            }
        }
        let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|comp| {
                let mut c: Vec<usize> = comp.into_iter().map(|x| g[x]).collect();
                c.sort();
                c
            })
            .collect();
        classes.sort();
        let mut class_of = vec![0; n];
        for (i, c) in classes.iter().enumerate() {
            for &h in c {
                class_of[h] = i;
            }
        }
        let min_class = class_of[alg.infinity()];
        Reachability {
            below,
            class_of,
            classes,
            min_class,
        }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    /// `h <= h2`: `h` is reachable from `h2`.
    pub fn le(&self, h: usize, h2: usize) -> bool {
        self.below[h2][h]
    }

    pub fn lt(&self, h: usize, h2: usize) -> bool {
        self.le(h, h2) && !self.le(h2, h)
    }

    pub fn class_of(&self, h: usize) -> usize {
        self.class_of[h]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    /// Class order: `c <= d`.
    pub fn class_le(&self, c: usize, d: usize) -> bool {
        self.le(self.classes[c][0], self.classes[d][0])
    }

    pub fn class_lt(&self, c: usize, d: usize) -> bool {
        c != d && self.class_le(c, d)
    }

    /// The class of `inf`.
    pub fn min_class(&self) -> usize {
        self.min_class
    }

    /// Classes directly above the minimal class.
    pub fn subminimal(&self) -> Vec<usize> {
        let m = self.min_class;
        (0..self.classes.len())
            .filter(|&c| {
                self.class_lt(m, c)
                    && !(0..self.classes.len()).any(|l| self.class_lt(m, l) && self.class_lt(l, c))
            })
            .collect()
    }

    /// Covering pairs `(lower, upper)` of the class order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.classes.len();
        let mut out = Vec::new();
        for lo in 0..k {
            for hi in 0..k {
                if self.class_lt(lo, hi)
                    && !(0..k).any(|m| self.class_lt(lo, m) && self.class_lt(m, hi))
                {
                    out.push((lo, hi));
                }
            }
        }
        out
    }

    /// `h > Γ`: `h` lies strictly above the class `c`.
    pub fn above(&self, h: usize, c: usize) -> bool {
        self.class_of[h] != c && self.le(self.classes[c][0], h)
    }

    /// `I_Γ = {h : h ≯ Γ}`.
    pub fn ideal_below(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&h| !self.above(h, c)).collect()
    }

    /// `I_{≥Γ} = {h : h ≱ Γ}`.
    pub fn ideal_not_above(&self, c: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&h| !self.le(self.classes[c][0], h))
            .collect()
    }

    /// Graphviz rendering: one node per class, edges along the covering relation
    /// pointing downwards.
    pub fn to_dot(&self, alg: &ForestAlgebra) -> String {
        let mut out = String::from("digraph reachability {\n  rankdir=TB;\n");
        for (i, c) in self.classes.iter().enumerate() {
            let names: Vec<&str> = c.iter().map(|&h| alg.h_name(h)).collect();
            let _ = writeln!(out, "  c{i} [label=\"{{{}}}\"];", names.join(", "));
        }
        for (lo, hi) in self.covers() {
            let _ = writeln!(out, "  c{hi} -> c{lo};");
        }
        out.push_str("}\n");
        out
    }
}

/// Which ideal a class quotient collapses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientMode {
    /// `α_Γ`, collapsing `I_Γ`.
    Strict,
    /// `α_{≥Γ}`, collapsing `I_{≥Γ}`.
    Weak,
}

/// `α_Γ` or `α_{≥Γ}` for the class `class` of the target of `alpha`.
pub fn quotient_hom(
    alpha: &Homomorphism,
    class: usize,
    mode: QuotientMode,
) -> Result<(Homomorphism, AlgebraMorphism)> {
    let rs = Reachability::of(alpha.target());
    let ideal = match mode {
        QuotientMode::Strict => rs.ideal_below(class),
        QuotientMode::Weak => rs.ideal_not_above(class),
    };
    let (q, m) = quotient_by_ideal(alpha.target(), &ideal)?;
    let hom = alpha.then(&m, Arc::new(q))?;
    Ok((hom, m))
}

/// `[α_{≥Γ_1}, ..., α_{≥Γ_r}]` over the subminimal classes `Γ_j`.
pub fn subminimal_factorization(alpha: &Homomorphism) -> Result<Vec<Homomorphism>> {
    let rs = Reachability::of(alpha.target());
    rs.subminimal()
        .into_iter()
        .map(|c| quotient_hom(alpha, c, QuotientMode::Weak).map(|(h, _)| h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{direct_product, u1, u2, DEFAULT_V_CAP};
    use crate::fixtures::chain4_hom;
    use crate::hom::{factors_through, Alphabet};

    fn names(alg: &ForestAlgebra, hs: &[usize]) -> Vec<String> {
        hs.iter().map(|&h| alg.h_name(h).to_string()).collect()
    }

    #[test]
    fn chain4_is_linear() {
        let alpha = chain4_hom();
        let alg = alpha.target();
        let rs = Reachability::of(alg);
        assert_eq!(rs.classes().len(), 4);
        // inf < b < a < 0
        assert!(rs.lt(3, 2) && rs.lt(2, 1) && rs.lt(1, 0));
        assert_eq!(rs.class(rs.min_class()), &[3]);
        let sub = rs.subminimal();
        assert_eq!(sub.len(), 1);
        let gb = rs.class_of(2);
        assert_eq!(sub[0], gb);
        assert_eq!(names(alg, &rs.ideal_below(gb)), ["b", "inf"]);
        assert_eq!(names(alg, &rs.ideal_not_above(gb)), ["inf"]);
        assert_eq!(rs.ideal_below(rs.min_class()), vec![3]);
        assert_eq!(rs.covers().len(), 3);
    }

    #[test]
    fn u1_u2_classes() {
        let rs = Reachability::of(&u2());
        assert_eq!(rs.classes(), &[vec![0, 1]]);
        let rs = Reachability::of(&u1());
        assert_eq!(rs.classes().len(), 2);
        assert!(rs.lt(1, 0));
    }

    #[test]
    fn partial_sums_go_down() {
        let alg = chain4_hom().target().clone();
        let rs = Reachability::of(&alg);
        for x in 0..4 {
            for y in 0..4 {
                assert!(rs.le(alg.plus(x, y), x));
            }
        }
    }

    #[test]
    fn quotients() {
        let alpha = chain4_hom();
        let rs = Reachability::of(alpha.target());
        let (q, _) = quotient_hom(&alpha, rs.min_class(), QuotientMode::Strict).unwrap();
        assert_eq!(q.target().h_len(), 4);
        assert!(factors_through(&alpha, &q).unwrap().holds());
        let gb = rs.class_of(2);
        let (q, _) = quotient_hom(&alpha, gb, QuotientMode::Strict).unwrap();
        assert_eq!(q.target().h_len(), 3);
        assert!(factors_through(&q, &alpha).unwrap().holds());
        assert!(!factors_through(&alpha, &q).unwrap().holds());
    }

    #[test]
    fn subminimal_lists() {
        assert_eq!(subminimal_factorization(&chain4_hom()).unwrap().len(), 1);
        let (p, _, _) = direct_product(&u1(), &u1(), DEFAULT_V_CAP).unwrap();
        let p = Arc::new(p);
        let cinf = p.find_v("(cinf,1)").unwrap();
        let other = p.find_v("(1,cinf)").unwrap();
        let alpha = Homomorphism::new(Alphabet::from_names(&["a", "b"]).unwrap(), p, vec![cinf, other]).unwrap();
        assert!(alpha.is_onto());
        let parts = subminimal_factorization(&alpha).unwrap();
        assert_eq!(parts.len(), 2);
        for part in &parts {
            let r = Reachability::of(part.target());
            assert_eq!(r.subminimal().len(), 1);
        }
        let trivial = crate::hom::trivial_hom(Alphabet::from_names(&["a"]).unwrap());
        assert!(subminimal_factorization(&trivial).unwrap().is_empty());
    }

    #[test]
    fn dot_output() {
        let alpha = chain4_hom();
        let dot = Reachability::of(alpha.target()).to_dot(alpha.target());
        assert_eq!(dot.matches("->").count(), 3);
        let dot = Reachability::of(&ForestAlgebra::trivial()).to_dot(&ForestAlgebra::trivial());
        assert_eq!(dot.matches("label").count(), 1);
    }
}
