//! Finite forest algebras and decision procedures for the temporal logics
//! EF, EX and EF+EX over unranked forests.
//!
//! The crate is organised bottom-up: [`algebra`] holds explicit tables,
//! [`terms`] the free algebra of forests and contexts, [`hom`] homomorphisms
//! and the closures everything else is built on. [`reach`], [`defk`] and
//! [`decide`] implement the structure theory and the deciders, [`decompose`]
//! the wreath product decompositions, and [`oracle`] independent brute-force
//! versions used to validate them.

pub mod algebra;
pub mod decide;
pub mod decompose;
pub mod defk;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod hom;
pub mod logic;
pub mod oracle;
pub mod random;
pub mod reach;
pub mod terms;

pub use decompose::{Cascade, Stage, StageKind};
pub use algebra::{u1, u2, AlgebraMorphism, ForestAlgebra, Law, Transform};
pub use error::{Error, Result};
pub use format::AlgebraFile;
pub use reach::{QuotientMode, Reachability};
pub use hom::{Alphabet, Evaluator, Factoring, Homomorphism, Recognizer};
pub use logic::{models, parse_formula, to_recognizer, Formula};
pub use terms::{parse_context, parse_forest, Context, Forest, Label, Tree};
