#![no_std]

extern crate alloc;

pub mod diffpoly;
pub mod error;
pub mod evaluation;
pub mod formality;
pub mod graph_complex;
pub mod linalg;
pub mod perm;
pub mod rational;
pub mod superfunction;
pub mod trivialize;

pub use diffpoly::{DiffPoly, Monomial, RingSpec, Var};
pub use error::{Error, ParseError, Result};
pub use linalg::{ColumnEchelon, SparseMatQ, SparseVecQ};
pub use rational::Rational;
pub use superfunction::{nambu_p, p_without_rho, OddSet, Superfunction};
pub use formality::{FormalityGraph, GraphEncoding, VertexRole};
