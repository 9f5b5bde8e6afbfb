//! Exact Haar-measure bookkeeping for locally compact abelian groups without
//! real summands.
//!
//! Groups are formal direct sums of catalog atoms ([`lca::Atom`]). Haar
//! measures are tracked as coordinates relative to a canonical root measure,
//! so every scaling factor is an exact [`scalar::PositiveReal`]: a positive
//! rational times a monomial in named symbols. On vector-free groups the
//! symbolic part always cancels, and the modules here make that checkable:
//! module of automorphisms, defects of exact sequences, the determinant-functor
//! axioms, holonomy around diagrams, K_1 / K_0 classes, and the connected
//! components of a truncated Gillet-Grayson complex.
//!
//! The crate is `no_std` with `alloc`; parsing, JSON and the command line
//! live in the `haarcalc` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod arith;
pub mod diagram;
pub mod error;
pub mod gg;
pub mod haar;
pub mod ktheory;
pub mod lca;
pub mod linalg;
pub mod morphism;
pub mod scalar;
pub mod sequence;
pub mod torsor;

pub use error::{Error, Result};
pub use lca::{Atom, ChoiceParam, CompactOpenChoice, GroupExpr};
pub use morphism::{Block, Morphism, Payload};
pub use scalar::{PositiveReal, PrimeExponentVector};
pub use sequence::{ExactSequence, SequenceKind};
