//! Saturation and explicit least-model construction for constrained Horn
//! clauses over linear arithmetic.
//!
//! A problem is a set of clauses `Λ ∥ C` where `Λ` is a conjunction of
//! linear constraints over the reals, rationals or integers and `C` is a
//! function-free Horn clause. [`saturation::saturate`] closes the set under
//! ordered resolution; [`model::construct_model`] then computes, for every
//! predicate, a quantifier-free formula describing its extension in the
//! least model. [`eval`] checks clauses against such a model and explains
//! why an unsaturated set is not yet modeled, and [`oracle`] recomputes
//! least models by brute force on integer windows for cross-checking.

pub mod clause;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod la;
pub mod model;
pub mod oracle;
pub mod order;
pub mod saturation;
pub mod subst;
pub mod term;

pub use clause::{ClauseId, ConstrainedClause, FoAtom, GroundAtom, GroundLiteral, Literal, Provenance, Signature, Symbol};
pub use error::{Error, ParseError, Result};
pub use la::Formula;
pub use order::PrecedenceOrder;
pub use subst::Substitution;
pub use term::{rat, ratio, Assignment, LaAtom, LinTerm, Rational, Rel, Theory, Var};
