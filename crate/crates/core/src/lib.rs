//! Core library for ontology-mediated query (OMQ) analysis and rewriting.
//!
//! The crate is organized around a small family of logical objects —
//! concepts, TBoxes, ABoxes, (unions of) conjunctive queries, and OMQs —
//! together with:
//!
//! * graph-theoretic query analysis (cycles, connectivity, contractions,
//!   homomorphisms, cores),
//! * a tableau reasoner for ABox consistency up to `ALCHIF^u`, plus
//!   bounded countermodel search and exact certain-answer procedures where
//!   they exist,
//! * the constructive rewritings of unions of conjunctive queries into
//!   instance queries (with and without inverse roles, with TBox extension,
//!   and for functional roles),
//! * decision procedures for instance-query rewritability,
//! * MMSNP sentence evaluation and desk-scale CSP-definability checking,
//! * an enumeration/verification harness that checks rewritings for answer
//!   equivalence over all small ABoxes.

pub mod canon;
pub mod decide;
pub mod harness;
pub mod mmsnp;
pub mod query;
pub mod reasoner;
pub mod report;
pub mod rewrite;
pub mod syntax;

pub use syntax::{
    ABox, Concept, Dialect, Iq, Omq, Query, QueryAtom, RoleExpr, Signature, TBox, Cq, Ucq,
};
