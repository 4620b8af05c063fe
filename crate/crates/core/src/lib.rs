//! Exact computation engine for localization of pointed coalgebras
//! presented over quivers.
//!
//! The crate computes Ext-quivers, Loewy series and predecessor
//! geometry for path-spanned coalgebras, evaluates the localization
//! functors attached to a vertex subset (quotient, section and
//! colocalizing) on simples, injectives and their subquotients, and
//! decides stability and semicentrality of the associated idempotent.
//! Every combinatorial shortcut is cross-validated against a
//! brute-force linear-algebra oracle over exact rationals.

pub mod cli;
pub mod coalgebra;
pub mod comodule;
pub mod error;
pub mod extquiver;
pub mod localization;
pub mod oracle;
pub mod problem;
pub mod properties;
pub mod quiver;
