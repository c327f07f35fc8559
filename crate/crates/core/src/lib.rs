//! Finite-scale workbench for geometric first-order logic and the finite
//! combinatorics around coherent topoi.
//!
//! * [`syntax`]: multisorted languages, the theory file format, substitution.
//! * [`proof`]: bounded sequent-calculus search (geometric and classical)
//!   with an independent proof checker.
//! * [`semantics`]: finite set-models, satisfaction, model enumeration and
//!   the provability/countermodel probe.
//! * [`category`]: finite categories, sieves, Grothendieck topologies,
//!   presheaves and closed subpresheaves.
//! * [`site`]: string sites over a finite site, their induced topology and
//!   the covering-lifting check.
//! * [`frame`]: finite frames, Heyting operations, double-negation Boolean
//!   algebras, open sublocales and finite Stone duality.
//! * [`syncat`]: bounded syntactic categories of geometric theories.
//! * [`cli`]: the command-line front end.

pub mod category;
pub mod cli;
pub mod frame;
pub mod proof;
pub mod semantics;
pub mod site;
pub mod syncat;
pub mod syntax;
