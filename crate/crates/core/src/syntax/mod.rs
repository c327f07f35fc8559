//! Multisorted first-order syntax: signatures, terms, formulas, sequents and
//! theories, together with the text format used for theory files.
//!
//! Formulas cover the geometric fragment (`top`, `bot`, `=`, relations, `&`,
//! `|`, `exists`) plus the classical connectives (`not`, `->`, `forall`).
//! Conjunction and disjunction are n-ary: `And([])` is truth and `Or([])` is
//! falsity.

mod lexer;
mod parser;
mod printer;
mod sort;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::{parse_formula_in, parse_sequent, parse_term_in, parse_theory};
pub use printer::print_theory;
pub use sort::{check_formula, check_sequent, sort_of};
pub use subst::{fresh_name, replace_term, substitute, substitute_many, substitute_unchecked};

/// Line/column of a token in the source text, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("sort mismatch in `{what}`: expected {expected}, found {found}")]
    SortMismatch { what: String, expected: String, found: String },
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("variable `{0}` occurs free but is not in the context")]
    NotInContext(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: sort error in `{subject}`: {error}")]
    Sort { pos: Pos, subject: String, error: SortError },
    #[error("{pos}: duplicate name `{name}`")]
    DuplicateName { pos: Pos, name: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Sort { pos, .. }
            | ParseError::DuplicateName { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("axiom {index} is not geometric but the theory is declared geometric")]
    NonGeometricAxiom { index: usize },
    #[error("axiom {index}: {error}")]
    IllFormedAxiom { index: usize, error: SortError },
    #[error("signature: {0}")]
    Signature(String),
}

/// Sort and symbol declarations of a language.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub sorts: BTreeSet<String>,
    /// name → (argument sorts, result sort)
    pub functions: BTreeMap<String, (Vec<String>, String)>,
    /// name → argument sorts
    pub relations: BTreeMap<String, Vec<String>>,
    /// name → sort
    pub constants: BTreeMap<String, String>,
}

impl Signature {
    pub fn is_empty(&self) -> bool {
        self.sorts.is_empty()
            && self.functions.is_empty()
            && self.relations.is_empty()
            && self.constants.is_empty()
    }

    /// True if `name` is already used by a function, relation or constant.
    pub fn has_symbol(&self, name: &str) -> bool {
        self.functions.contains_key(name)
            || self.relations.contains_key(name)
            || self.constants.contains_key(name)
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        let known = |s: &String| self.sorts.contains(s);
        for (f, (args, res)) in &self.functions {
            if !args.iter().all(known) || !known(res) {
                return Err(TheoryError::Signature(format!("function `{f}` uses an undeclared sort")));
            }
        }
        for (r, args) in &self.relations {
            if !args.iter().all(known) {
                return Err(TheoryError::Signature(format!("relation `{r}` uses an undeclared sort")));
            }
            if self.functions.contains_key(r) {
                return Err(TheoryError::Signature(format!("`{r}` is both a function and a relation")));
            }
        }
        for (c, s) in &self.constants {
            if !known(s) {
                return Err(TheoryError::Signature(format!("constant `{c}` has undeclared sort `{s}`")));
            }
            if self.functions.contains_key(c) || self.relations.contains_key(c) {
                return Err(TheoryError::Signature(format!("`{c}` is declared twice")));
            }
        }
        Ok(())
    }
}

/// A sorted variable. Variables are identified by name within a context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub sort: String,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Var { name: name.into(), sort: sort.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const { name: String, sort: String },
    App { fun: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Term::Var(Var::new(name, sort))
    }

    pub fn constant(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Term::Const { name: name.into(), sort: sort.into() }
    }

    pub fn app(fun: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App { fun: fun.into(), args }
    }

    /// Nesting depth of function applications; variables and constants are 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::App { args, .. } => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const { .. } => {}
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains(&self, sub: &Term) -> bool {
        self == sub
            || match self {
                Term::App { args, .. } => args.iter().any(|a| a.contains(sub)),
                _ => false,
            }
    }
}

/// An ordered list of distinct sorted variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context(Vec<Var>);

impl Context {
    pub fn new() -> Self {
        Context(Vec::new())
    }

    /// Builds a context, rejecting repeated names.
    pub fn from_vars(vars: Vec<Var>) -> Result<Self, String> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.name.as_str()) {
                return Err(v.name.clone());
            }
        }
        Ok(Context(vars))
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Var> {
        self.0.iter().find(|v| v.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v.name == name)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.0.iter().map(|v| v.name.clone()).collect()
    }

    pub fn sorts(&self) -> Vec<String> {
        self.0.iter().map(|v| v.sort.clone()).collect()
    }

    /// Appends a variable. Panics if the name is already present.
    pub fn push(&mut self, v: Var) {
        assert!(!self.contains_name(&v.name), "duplicate context variable {}", v.name);
        self.0.push(v);
    }

    pub fn extended(&self, v: Var) -> Context {
        let mut c = self.clone();
        c.push(v);
        c
    }

    pub fn concat(&self, other: &Context) -> Result<Context, String> {
        let mut vars = self.0.clone();
        vars.extend(other.0.iter().cloned());
        Context::from_vars(vars)
    }
}

impl FromIterator<Var> for Context {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        Context::from_vars(iter.into_iter().collect()).expect("duplicate context variable")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Rel(name.into(), args)
    }

    /// Binary-or-more conjunction; the empty list collapses to `Top` and a
    /// singleton to its only member.
    pub fn and(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::Top,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    pub fn or(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::Bottom,
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    pub fn exists(v: Var, body: Formula) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    /// Nested existentials, outermost first.
    pub fn exists_many(vars: &[Var], body: Formula) -> Self {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall(v: Var, body: Formula) -> Self {
        Formula::Forall(v, Box::new(body))
    }

    pub fn not(body: Formula) -> Self {
        Formula::Not(Box::new(body))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Top | Formula::Bottom | Formula::Eq(..) | Formula::Rel(..))
    }

    /// True iff the formula uses no `not`, `->` or `forall`.
    pub fn is_geometric(&self) -> bool {
        match self {
            Formula::Top | Formula::Bottom | Formula::Eq(..) | Formula::Rel(..) => true,
            Formula::And(ps) | Formula::Or(ps) => ps.iter().all(Formula::is_geometric),
            Formula::Exists(_, b) => b.is_geometric(),
            Formula::Not(_) | Formula::Implies(..) | Formula::Forall(..) => false,
        }
    }

    /// Connective nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Eq(..) | Formula::Rel(..) => 0,
            Formula::And(ps) | Formula::Or(ps) => 1 + ps.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::Not(b) => 1 + b.depth(),
            Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn free_var_names(&self) -> BTreeSet<String> {
        self.free_vars().into_iter().map(|v| v.name).collect()
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<Var>| {
            for v in t.vars() {
                if !bound.contains(&v.name) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Eq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| term(a, bound, out)),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.collect_free(bound, out)),
            Formula::Not(b) => b.collect_free(bound, out),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                bound.push(v.name.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_var_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Eq(a, b) => {
                out.extend(a.vars().into_iter().map(|v| v.name));
                out.extend(b.vars().into_iter().map(|v| v.name));
            }
            Formula::Rel(_, args) => {
                for a in args {
                    out.extend(a.vars().into_iter().map(|v| v.name));
                }
            }
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.all_var_names(out)),
            Formula::Not(b) => b.all_var_names(out),
            Formula::Implies(a, b) => {
                a.all_var_names(out);
                b.all_var_names(out);
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                out.insert(v.name.clone());
                b.all_var_names(out);
            }
        }
    }
}

/// `context : antecedent ⊢ succedent`, with both sides stored as sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub context: Context,
    pub antecedent: BTreeSet<Formula>,
    pub succedent: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(
        context: Context,
        antecedent: impl IntoIterator<Item = Formula>,
        succedent: impl IntoIterator<Item = Formula>,
    ) -> Self {
        Sequent {
            context,
            antecedent: antecedent.into_iter().collect(),
            succedent: succedent.into_iter().collect(),
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(self.succedent.iter())
    }

    pub fn is_geometric(&self) -> bool {
        self.formulas().all(Formula::is_geometric)
    }

    /// Conjunction of the antecedent (`Top` when empty).
    pub fn antecedent_formula(&self) -> Formula {
        Formula::and(self.antecedent.iter().cloned().collect())
    }

    /// Disjunction of the succedent (`Bottom` when empty).
    pub fn succedent_formula(&self) -> Formula {
        Formula::or(self.succedent.iter().cloned().collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Geometric,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Sequent>,
    pub flavor: Flavor,
}

impl Theory {
    /// Checks the signature, every axiom, and the flavor restriction.
    pub fn new(signature: Signature, axioms: Vec<Sequent>, flavor: Flavor) -> Result<Self, TheoryError> {
        signature.validate()?;
        for (index, ax) in axioms.iter().enumerate() {
            check_sequent(&signature, ax).map_err(|error| TheoryError::IllFormedAxiom { index, error })?;
            if flavor == Flavor::Geometric && !ax.is_geometric() {
                return Err(TheoryError::NonGeometricAxiom { index });
            }
        }
        Ok(Theory { signature, axioms, flavor })
    }

    /// Geometric when every axiom is, classical otherwise.
    pub fn infer_flavor(axioms: &[Sequent]) -> Flavor {
        if axioms.iter().all(Sequent::is_geometric) {
            Flavor::Geometric
        } else {
            Flavor::Classical
        }
    }

    /// The same axioms read in the classical language.
    pub fn classical(&self) -> Theory {
        Theory { flavor: Flavor::Classical, ..self.clone() }
    }

    /// One-line summary, e.g. `1 sort, 1 relation, 1 axiom`.
    pub fn summary(&self) -> String {
        fn n(k: usize, word: &str) -> String {
            if k == 1 {
                format!("{k} {word}")
            } else {
                format!("{k} {word}s")
            }
        }
        let s = &self.signature;
        let mut parts = vec![n(s.sorts.len(), "sort")];
        if !s.functions.is_empty() {
            parts.push(n(s.functions.len(), "function"));
        }
        if !s.relations.is_empty() {
            parts.push(n(s.relations.len(), "relation"));
        }
        if !s.constants.is_empty() {
            parts.push(n(s.constants.len(), "constant"));
        }
        parts.push(n(self.axioms.len(), "axiom"));
        parts.join(", ")
    }
}
