//! Bounded proof search in a cut-free sequent calculus with theory axioms,
//! and an independent checker for the trees it produces.
//!
//! Geometric mode uses identity, `⊤R`, `⊥L`, `∧L/R`, `∨L/R`, `∃L/R`,
//! reflexivity, equality rewriting on either side, and the axiom rule.
//! Classical mode adds `¬L/R`, `→L/R` and `∀L/R`.
//!
//! The axiom rule instantiates an axiom `Γ₀ ⊢ Δ₀` of the theory with a
//! substitution `σ` over the current context. Its premises are
//! `Γ ⊢ Δ, φ` for every `φ ∈ Γ₀σ` not already in `Γ` (and not `⊤`), followed
//! by `Γ, ψ ⊢ Δ` for every `ψ ∈ Δ₀σ`. When `Γ₀σ ⊆ Γ` and `Δ₀σ ⊆ Δ` this is an
//! axiom leaf up to identity closures.

mod barr;
mod check;
mod json;
mod search;
mod universe;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Sequent, SortError, Term, Var};

pub use barr::{barr_check, BarrReport};
pub use check::{check_proof, check_proof_in, CheckFailure};
pub use json::{proof_from_json, proof_to_json, ProofJsonError};
pub use search::{prove, prove_classical, prove_geometric};
pub use universe::term_universe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Id,
    TopR,
    BotL,
    EqRefl,
    AndL,
    AndR,
    OrL,
    OrR,
    ExistsL,
    ExistsR,
    EqLeft,
    EqRight,
    Axiom,
    NotL,
    NotR,
    ImpL,
    ImpR,
    ForallL,
    ForallR,
}

impl Rule {
    pub const ALL: [Rule; 19] = [
        Rule::Id,
        Rule::TopR,
        Rule::BotL,
        Rule::EqRefl,
        Rule::AndL,
        Rule::AndR,
        Rule::OrL,
        Rule::OrR,
        Rule::ExistsL,
        Rule::ExistsR,
        Rule::EqLeft,
        Rule::EqRight,
        Rule::Axiom,
        Rule::NotL,
        Rule::NotR,
        Rule::ImpL,
        Rule::ImpR,
        Rule::ForallL,
        Rule::ForallR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Id => "id",
            Rule::TopR => "top_r",
            Rule::BotL => "bot_l",
            Rule::EqRefl => "eq_refl",
            Rule::AndL => "and_l",
            Rule::AndR => "and_r",
            Rule::OrL => "or_l",
            Rule::OrR => "or_r",
            Rule::ExistsL => "exists_l",
            Rule::ExistsR => "exists_r",
            Rule::EqLeft => "eq_left",
            Rule::EqRight => "eq_right",
            Rule::Axiom => "axiom",
            Rule::NotL => "not_l",
            Rule::NotR => "not_r",
            Rule::ImpL => "imp_l",
            Rule::ImpR => "imp_r",
            Rule::ForallL => "forall_l",
            Rule::ForallR => "forall_r",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Rules only available in classical mode.
    pub fn is_classical(self) -> bool {
        matches!(self, Rule::NotL | Rule::NotR | Rule::ImpL | Rule::ImpR | Rule::ForallL | Rule::ForallR)
    }
}

/// Instantiation data recorded at a proof node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Inst {
    /// Principal formula (the rewritten atom for equality rules).
    pub principal: Option<Formula>,
    /// Witness term for `∃R` / `∀L`.
    pub witness: Option<Term>,
    /// Fresh variable for `∃L` / `∀R`.
    pub eigenvariable: Option<Var>,
    /// Axiom index for the axiom rule.
    pub axiom: Option<usize>,
    /// Terms for the axiom's context variables, in context order.
    pub substitution: Vec<Term>,
    /// The equation `s = t` used by equality rewriting.
    pub equation: Option<Formula>,
    /// Rewrite `t` to `s` instead of `s` to `t`.
    pub reverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofTree {
    pub sequent: Sequent,
    pub rule: Rule,
    pub inst: Inst,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    /// Height counting nodes; a single leaf has height 1.
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn rules_used(&self) -> std::collections::BTreeSet<Rule> {
        let mut out = std::collections::BTreeSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.insert(t.rule);
            stack.extend(t.premises.iter());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub term_depth: usize,
    pub node_limit: usize,
}

impl SearchBudget {
    pub fn new(max_depth: usize, term_depth: usize, node_limit: usize) -> Result<Self, ProofError> {
        if max_depth == 0 || node_limit == 0 {
            return Err(ProofError::InvalidBudget(format!(
                "proof depth and node limit must be positive (got {max_depth}, {node_limit})"
            )));
        }
        Ok(SearchBudget { max_depth, term_depth, node_limit })
    }

    pub fn with_depth(self, max_depth: usize) -> Self {
        SearchBudget { max_depth, ..self }
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &SearchBudget) -> bool {
        self.max_depth <= other.max_depth
            && self.term_depth <= other.term_depth
            && self.node_limit <= other.node_limit
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_depth: 8, term_depth: 1, node_limit: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Nodes expanded over all deepening rounds.
    pub nodes: usize,
    /// Deepest round that finished without hitting the node limit.
    pub depth_completed: usize,
    pub hit_node_limit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofResult {
    Proved(ProofTree),
    ExhaustedBudget(SearchStats),
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofResult::Proved(_))
    }

    pub fn tree(&self) -> Option<&ProofTree> {
        match self {
            ProofResult::Proved(t) => Some(t),
            ProofResult::ExhaustedBudget(_) => None,
        }
    }

    /// Short tag used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            ProofResult::Proved(_) => "proved",
            ProofResult::ExhaustedBudget(_) => "exhausted_budget",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ProofResult::Proved(t) => serde_json::json!({
                "status": "proved",
                "height": t.height(),
                "size": t.size(),
                "proof": proof_to_json(t),
            }),
            ProofResult::ExhaustedBudget(stats) => serde_json::json!({
                "status": "exhausted_budget",
                "stats": stats,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Geometric,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("ill-formed sequent: {0}")]
    IllFormedSequent(SortError),
    #[error("geometric search needs geometric input: {0}")]
    NonGeometricInput(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
}
