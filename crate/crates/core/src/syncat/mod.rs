//! Bounded syntactic category of a geometric theory: formulas-in-context up
//! to equivalence, provably functional relations as arrows, and the covering
//! condition on families of arrows.
//!
//! Two regimes decide entailments. The semantic regime checks every model up
//! to a carrier bound, so its answers mean "up to models of size n". The
//! proof regime runs the bounded geometric prover and answers `Unknown` when
//! the search gives up; it never answers `No`.

mod build;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::proof::{prove_geometric, ProofError, SearchBudget};
use crate::semantics::{
    enumerate_models_with_ceiling, satisfies_sequent, uniform_bound, Interpretation, SemanticsError,
};
use crate::syntax::{fresh_name, substitute_many, Context, Formula, Sequent, Term, Theory, Var};

pub use build::{build_syntactic_category, ArrowEntry, ClassEntry, SyntacticCategory, SyncatOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    No,
    Unknown,
    Yes,
}

impl Tri {
    pub fn and(self, other: Tri) -> Tri {
        self.min(other)
    }

    pub fn all(xs: impl IntoIterator<Item = Tri>) -> Tri {
        xs.into_iter().fold(Tri::Yes, Tri::and)
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceRegime {
    /// Every model with carriers of size at most `max_size`.
    Semantic { max_size: usize },
    /// Bounded geometric proof search.
    Proof { budget: SearchBudget },
}

impl EquivalenceRegime {
    pub fn label(&self) -> String {
        match self {
            EquivalenceRegime::Semantic { max_size } => format!("semantic (models with carriers <= {max_size})"),
            EquivalenceRegime::Proof { budget } => format!(
                "proof (depth {}, term depth {}, node limit {})",
                budget.max_depth, budget.term_depth, budget.node_limit
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum SyncatError {
    #[error("context sorts differ: {0:?} vs {1:?}")]
    SortMismatch(Vec<String>, Vec<String>),
    #[error("source and target contexts share the variable `{0}`")]
    ContextOverlap(String),
    #[error("target of the first arrow is not equivalent to the source of the second")]
    TargetSourceMismatch,
    #[error("family member {0} does not land in the given target")]
    TargetMismatch(usize),
    #[error("the theory is not geometric")]
    NonGeometric,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

/// `[φ, X]`: a formula with free variables among the context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormulaInContext {
    pub context: Context,
    pub formula: Formula,
}

impl FormulaInContext {
    pub fn new(context: Context, formula: Formula) -> Self {
        FormulaInContext { context, formula }
    }

    /// The formula with its variables renamed positionally into `ctx`.
    pub fn in_context(&self, ctx: &Context) -> Result<Formula, SyncatError> {
        if self.context.sorts() != ctx.sorts() {
            return Err(SyncatError::SortMismatch(self.context.sorts(), ctx.sorts()));
        }
        Ok(rename(&self.formula, &self.context, ctx))
    }
}

impl fmt::Display for FormulaInContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.context.vars().iter().map(|v| format!("{}:{}", v.name, v.sort)).collect();
        write!(f, "[{}] {}", vars.join(", "), self.formula)
    }
}

fn rename(phi: &Formula, from: &Context, to: &Context) -> Formula {
    let pairs: Vec<(Var, Term)> =
        from.vars().iter().zip(to.vars()).map(|(a, b)| (a.clone(), Term::Var(b.clone()))).collect();
    substitute_many(phi, &pairs)
}

/// Copy of `ctx` with names avoiding `avoid`; the new names are added to it.
fn freshen(ctx: &Context, avoid: &mut BTreeSet<String>) -> Context {
    ctx.vars()
        .iter()
        .map(|v| {
            let name = fresh_name(&v.name, avoid);
            avoid.insert(name.clone());
            Var::new(name, v.sort.clone())
        })
        .collect()
}

fn concat(a: &Context, b: &Context) -> Result<Context, SyncatError> {
    if let Some(v) = a.vars().iter().find(|v| b.contains_name(&v.name)) {
        return Err(SyncatError::ContextOverlap(v.name.clone()));
    }
    Ok(a.vars().iter().chain(b.vars()).cloned().collect())
}

fn names_of(ctxs: &[&Context]) -> BTreeSet<String> {
    ctxs.iter().flat_map(|c| c.names()).collect()
}

/// `σ(X, Y)` from `[φ, X]` to `[ψ, Y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalRelation {
    pub source: FormulaInContext,
    pub target: FormulaInContext,
    pub sigma: Formula,
}

impl FunctionalRelation {
    pub fn joint_context(&self) -> Result<Context, SyncatError> {
        concat(&self.source.context, &self.target.context)
    }
}

/// Decides entailments of one theory under one regime.
pub struct Judge<'a> {
    pub theory: &'a Theory,
    pub regime: EquivalenceRegime,
    models: Vec<Interpretation>,
}

impl<'a> Judge<'a> {
    pub fn new(theory: &'a Theory, regime: EquivalenceRegime, ceiling: u128) -> Result<Judge<'a>, SyncatError> {
        if !theory.axioms.iter().all(Sequent::is_geometric) {
            return Err(SyncatError::NonGeometric);
        }
        let models = match regime {
            EquivalenceRegime::Semantic { max_size } => {
                enumerate_models_with_ceiling(theory, &uniform_bound(&theory.signature, max_size), ceiling)?.collect()
            }
            EquivalenceRegime::Proof { .. } => Vec::new(),
        };
        Ok(Judge { theory, regime, models })
    }

    pub fn models(&self) -> &[Interpretation] {
        &self.models
    }

    pub fn entails(&self, s: &Sequent) -> Result<Tri, SyncatError> {
        Ok(match self.regime {
            EquivalenceRegime::Semantic { .. } => {
                if self.models.iter().all(|m| satisfies_sequent(m, s)) {
                    Tri::Yes
                } else {
                    Tri::No
                }
            }
            EquivalenceRegime::Proof { budget } => {
                if prove_geometric(self.theory, s, budget)?.is_proved() {
                    Tri::Yes
                } else {
                    Tri::Unknown
                }
            }
        })
    }
}

/// `φ ⊢ ψ` and `ψ ⊢ φ` in the context of `a`.
pub fn equivalent(judge: &Judge, a: &FormulaInContext, b: &FormulaInContext) -> Result<Tri, SyncatError> {
    let bf = b.in_context(&a.context)?;
    let there = judge.entails(&Sequent::new(a.context.clone(), [a.formula.clone()], [bf.clone()]))?;
    if there == Tri::No {
        return Ok(Tri::No);
    }
    let back = judge.entails(&Sequent::new(a.context.clone(), [bf], [a.formula.clone()]))?;
    Ok(there.and(back))
}

/// The three conditions: `σ ⊢ φ ∧ ψ`, `φ ⊢ ∃Y σ`, and
/// `σ(X, Y) ∧ σ(X, Y') ⊢ Y = Y'`.
pub fn is_functional(judge: &Judge, r: &FunctionalRelation) -> Result<Tri, SyncatError> {
    let (x, y) = (&r.source.context, &r.target.context);
    let xy = concat(x, y)?;
    let both = Formula::and(vec![r.source.formula.clone(), r.target.formula.clone()]);
    let c1 = judge.entails(&Sequent::new(xy.clone(), [r.sigma.clone()], [both]))?;
    if c1 == Tri::No {
        return Ok(Tri::No);
    }
    let total = Formula::exists_many(y.vars(), r.sigma.clone());
    let c2 = judge.entails(&Sequent::new(x.clone(), [r.source.formula.clone()], [total]))?;
    if c2 == Tri::No {
        return Ok(Tri::No);
    }
    let mut avoid = names_of(&[x, y]);
    let y2 = freshen(y, &mut avoid);
    let sigma2 = rename(&r.sigma, y, &y2);
    let eqs = Formula::and(
        y.vars().iter().zip(y2.vars()).map(|(a, b)| Formula::eq(Term::Var(a.clone()), Term::Var(b.clone()))).collect(),
    );
    let ctx3 = concat(&xy, &y2)?;
    let c3 = judge.entails(&Sequent::new(ctx3, [r.sigma.clone(), sigma2], [eqs]))?;
    Ok(Tri::all([c1, c2, c3]))
}

/// `φ(X') ∧ φ(X) ∧ ⋀ xᵢ = xᵢ'` from `[φ, X]` to its renamed copy `[φ, X']`.
pub fn identity(a: &FormulaInContext) -> FunctionalRelation {
    let mut avoid = a.context.names();
    a.formula.all_var_names(&mut avoid);
    let x2 = freshen(&a.context, &mut avoid);
    let phi2 = rename(&a.formula, &a.context, &x2);
    let mut parts = vec![phi2.clone(), a.formula.clone()];
    parts.extend(
        a.context.vars().iter().zip(x2.vars()).map(|(p, q)| Formula::eq(Term::Var(p.clone()), Term::Var(q.clone()))),
    );
    FunctionalRelation {
        source: a.clone(),
        target: FormulaInContext::new(x2, phi2),
        sigma: Formula::and(parts),
    }
}

/// `∃Y (σ(X, Y) ∧ τ(Y, Z))` with `τ`'s contexts renamed to fit.
pub fn compose(
    judge: &Judge,
    sigma: &FunctionalRelation,
    tau: &FunctionalRelation,
) -> Result<FunctionalRelation, SyncatError> {
    if sigma.target.context.sorts() != tau.source.context.sorts()
        || equivalent(judge, &sigma.target, &tau.source)? != Tri::Yes
    {
        return Err(SyncatError::TargetSourceMismatch);
    }
    let (x, y) = (&sigma.source.context, &sigma.target.context);
    let mut avoid = names_of(&[x, y, &tau.source.context, &tau.target.context]);
    sigma.sigma.all_var_names(&mut avoid);
    tau.sigma.all_var_names(&mut avoid);
    let z = freshen(&tau.target.context, &mut avoid);
    let from: Context = tau.source.context.vars().iter().chain(tau.target.context.vars()).cloned().collect();
    let to: Context = y.vars().iter().chain(z.vars()).cloned().collect();
    let tau2 = rename(&tau.sigma, &from, &to);
    let body = Formula::exists_many(y.vars(), Formula::and(vec![sigma.sigma.clone(), tau2]));
    Ok(FunctionalRelation {
        source: sigma.source.clone(),
        target: FormulaInContext::new(z.clone(), rename(&tau.target.formula, &tau.target.context, &z)),
        sigma: body,
    })
}

/// `ψ(Y) ⊢ ⋁ᵢ ∃Xᵢ σᵢ(Xᵢ, Y)` for a family into `[ψ, Y]`.
pub fn jt_covers(judge: &Judge, family: &[FunctionalRelation], target: &FormulaInContext) -> Result<Tri, SyncatError> {
    let y = &target.context;
    let mut disjuncts = Vec::new();
    for (i, r) in family.iter().enumerate() {
        if r.target.context.sorts() != y.sorts() || equivalent(judge, &r.target, target)? != Tri::Yes {
            return Err(SyncatError::TargetMismatch(i));
        }
        let mut avoid = y.names();
        r.sigma.all_var_names(&mut avoid);
        avoid.extend(r.source.context.names());
        avoid.extend(r.target.context.names());
        let xi = freshen(&r.source.context, &mut avoid);
        let from: Context = r.source.context.vars().iter().chain(r.target.context.vars()).cloned().collect();
        let to: Context = xi.vars().iter().chain(y.vars()).cloned().collect();
        disjuncts.push(Formula::exists_many(xi.vars(), rename(&r.sigma, &from, &to)));
    }
    judge.entails(&Sequent::new(y.clone(), [target.formula.clone()], [Formula::or(disjuncts)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::DEFAULT_CEILING;
    use crate::syntax::{parse_formula_in, parse_theory};

    fn ctx(vars: &[(&str, &str)]) -> Context {
        vars.iter().map(|(n, s)| Var::new(*n, *s)).collect()
    }

    fn fic(t: &Theory, vars: &[(&str, &str)], text: &str) -> FormulaInContext {
        let c = ctx(vars);
        let f = parse_formula_in(&t.signature, &c, text).unwrap();
        FormulaInContext::new(c, f)
    }

    fn relation(t: &Theory, x: &[(&str, &str)], y: &[(&str, &str)], phi: &str, psi: &str, sigma: &str) -> FunctionalRelation {
        let source = fic(t, x, phi);
        let target = fic(t, y, psi);
        let joint: Vec<(&str, &str)> = x.iter().chain(y).copied().collect();
        let sigma = fic(t, &joint, sigma).formula;
        FunctionalRelation { source, target, sigma }
    }

    fn semantic(t: &Theory, n: usize) -> Judge<'_> {
        Judge::new(t, EquivalenceRegime::Semantic { max_size: n }, DEFAULT_CEILING).unwrap()
    }

    fn proof(t: &Theory) -> Judge<'_> {
        Judge::new(t, EquivalenceRegime::Proof { budget: SearchBudget::default() }, DEFAULT_CEILING).unwrap()
    }

    #[test]
    fn equivalence_examples() {
        let t = parse_theory("sort X. rel R(X). rel S(X).").unwrap();
        let x = [("x", "X")];
        let a = fic(&t, &x, "R(x) & S(x)");
        let b = fic(&t, &[("y", "X")], "S(y) & R(y)");
        assert_eq!(equivalent(&semantic(&t, 2), &a, &a).unwrap(), Tri::Yes);
        assert_eq!(equivalent(&semantic(&t, 2), &a, &b).unwrap(), Tri::Yes);
        assert_eq!(equivalent(&proof(&t), &a, &b).unwrap(), Tri::Yes);
        let r = fic(&t, &x, "R(x)");
        let s = fic(&t, &x, "S(x)");
        assert_eq!(equivalent(&semantic(&t, 1), &r, &s).unwrap(), Tri::No);
        assert_eq!(equivalent(&proof(&t), &r, &s).unwrap(), Tri::Unknown);
        let empty = FormulaInContext::new(Context::new(), Formula::Top);
        assert!(matches!(equivalent(&semantic(&t, 1), &r, &empty), Err(SyncatError::SortMismatch(..))));
    }

    #[test]
    fn identity_is_functional() {
        let t = parse_theory("sort X. rel R(X).").unwrap();
        let a = fic(&t, &[("x", "X")], "R(x)");
        let id = identity(&a);
        assert_eq!(is_functional(&semantic(&t, 2), &id).unwrap(), Tri::Yes);
        assert_eq!(is_functional(&proof(&t), &id).unwrap(), Tri::Yes);
    }

    #[test]
    fn function_graph_is_functional() {
        let t = parse_theory("sort X. fun f(X):X. fun g(X):X.").unwrap();
        let x = [("x", "X")];
        let y = [("y", "X")];
        let z = [("z", "X")];
        let gf = relation(&t, &x, &y, "top", "top", "y = f(x)");
        let j = semantic(&t, 2);
        assert_eq!(is_functional(&j, &gf).unwrap(), Tri::Yes);
        assert_eq!(is_functional(&proof(&t), &gf).unwrap(), Tri::Yes);
        let gg = relation(&t, &y, &z, "top", "top", "z = g(y)");
        let comp = compose(&j, &gf, &gg).unwrap();
        assert_eq!(is_functional(&j, &comp).unwrap(), Tri::Yes);
        let direct = relation(&t, &x, &z, "top", "top", "z = g(f(x))");
        let lhs = FormulaInContext::new(comp.joint_context().unwrap(), comp.sigma.clone());
        let rhs = FormulaInContext::new(direct.joint_context().unwrap(), direct.sigma.clone());
        assert_eq!(equivalent(&j, &lhs, &rhs).unwrap(), Tri::Yes);
    }

    #[test]
    fn non_functional_relation() {
        let t = parse_theory("sort X. rel R(X,X).").unwrap();
        let r = relation(&t, &[("x", "X")], &[("y", "X")], "top", "top", "R(x,y)");
        assert_eq!(is_functional(&semantic(&t, 2), &r).unwrap(), Tri::No);
        let clash = relation(&t, &[("x", "X")], &[("x2", "X")], "top", "top", "R(x,x2)");
        let bad = FunctionalRelation { target: FormulaInContext::new(ctx(&[("x", "X")]), Formula::Top), ..clash };
        assert!(matches!(is_functional(&semantic(&t, 1), &bad), Err(SyncatError::ContextOverlap(_))));
    }

    #[test]
    fn unit_law_and_mismatch() {
        let t = parse_theory("sort X. fun f(X):X.").unwrap();
        let j = semantic(&t, 2);
        let s = relation(&t, &[("x", "X")], &[("y", "X")], "top", "top", "y = f(x)");
        let c = compose(&j, &identity(&s.source), &s).unwrap();
        let lhs = FormulaInContext::new(c.joint_context().unwrap(), c.sigma.clone());
        let rhs = FormulaInContext::new(s.joint_context().unwrap(), s.sigma.clone());
        assert_eq!(equivalent(&j, &lhs, &rhs).unwrap(), Tri::Yes);
        let t2 = parse_theory("sort X. rel R(X).").unwrap();
        let j2 = semantic(&t2, 1);
        let a = relation(&t2, &[("x", "X")], &[("y", "X")], "top", "R(y)", "R(y) & x = y");
        let b = relation(&t2, &[("u", "X")], &[("v", "X")], "top", "top", "u = v");
        assert!(matches!(compose(&j2, &a, &b), Err(SyncatError::TargetSourceMismatch)));
    }

    #[test]
    fn covering_families() {
        let t = parse_theory("sort X. rel R(X). rel S(X).").unwrap();
        let j = semantic(&t, 2);
        let x = [("x", "X")];
        let y = [("y", "X")];
        let target = fic(&t, &y, "R(y) | S(y)");
        let i1 = relation(&t, &x, &y, "R(x)", "R(y) | S(y)", "R(x) & x = y");
        let i2 = relation(&t, &x, &y, "S(x)", "R(y) | S(y)", "S(x) & x = y");
        assert_eq!(jt_covers(&j, &[i1.clone(), i2], &target).unwrap(), Tri::Yes);
        assert_eq!(jt_covers(&j, &[i1], &target).unwrap(), Tri::No);
        let bot = fic(&t, &y, "bot");
        assert_eq!(jt_covers(&j, &[], &bot).unwrap(), Tri::Yes);
        let id = identity(&target);
        assert_eq!(jt_covers(&j, &[id.clone()], &id.target).unwrap(), Tri::Yes);
        let wrong = fic(&t, &y, "R(y)");
        assert!(matches!(jt_covers(&j, &[id], &wrong), Err(SyncatError::TargetMismatch(0))));
    }
}
