use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::universe::{available, match_formula, term_universe};
use super::{Inst, Mode, ProofError, ProofResult, ProofTree, Rule, SearchBudget, SearchStats};
use crate::syntax::{
    check_sequent, fresh_name, replace_term, sort_of, substitute_many, substitute_unchecked, Context, Flavor,
    Formula, Sequent, Term, Theory, Var,
};

pub fn prove_geometric(t: &Theory, s: &Sequent, b: SearchBudget) -> Result<ProofResult, ProofError> {
    prove(t, s, b, Mode::Geometric)
}

pub fn prove_classical(t: &Theory, s: &Sequent, b: SearchBudget) -> Result<ProofResult, ProofError> {
    prove(t, s, b, Mode::Classical)
}

/// Iterative deepening on proof height, from 1 up to `b.max_depth`.
pub fn prove(t: &Theory, s: &Sequent, b: SearchBudget, mode: Mode) -> Result<ProofResult, ProofError> {
    SearchBudget::new(b.max_depth, b.term_depth, b.node_limit)?;
    check_sequent(&t.signature, s).map_err(ProofError::IllFormedSequent)?;
    if mode == Mode::Geometric {
        if t.flavor != Flavor::Geometric {
            return Err(ProofError::NonGeometricInput("the theory has non-geometric axioms".into()));
        }
        if !s.is_geometric() {
            return Err(ProofError::NonGeometricInput(format!("sequent {s}")));
        }
    }
    let mut searcher = Searcher {
        theory: t,
        mode,
        budget: b,
        nodes: 0,
        aborted: false,
        failed: HashMap::new(),
        universes: HashMap::new(),
    };
    let mut stats = SearchStats::default();
    for d in 1..=b.max_depth {
        if let Some(tree) = searcher.search(s, d) {
            return Ok(ProofResult::Proved(tree));
        }
        if searcher.aborted {
            stats.hit_node_limit = true;
            break;
        }
        stats.depth_completed = d;
    }
    stats.nodes = searcher.nodes;
    Ok(ProofResult::ExhaustedBudget(stats))
}

struct Step {
    rule: Rule,
    inst: Inst,
    premises: Vec<Sequent>,
}

type Universe = BTreeMap<String, Vec<Term>>;

struct Searcher<'a> {
    theory: &'a Theory,
    mode: Mode,
    budget: SearchBudget,
    nodes: usize,
    aborted: bool,
    // sequent -> largest height bound at which it is known to fail
    failed: HashMap<Sequent, usize>,
    universes: HashMap<Context, Universe>,
}

fn without(set: &BTreeSet<Formula>, phi: &Formula) -> BTreeSet<Formula> {
    let mut out = set.clone();
    out.remove(phi);
    out
}

fn with(set: &BTreeSet<Formula>, phi: Formula) -> BTreeSet<Formula> {
    let mut out = set.clone();
    out.insert(phi);
    out
}

fn seq(ctx: &Context, gamma: BTreeSet<Formula>, delta: BTreeSet<Formula>) -> Sequent {
    Sequent { context: ctx.clone(), antecedent: gamma, succedent: delta }
}

fn principal(phi: &Formula) -> Inst {
    Inst { principal: Some(phi.clone()), ..Inst::default() }
}

/// Name for an eigenvariable replacing the bound `v`: `v` itself when the
/// context does not use it.
fn eigenvariable(ctx: &Context, v: &Var) -> Var {
    let names = ctx.names();
    let name = if names.contains(&v.name) { fresh_name(&v.name, &names) } else { v.name.clone() };
    Var::new(name, v.sort.clone())
}

impl<'a> Searcher<'a> {
    fn universe(&mut self, ctx: &Context) -> Universe {
        if let Some(u) = self.universes.get(ctx) {
            return u.clone();
        }
        let u = term_universe(&self.theory.signature, ctx, self.budget.term_depth);
        self.universes.insert(ctx.clone(), u.clone());
        u
    }

    fn search(&mut self, s: &Sequent, d: usize) -> Option<ProofTree> {
        if d == 0 {
            return None;
        }
        if self.failed.get(s).is_some_and(|&f| f >= d) {
            return None;
        }
        if self.nodes >= self.budget.node_limit {
            self.aborted = true;
            return None;
        }
        self.nodes += 1;
        let u = self.universe(&s.context);
        let found = self.search_node(s, d, &u);
        if found.is_none() && !self.aborted {
            let e = self.failed.entry(s.clone()).or_insert(0);
            *e = (*e).max(d);
        }
        found
    }

    fn search_node(&mut self, s: &Sequent, d: usize, u: &Universe) -> Option<ProofTree> {
        if let Some(leaf) = self.leaf(s) {
            return Some(leaf);
        }
        let (closers, backward, forward) = self.axiom_steps(s, u);
        for step in closers {
            if let Some(t) = self.expand(s, step, d) {
                return Some(t);
            }
        }
        if let Some(step) = self.invertible(s) {
            // invertible rules are applied without backtracking
            return self.expand(s, step, d);
        }
        if d == 1 {
            return None;
        }
        for step in backward {
            if let Some(t) = self.expand(s, step, d) {
                return Some(t);
            }
            if self.aborted {
                return None;
            }
        }
        for step in self.exists_right(s, u) {
            if let Some(t) = self.expand(s, step, d) {
                return Some(t);
            }
            if self.aborted {
                return None;
            }
        }
        for step in forward {
            if let Some(t) = self.expand(s, step, d) {
                return Some(t);
            }
            if self.aborted {
                return None;
            }
        }
        let rest = if self.mode == Mode::Classical { self.forall_left(s, u) } else { Vec::new() };
        for step in rest.into_iter().chain(self.rewrites(s)) {
            if let Some(t) = self.expand(s, step, d) {
                return Some(t);
            }
            if self.aborted {
                return None;
            }
        }
        None
    }

    fn expand(&mut self, s: &Sequent, step: Step, d: usize) -> Option<ProofTree> {
        let mut premises = Vec::with_capacity(step.premises.len());
        for p in &step.premises {
            premises.push(self.search(p, d - 1)?);
        }
        Some(ProofTree { sequent: s.clone(), rule: step.rule, inst: step.inst, premises })
    }

    fn leaf(&self, s: &Sequent) -> Option<ProofTree> {
        let node = |rule, phi: &Formula| ProofTree {
            sequent: s.clone(),
            rule,
            inst: principal(phi),
            premises: Vec::new(),
        };
        if s.antecedent.contains(&Formula::Bottom) {
            return Some(node(Rule::BotL, &Formula::Bottom));
        }
        if s.succedent.contains(&Formula::Top) {
            return Some(node(Rule::TopR, &Formula::Top));
        }
        if let Some(phi) = s.antecedent.iter().find(|p| s.succedent.contains(*p)) {
            return Some(node(Rule::Id, phi));
        }
        if let Some(phi) = s.succedent.iter().find(|p| matches!(p, Formula::Eq(a, b) if a == b)) {
            return Some(node(Rule::EqRefl, phi));
        }
        None
    }

    fn invertible(&self, s: &Sequent) -> Option<Step> {
        let ctx = &s.context;
        let (gamma, delta) = (&s.antecedent, &s.succedent);
        let classical = self.mode == Mode::Classical;
        for phi in gamma {
            let rest = without(gamma, phi);
            let premises = match phi {
                Formula::And(ps) => {
                    let mut g = rest;
                    g.extend(ps.iter().cloned());
                    vec![seq(ctx, g, delta.clone())]
                }
                Formula::Or(ps) => ps.iter().map(|p| seq(ctx, with(&rest, p.clone()), delta.clone())).collect(),
                Formula::Exists(v, body) => {
                    let z = eigenvariable(ctx, v);
                    let inst = substitute_unchecked(body, v, &Term::Var(z.clone()));
                    let step = Step {
                        rule: Rule::ExistsL,
                        inst: Inst { principal: Some(phi.clone()), eigenvariable: Some(z.clone()), ..Inst::default() },
                        premises: vec![seq(&ctx.extended(z), with(&rest, inst), delta.clone())],
                    };
                    return Some(step);
                }
                Formula::Not(a) if classical => vec![seq(ctx, rest, with(delta, (**a).clone()))],
                Formula::Implies(a, b) if classical => vec![
                    seq(ctx, rest.clone(), with(delta, (**a).clone())),
                    seq(ctx, with(&rest, (**b).clone()), delta.clone()),
                ],
                _ => continue,
            };
            let rule = match phi {
                Formula::And(_) => Rule::AndL,
                Formula::Or(_) => Rule::OrL,
                Formula::Not(_) => Rule::NotL,
                _ => Rule::ImpL,
            };
            return Some(Step { rule, inst: principal(phi), premises });
        }
        for phi in delta {
            let rest = without(delta, phi);
            let premises = match phi {
                Formula::And(ps) => ps.iter().map(|p| seq(ctx, gamma.clone(), with(&rest, p.clone()))).collect(),
                Formula::Or(ps) => {
                    let mut d = rest;
                    d.extend(ps.iter().cloned());
                    vec![seq(ctx, gamma.clone(), d)]
                }
                Formula::Not(a) if classical => vec![seq(ctx, with(gamma, (**a).clone()), rest)],
                Formula::Implies(a, b) if classical => {
                    vec![seq(ctx, with(gamma, (**a).clone()), with(&rest, (**b).clone()))]
                }
                Formula::Forall(v, body) if classical => {
                    let z = eigenvariable(ctx, v);
                    let inst = substitute_unchecked(body, v, &Term::Var(z.clone()));
                    return Some(Step {
                        rule: Rule::ForallR,
                        inst: Inst { principal: Some(phi.clone()), eigenvariable: Some(z.clone()), ..Inst::default() },
                        premises: vec![seq(&ctx.extended(z), gamma.clone(), with(&rest, inst))],
                    });
                }
                _ => continue,
            };
            let rule = match phi {
                Formula::And(_) => Rule::AndR,
                Formula::Or(_) => Rule::OrR,
                Formula::Not(_) => Rule::NotR,
                _ => Rule::ImpR,
            };
            return Some(Step { rule, inst: principal(phi), premises });
        }
        None
    }

    fn exists_right(&self, s: &Sequent, u: &Universe) -> Vec<Step> {
        let mut out = Vec::new();
        for phi in &s.succedent {
            if let Formula::Exists(v, body) = phi {
                for w in u.get(&v.sort).into_iter().flatten() {
                    let inst = substitute_unchecked(body, v, w);
                    if s.succedent.contains(&inst) {
                        continue;
                    }
                    out.push(Step {
                        rule: Rule::ExistsR,
                        inst: Inst { principal: Some(phi.clone()), witness: Some(w.clone()), ..Inst::default() },
                        premises: vec![seq(&s.context, s.antecedent.clone(), with(&s.succedent, inst))],
                    });
                }
            }
        }
        out
    }

    fn forall_left(&self, s: &Sequent, u: &Universe) -> Vec<Step> {
        let mut out = Vec::new();
        for phi in &s.antecedent {
            if let Formula::Forall(v, body) = phi {
                for w in u.get(&v.sort).into_iter().flatten() {
                    let inst = substitute_unchecked(body, v, w);
                    if s.antecedent.contains(&inst) {
                        continue;
                    }
                    out.push(Step {
                        rule: Rule::ForallL,
                        inst: Inst { principal: Some(phi.clone()), witness: Some(w.clone()), ..Inst::default() },
                        premises: vec![seq(&s.context, with(&s.antecedent, inst), s.succedent.clone())],
                    });
                }
            }
        }
        out
    }

    /// Equality rewriting inside atoms, left side first.
    fn rewrites(&self, s: &Sequent) -> Vec<Step> {
        let mut out = Vec::new();
        for eq in &s.antecedent {
            let Formula::Eq(l, r) = eq else { continue };
            if l == r {
                continue;
            }
            for (from, to, reverse) in [(l, r, false), (r, l, true)] {
                for (side, rule) in [(&s.antecedent, Rule::EqLeft), (&s.succedent, Rule::EqRight)] {
                    for atom in side.iter().filter(|a| matches!(a, Formula::Eq(..) | Formula::Rel(..)) && *a != eq) {
                        if !atom_contains(atom, from) {
                            continue;
                        }
                        let new = replace_term(atom, from, to);
                        if side.contains(&new) {
                            continue;
                        }
                        let (g, d) = if rule == Rule::EqLeft {
                            (with(&s.antecedent, new), s.succedent.clone())
                        } else {
                            (s.antecedent.clone(), with(&s.succedent, new))
                        };
                        out.push(Step {
                            rule,
                            inst: Inst {
                                principal: Some(atom.clone()),
                                equation: Some(eq.clone()),
                                reverse,
                                ..Inst::default()
                            },
                            premises: vec![seq(&s.context, g, d)],
                        });
                    }
                }
            }
        }
        out
    }

    /// Axiom instances split into closing, goal-directed and forward steps.
    fn axiom_steps(&self, s: &Sequent, u: &Universe) -> (Vec<Step>, Vec<Step>, Vec<Step>) {
        let (mut closers, mut backward, mut forward) = (Vec::new(), Vec::new(), Vec::new());
        for (i, ax) in self.theory.axioms.iter().enumerate() {
            for sigma in self.substitutions(ax, s, u) {
                let pairs: Vec<(Var, Term)> = ax.context.vars().iter().cloned().zip(sigma.iter().cloned()).collect();
                let ante: BTreeSet<Formula> = ax.antecedent.iter().map(|p| substitute_many(p, &pairs)).collect();
                let succ: BTreeSet<Formula> = ax.succedent.iter().map(|p| substitute_many(p, &pairs)).collect();
                let open: Vec<Formula> = ante
                    .iter()
                    .filter(|p| **p != Formula::Top && !s.antecedent.contains(*p))
                    .cloned()
                    .collect();
                let mut premises: Vec<Sequent> =
                    open.iter().map(|p| seq(&s.context, s.antecedent.clone(), with(&s.succedent, p.clone()))).collect();
                premises.extend(succ.iter().map(|p| seq(&s.context, with(&s.antecedent, p.clone()), s.succedent.clone())));
                let step = Step {
                    rule: Rule::Axiom,
                    inst: Inst { axiom: Some(i), substitution: sigma.clone(), ..Inst::default() },
                    premises,
                };
                if open.is_empty() && succ.iter().all(|p| s.succedent.contains(p)) {
                    closers.push(step);
                } else if open.iter().any(|p| s.succedent.contains(p)) {
                    // a premise would repeat the conclusion
                    continue;
                } else if succ.iter().any(|p| s.succedent.contains(p)) {
                    backward.push(step);
                } else if open.iter().all(|p| available(p, &s.antecedent, u))
                    && !succ.is_empty()
                    && succ.iter().all(|p| !available(p, &s.antecedent, u))
                {
                    forward.push(step);
                }
            }
        }
        (closers, backward, forward)
    }

    /// Candidate substitutions for an axiom: its atomic antecedents matched
    /// against `Γ`, or one succedent formula matched against `Δ`, with any
    /// remaining variables drawn from the term universe.
    fn substitutions(&self, ax: &Sequent, s: &Sequent, u: &Universe) -> BTreeSet<Vec<Term>> {
        let pvars = ax.context.names();
        let mut partial: Vec<BTreeMap<String, Term>> = Vec::new();
        let atoms: Vec<&Formula> =
            ax.antecedent.iter().filter(|p| matches!(p, Formula::Eq(..) | Formula::Rel(..))).collect();
        match_all(&atoms, &s.antecedent, &pvars, &mut BTreeMap::new(), &mut partial);
        for psi in &ax.succedent {
            for delta in &s.succedent {
                let mut b = BTreeMap::new();
                if match_formula(psi, delta, &pvars, &mut b) {
                    partial.push(b);
                }
            }
        }
        let mut out = BTreeSet::new();
        for b in partial {
            self.complete(ax.context.vars(), 0, &b, &mut Vec::new(), s, u, &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn complete(
        &self,
        vars: &[Var],
        k: usize,
        bind: &BTreeMap<String, Term>,
        acc: &mut Vec<Term>,
        s: &Sequent,
        u: &Universe,
        out: &mut BTreeSet<Vec<Term>>,
    ) {
        if k == vars.len() {
            out.insert(acc.clone());
            return;
        }
        let v = &vars[k];
        let choices: Vec<Term> = match bind.get(&v.name) {
            Some(t) => {
                let ok = sort_of(&self.theory.signature, &s.context, t).is_ok_and(|st| st == v.sort);
                if !ok {
                    return;
                }
                vec![t.clone()]
            }
            None => u.get(&v.sort).cloned().unwrap_or_default(),
        };
        for t in choices {
            acc.push(t);
            self.complete(vars, k + 1, bind, acc, s, u, out);
            acc.pop();
        }
    }
}

fn match_all(
    atoms: &[&Formula],
    gamma: &BTreeSet<Formula>,
    pvars: &BTreeSet<String>,
    bind: &mut BTreeMap<String, Term>,
    out: &mut Vec<BTreeMap<String, Term>>,
) {
    let Some((first, rest)) = atoms.split_first() else {
        out.push(bind.clone());
        return;
    };
    for g in gamma {
        let mut b = bind.clone();
        if match_formula(first, g, pvars, &mut b) {
            match_all(rest, gamma, pvars, &mut b, out);
        }
    }
}

fn atom_contains(atom: &Formula, t: &Term) -> bool {
    match atom {
        Formula::Eq(a, b) => a.contains(t) || b.contains(t),
        Formula::Rel(_, args) => args.iter().any(|a| a.contains(t)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check_proof;
    use crate::syntax::{parse_sequent, parse_theory};

    fn run(src: &str, s: &str, mode: Mode, depth: usize) -> (Theory, ProofResult) {
        let t = parse_theory(src).unwrap();
        let s = parse_sequent(&t.signature, s).unwrap();
        let r = prove(&t, &s, SearchBudget::default().with_depth(depth), mode).unwrap();
        if let ProofResult::Proved(tree) = &r {
            assert_eq!(tree.sequent, s);
            check_proof(&t, tree).unwrap();
        }
        (t, r)
    }

    #[test]
    fn identity_at_depth_one() {
        let (_, r) = run("sort X. rel R(X).", "[x:X] R(x) |- R(x)", Mode::Geometric, 1);
        assert_eq!(r.tree().unwrap().height(), 1);
    }

    #[test]
    fn axiom_then_witness() {
        let (_, r) = run(
            "sort X. rel R(X). rel S(X). axiom [x:X] R(x) |- S(x).",
            "[x:X] R(x) |- exists y:X. S(y)",
            Mode::Geometric,
            6,
        );
        assert!(r.is_proved());
    }

    #[test]
    fn empty_theory_cannot_prove_falsum() {
        let (_, r) = run("(* no declarations *)", "[] top |- bot", Mode::Geometric, 6);
        assert!(!r.is_proved());
    }

    #[test]
    fn excluded_middle_classically() {
        let (_, r) = run("sort X. rel P(X).", "[x:X] |- P(x) | not P(x)", Mode::Classical, 4);
        assert!(r.is_proved());
        assert!(r.tree().unwrap().rules_used().contains(&Rule::NotR));
    }

    #[test]
    fn geometric_mode_rejects_negation() {
        let t = parse_theory("sort X. rel P(X).").unwrap();
        let s = parse_sequent(&t.signature, "[x:X] |- P(x) | not P(x)").unwrap();
        assert!(matches!(prove_geometric(&t, &s, SearchBudget::default()), Err(ProofError::NonGeometricInput(_))));
    }

    #[test]
    fn chained_axioms() {
        let (_, r) = run(
            "sort X. rel P(X). rel Q(X). rel S(X). axiom [x:X] P(x) |- Q(x). axiom [x:X] Q(x) |- S(x).",
            "[x:X] P(x) |- S(x)",
            Mode::Geometric,
            6,
        );
        assert!(r.is_proved());
    }

    #[test]
    fn equality_rewrite() {
        let (_, r) = run("sort X. rel P(X).", "[x:X, y:X] x = y, P(x) |- P(y)", Mode::Geometric, 3);
        assert!(r.tree().unwrap().rules_used().contains(&Rule::EqLeft) || r.tree().unwrap().rules_used().contains(&Rule::EqRight));
        let (_, r) = run("sort X. rel P(X).", "[x:X, y:X] x = y |- y = x", Mode::Geometric, 3);
        assert!(r.is_proved());
    }

    #[test]
    fn serial_relation_chains() {
        let (_, r) = run(
            "sort X. rel R(X,X). axiom [x:X] top |- exists y:X. R(x,y).",
            "[x:X] |- exists y:X. exists z:X. R(x,y) & R(y,z)",
            Mode::Geometric,
            8,
        );
        assert!(r.is_proved());
    }

    #[test]
    fn node_limit_is_reported() {
        let t = parse_theory("sort X. rel R(X,X). axiom [x:X] top |- exists y:X. R(x,y).").unwrap();
        let s = parse_sequent(&t.signature, "[x:X] |- R(x,x)").unwrap();
        let r = prove_geometric(&t, &s, SearchBudget::new(20, 1, 50).unwrap()).unwrap();
        assert!(matches!(r, ProofResult::ExhaustedBudget(SearchStats { hit_node_limit: true, .. })));
    }

    #[test]
    fn ill_formed_input() {
        let t = parse_theory("sort X. rel R(X).").unwrap();
        let s = Sequent::new(Context::new(), [Formula::rel("R", vec![Term::var("x", "X")])], []);
        assert!(matches!(prove_geometric(&t, &s, SearchBudget::default()), Err(ProofError::IllFormedSequent(_))));
        assert!(SearchBudget::new(0, 1, 10).is_err());
    }
}
