use std::collections::BTreeSet;
use std::fmt;

use super::{Mode, ProofTree, Rule};
use crate::syntax::{check_sequent, replace_term, sort_of, substitute_many, Formula, Sequent, Term, Theory, Var};

/// Why a tree was rejected, with the path of premise indices to the node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub path: Vec<usize>,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(f, "at node [{}]: {}", path.join("."), self.reason)
    }
}

/// Accepts any tree built from the classical rule set.
pub fn check_proof(t: &Theory, p: &ProofTree) -> Result<(), CheckFailure> {
    check_proof_in(t, p, Mode::Classical)
}

/// Checks every node of `p`. In geometric mode the classical-only rules are
/// rejected.
pub fn check_proof_in(t: &Theory, p: &ProofTree, mode: Mode) -> Result<(), CheckFailure> {
    if let Err(e) = check_sequent(&t.signature, &p.sequent) {
        return Err(CheckFailure { path: Vec::new(), reason: format!("ill-formed root sequent: {e}") });
    }
    let mut path = Vec::new();
    check_node(t, p, mode, &mut path)
}

fn check_node(t: &Theory, p: &ProofTree, mode: Mode, path: &mut Vec<usize>) -> Result<(), CheckFailure> {
    let fail = |reason: String| CheckFailure { path: path.clone(), reason };
    if mode == Mode::Geometric && p.rule.is_classical() {
        return Err(fail(format!("rule {} is not geometric", p.rule.name())));
    }
    let expected = expected_premises(t, p).map_err(fail)?;
    if expected.len() != p.premises.len() {
        return Err(fail(format!(
            "rule {} needs {} premises, found {}",
            p.rule.name(),
            expected.len(),
            p.premises.len()
        )));
    }
    for (i, (want, got)) in expected.iter().zip(&p.premises).enumerate() {
        if *want != got.sequent {
            return Err(fail(format!("premise {i} should be {want}, found {}", got.sequent)));
        }
    }
    for (i, q) in p.premises.iter().enumerate() {
        path.push(i);
        check_node(t, q, mode, path)?;
        path.pop();
    }
    Ok(())
}

fn add(set: &BTreeSet<Formula>, phi: &Formula) -> BTreeSet<Formula> {
    let mut s = set.clone();
    s.insert(phi.clone());
    s
}

fn remove(set: &BTreeSet<Formula>, phi: &Formula) -> BTreeSet<Formula> {
    let mut s = set.clone();
    s.remove(phi);
    s
}

/// The premises a correct application of the node's rule must have.
fn expected_premises(t: &Theory, p: &ProofTree) -> Result<Vec<Sequent>, String> {
    let s = &p.sequent;
    let ctx = &s.context;
    let (g, d) = (&s.antecedent, &s.succedent);
    let mk = |g: BTreeSet<Formula>, d: BTreeSet<Formula>| Sequent { context: ctx.clone(), antecedent: g, succedent: d };
    let inst = &p.inst;
    let principal = || inst.principal.as_ref().ok_or_else(|| "missing principal formula".to_string());
    let in_left = |phi: &Formula| if g.contains(phi) { Ok(()) } else { Err(format!("{phi} is not on the left")) };
    let in_right = |phi: &Formula| if d.contains(phi) { Ok(()) } else { Err(format!("{phi} is not on the right")) };
    let witness = |v: &Var| -> Result<Term, String> {
        let w = inst.witness.clone().ok_or("missing witness")?;
        match sort_of(&t.signature, ctx, &w) {
            Ok(sort) if sort == v.sort => Ok(w),
            Ok(sort) => Err(format!("witness {w} has sort {sort}, expected {}", v.sort)),
            Err(e) => Err(format!("witness {w}: {e}")),
        }
    };
    let eigen = |v: &Var| -> Result<Var, String> {
        let z = inst.eigenvariable.clone().ok_or("missing eigenvariable")?;
        if z.sort != v.sort {
            return Err(format!("eigenvariable {z} has the wrong sort"));
        }
        if ctx.contains_name(&z.name) {
            return Err(format!("eigenvariable {} already occurs in the context", z.name));
        }
        Ok(z)
    };

    Ok(match p.rule {
        Rule::Id => {
            let phi = principal()?;
            in_left(phi)?;
            in_right(phi)?;
            vec![]
        }
        Rule::TopR => {
            in_right(&Formula::Top)?;
            vec![]
        }
        Rule::BotL => {
            in_left(&Formula::Bottom)?;
            vec![]
        }
        Rule::EqRefl => {
            let phi = principal()?;
            in_right(phi)?;
            match phi {
                Formula::Eq(a, b) if a == b => vec![],
                _ => return Err(format!("{phi} is not a reflexivity instance")),
            }
        }
        Rule::AndL => {
            let phi = principal()?;
            in_left(phi)?;
            let Formula::And(ps) = phi else { return Err(format!("{phi} is not a conjunction")) };
            let mut g2 = remove(g, phi);
            g2.extend(ps.iter().cloned());
            vec![mk(g2, d.clone())]
        }
        Rule::AndR => {
            let phi = principal()?;
            in_right(phi)?;
            let Formula::And(ps) = phi else { return Err(format!("{phi} is not a conjunction")) };
            let rest = remove(d, phi);
            ps.iter().map(|q| mk(g.clone(), add(&rest, q))).collect()
        }
        Rule::OrL => {
            let phi = principal()?;
            in_left(phi)?;
            let Formula::Or(ps) = phi else { return Err(format!("{phi} is not a disjunction")) };
            let rest = remove(g, phi);
            ps.iter().map(|q| mk(add(&rest, q), d.clone())).collect()
        }
        Rule::OrR => {
            let phi = principal()?;
            in_right(phi)?;
            let Formula::Or(ps) = phi else { return Err(format!("{phi} is not a disjunction")) };
            let mut d2 = remove(d, phi);
            d2.extend(ps.iter().cloned());
            vec![mk(g.clone(), d2)]
        }
        Rule::ExistsL | Rule::ForallR => {
            let phi = principal()?;
            let (v, body) = match (p.rule, phi) {
                (Rule::ExistsL, Formula::Exists(v, b)) => {
                    in_left(phi)?;
                    (v, b)
                }
                (Rule::ForallR, Formula::Forall(v, b)) => {
                    in_right(phi)?;
                    (v, b)
                }
                _ => return Err(format!("{phi} does not fit rule {}", p.rule.name())),
            };
            let z = eigen(v)?;
            let body = substitute_many(body, &[(v.clone(), Term::Var(z.clone()))]);
            let ext = ctx.extended(z);
            let (g2, d2) = if p.rule == Rule::ExistsL {
                (add(&remove(g, phi), &body), d.clone())
            } else {
                (g.clone(), add(&remove(d, phi), &body))
            };
            vec![Sequent { context: ext, antecedent: g2, succedent: d2 }]
        }
        Rule::ExistsR => {
            let phi = principal()?;
            in_right(phi)?;
            let Formula::Exists(v, body) = phi else { return Err(format!("{phi} is not existential")) };
            let w = witness(v)?;
            vec![mk(g.clone(), add(d, &substitute_many(body, &[(v.clone(), w)])))]
        }
        Rule::ForallL => {
            let phi = principal()?;
            in_left(phi)?;
            let Formula::Forall(v, body) = phi else { return Err(format!("{phi} is not universal")) };
            let w = witness(v)?;
            vec![mk(add(g, &substitute_many(body, &[(v.clone(), w)])), d.clone())]
        }
        Rule::NotL => {
            let phi = principal()?;
            in_left(phi)?;
            let Formula::Not(a) = phi else { return Err(format!("{phi} is not a negation")) };
            vec![mk(remove(g, phi), add(d, a))]
        }
        Rule::NotR => {
            let phi = principal()?;
            in_right(phi)?;
            let Formula::Not(a) = phi else { return Err(format!("{phi} is not a negation")) };
            vec![mk(add(g, a), remove(d, phi))]
        }
        Rule::ImpL => {
            let phi = principal()?;
            in_left(phi)?;
            let Formula::Implies(a, b) = phi else { return Err(format!("{phi} is not an implication")) };
            let rest = remove(g, phi);
            vec![mk(rest.clone(), add(d, a)), mk(add(&rest, b), d.clone())]
        }
        Rule::ImpR => {
            let phi = principal()?;
            in_right(phi)?;
            let Formula::Implies(a, b) = phi else { return Err(format!("{phi} is not an implication")) };
            vec![mk(add(g, a), add(&remove(d, phi), b))]
        }
        Rule::EqLeft | Rule::EqRight => {
            let eq = inst.equation.as_ref().ok_or("missing equation")?;
            in_left(eq)?;
            let Formula::Eq(l, r) = eq else { return Err(format!("{eq} is not an equation")) };
            let (from, to) = if inst.reverse { (r, l) } else { (l, r) };
            let atom = principal()?;
            if !atom.is_atomic() {
                return Err(format!("{atom} is not atomic"));
            }
            let new = replace_term(atom, from, to);
            if p.rule == Rule::EqLeft {
                in_left(atom)?;
                vec![mk(add(g, &new), d.clone())]
            } else {
                in_right(atom)?;
                vec![mk(g.clone(), add(d, &new))]
            }
        }
        Rule::Axiom => {
            let i = inst.axiom.ok_or("missing axiom index")?;
            let ax = t.axioms.get(i).ok_or_else(|| format!("no axiom with index {i}"))?;
            let vars = ax.context.vars();
            if vars.len() != inst.substitution.len() {
                return Err(format!("axiom {i} needs {} terms, found {}", vars.len(), inst.substitution.len()));
            }
            let mut pairs = Vec::new();
            for (v, term) in vars.iter().zip(&inst.substitution) {
                match sort_of(&t.signature, ctx, term) {
                    Ok(sort) if sort == v.sort => pairs.push((v.clone(), term.clone())),
                    Ok(sort) => return Err(format!("term {term} has sort {sort}, expected {}", v.sort)),
                    Err(e) => return Err(format!("term {term}: {e}")),
                }
            }
            let ante: BTreeSet<Formula> = ax.antecedent.iter().map(|q| substitute_many(q, &pairs)).collect();
            let succ: BTreeSet<Formula> = ax.succedent.iter().map(|q| substitute_many(q, &pairs)).collect();
            let mut out: Vec<Sequent> = ante
                .iter()
                .filter(|q| **q != Formula::Top && !g.contains(*q))
                .map(|q| mk(g.clone(), add(d, q)))
                .collect();
            out.extend(succ.iter().map(|q| mk(add(g, q), d.clone())));
            out
        }
    })
}
