use std::collections::{BTreeMap, BTreeSet};

use super::{sort_of, Context, Formula, Signature, SortError, Term, Var};

/// `base` with its trailing digits stripped and the smallest numeric suffix
/// that avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (0..)
        .map(|n| format!("{stem}{n}"))
        .find(|cand| !avoid.contains(cand))
        .unwrap()
}

/// Capture-avoiding substitution of `t` for the free variable `v`.
///
/// The sort of `t` is computed in a context made of its own variables, so
/// only the signature is needed.
pub fn substitute(sig: &Signature, phi: &Formula, v: &Var, t: &Term) -> Result<Formula, SortError> {
    let ctx: Context = t.vars().into_iter().collect();
    let found = sort_of(sig, &ctx, t)?;
    if found != v.sort {
        return Err(SortError::SortMismatch { what: v.name.clone(), expected: v.sort.clone(), found });
    }
    Ok(substitute_unchecked(phi, v, t))
}

/// As [`substitute`] without the sort check.
pub fn substitute_unchecked(phi: &Formula, v: &Var, t: &Term) -> Formula {
    let mut map = BTreeMap::new();
    map.insert(v.name.clone(), t.clone());
    subst_formula(phi, &map)
}

/// Simultaneous capture-avoiding substitution.
pub fn substitute_many(phi: &Formula, pairs: &[(Var, Term)]) -> Formula {
    let map: BTreeMap<String, Term> = pairs.iter().map(|(v, t)| (v.name.clone(), t.clone())).collect();
    subst_formula(phi, &map)
}

pub(crate) fn subst_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(&v.name).cloned().unwrap_or_else(|| t.clone()),
        Term::Const { .. } => t.clone(),
        Term::App { fun, args } => Term::App {
            fun: fun.clone(),
            args: args.iter().map(|a| subst_term(a, map)).collect(),
        },
    }
}

fn subst_formula(phi: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    if map.is_empty() {
        return phi.clone();
    }
    match phi {
        Formula::Top | Formula::Bottom => phi.clone(),
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| subst_term(a, map)).collect()),
        Formula::And(ps) => Formula::And(ps.iter().map(|p| subst_formula(p, map)).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(|p| subst_formula(p, map)).collect()),
        Formula::Not(b) => Formula::not(subst_formula(b, map)),
        Formula::Implies(a, b) => Formula::implies(subst_formula(a, map), subst_formula(b, map)),
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let (nv, nb) = subst_binder(v, b, map);
            if matches!(phi, Formula::Exists(..)) {
                Formula::exists(nv, nb)
            } else {
                Formula::forall(nv, nb)
            }
        }
    }
}

fn subst_binder(v: &Var, body: &Formula, map: &BTreeMap<String, Term>) -> (Var, Formula) {
    let free = body.free_var_names();
    let mut inner: BTreeMap<String, Term> = map
        .iter()
        .filter(|(k, _)| **k != v.name && free.contains(*k))
        .map(|(k, t)| (k.clone(), t.clone()))
        .collect();
    if inner.is_empty() {
        return (v.clone(), body.clone());
    }
    let incoming: BTreeSet<String> = inner.values().flat_map(|t| t.vars()).map(|w| w.name).collect();
    if !incoming.contains(&v.name) {
        return (v.clone(), subst_formula(body, &inner));
    }
    let mut avoid = incoming;
    avoid.extend(free);
    avoid.extend(inner.keys().cloned());
    let renamed = Var::new(fresh_name(&v.name, &avoid), v.sort.clone());
    inner.insert(v.name.clone(), Term::Var(renamed.clone()));
    (renamed.clone(), subst_formula(body, &inner))
}

fn replace_in_term(t: &Term, from: &Term, to: &Term) -> Term {
    if t == from {
        return to.clone();
    }
    match t {
        Term::App { fun, args } => Term::App {
            fun: fun.clone(),
            args: args.iter().map(|a| replace_in_term(a, from, to)).collect(),
        },
        _ => t.clone(),
    }
}

/// Replaces every occurrence of the term `from` by `to` inside an atomic
/// formula. Non-atomic formulas are returned unchanged.
pub fn replace_term(phi: &Formula, from: &Term, to: &Term) -> Formula {
    match phi {
        Formula::Eq(a, b) => Formula::Eq(replace_in_term(a, from, to), replace_in_term(b, from, to)),
        Formula::Rel(r, args) => {
            Formula::Rel(r.clone(), args.iter().map(|a| replace_in_term(a, from, to)).collect())
        }
        _ => phi.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x", "X")
    }
    fn y() -> Term {
        Term::var("y", "X")
    }

    #[test]
    fn plain_substitution() {
        let phi = Formula::rel("R", vec![x()]);
        let c = Term::constant("c", "X");
        assert_eq!(substitute_unchecked(&phi, &Var::new("x", "X"), &c), Formula::rel("R", vec![c.clone()]));
        assert_eq!(substitute_unchecked(&Formula::Top, &Var::new("x", "X"), &c), Formula::Top);
    }

    #[test]
    fn renames_to_avoid_capture() {
        let phi = Formula::exists(Var::new("y", "X"), Formula::rel("R", vec![x(), y()]));
        let out = substitute_unchecked(&phi, &Var::new("x", "X"), &y());
        let expected = Formula::exists(Var::new("y0", "X"), Formula::rel("R", vec![y(), Term::var("y0", "X")]));
        assert_eq!(out, expected);
        // No capture: y is free afterwards, and nothing else is.
        assert_eq!(out.free_var_names(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn shadowed_variable_untouched() {
        let phi = Formula::exists(Var::new("x", "X"), Formula::rel("R", vec![x()]));
        assert_eq!(substitute_unchecked(&phi, &Var::new("x", "X"), &y()), phi);
    }

    #[test]
    fn simultaneous_swap() {
        let phi = Formula::rel("R", vec![x(), y()]);
        let out = substitute_many(&phi, &[(Var::new("x", "X"), y()), (Var::new("y", "X"), x())]);
        assert_eq!(out, Formula::rel("R", vec![y(), x()]));
    }

    #[test]
    fn fresh_names_use_smallest_suffix() {
        let avoid: BTreeSet<String> = ["y", "y0", "y1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(fresh_name("y", &avoid), "y2");
        assert_eq!(fresh_name("y1", &avoid), "y2");
        assert_eq!(fresh_name("z", &avoid), "z0");
    }

    #[test]
    fn checked_substitution_rejects_wrong_sort() {
        let mut sig = Signature::default();
        sig.sorts.extend(["X".to_string(), "Y".to_string()]);
        sig.constants.insert("d".into(), "Y".into());
        let phi = Formula::rel("R", vec![x()]);
        assert!(substitute(&sig, &phi, &Var::new("x", "X"), &Term::constant("d", "Y")).is_err());
    }
}
