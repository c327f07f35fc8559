use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{substitute_unchecked, Context, Formula, Signature, Term};

/// Terms over the context variables and constants, grouped by sort, up to
/// function nesting depth `depth`. Order is deterministic: variables in
/// context order, constants by name, then applications level by level.
pub fn term_universe(sig: &Signature, ctx: &Context, depth: usize) -> BTreeMap<String, Vec<Term>> {
    let mut out: BTreeMap<String, Vec<Term>> = sig.sorts.iter().map(|s| (s.clone(), Vec::new())).collect();
    for v in ctx.vars() {
        out.entry(v.sort.clone()).or_default().push(Term::Var(v.clone()));
    }
    for (name, sort) in &sig.constants {
        out.entry(sort.clone()).or_default().push(Term::constant(name.clone(), sort.clone()));
    }
    for level in 1..=depth {
        let mut fresh: Vec<(String, Term)> = Vec::new();
        for (fun, (args, res)) in &sig.functions {
            let pools: Vec<&Vec<Term>> = args.iter().map(|s| out.get(s).expect("declared sort")).collect();
            if pools.iter().any(|p| p.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; pools.len()];
            loop {
                let tuple: Vec<Term> = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                // Only terms of exactly this level; shallower ones exist already.
                if tuple.iter().map(Term::depth).max().unwrap_or(0) + 1 == level {
                    fresh.push((res.clone(), Term::app(fun.clone(), tuple)));
                }
                if !odometer(&mut idx, &pools) {
                    break;
                }
            }
        }
        for (sort, t) in fresh {
            out.entry(sort).or_default().push(t);
        }
    }
    out
}

fn odometer(idx: &mut [usize], pools: &[&Vec<Term>]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < pools[k].len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// One-sided matching: binds pattern variables (names in `pvars`) so that the
/// pattern becomes `target`. Bound variables are compared literally.
pub(crate) fn match_term(
    pat: &Term,
    target: &Term,
    pvars: &BTreeSet<String>,
    bind: &mut BTreeMap<String, Term>,
) -> bool {
    match (pat, target) {
        (Term::Var(v), _) if pvars.contains(&v.name) => {
            if let Term::Var(w) = target {
                // a term variable of a different sort can never match
                if w.sort != v.sort {
                    return false;
                }
            }
            match bind.get(&v.name) {
                Some(t) => t == target,
                None => {
                    bind.insert(v.name.clone(), target.clone());
                    true
                }
            }
        }
        (Term::Var(v), Term::Var(w)) => v == w,
        (Term::Const { name: a, .. }, Term::Const { name: b, .. }) => a == b,
        (Term::App { fun: f, args: xs }, Term::App { fun: g, args: ys }) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, pvars, bind))
        }
        _ => false,
    }
}

pub(crate) fn match_formula(
    pat: &Formula,
    target: &Formula,
    pvars: &BTreeSet<String>,
    bind: &mut BTreeMap<String, Term>,
) -> bool {
    let saved = bind.clone();
    let ok = match (pat, target) {
        (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Eq(a, b), Formula::Eq(c, d)) => match_term(a, c, pvars, bind) && match_term(b, d, pvars, bind),
        (Formula::Rel(r, xs), Formula::Rel(s, ys)) => {
            r == s && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, pvars, bind))
        }
        (Formula::And(xs), Formula::And(ys)) | (Formula::Or(xs), Formula::Or(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_formula(x, y, pvars, bind))
        }
        (Formula::Not(a), Formula::Not(b)) => match_formula(a, b, pvars, bind),
        (Formula::Implies(a, b), Formula::Implies(c, d)) => {
            match_formula(a, c, pvars, bind) && match_formula(b, d, pvars, bind)
        }
        (Formula::Exists(v, a), Formula::Exists(w, b)) | (Formula::Forall(v, a), Formula::Forall(w, b))
            if std::mem::discriminant(pat) == std::mem::discriminant(target) =>
        {
            if v != w {
                false
            } else if pvars.contains(&v.name) {
                let mut inner = pvars.clone();
                inner.remove(&v.name);
                match_formula(a, b, &inner, bind)
            } else {
                match_formula(a, b, pvars, bind)
            }
        }
        _ => false,
    };
    if !ok {
        *bind = saved;
    }
    ok
}

/// Whether `phi` already follows from `gamma` by `∧`, `∨` and `∃`
/// introductions over witnesses drawn from `universe`.
pub(crate) fn available(phi: &Formula, gamma: &BTreeSet<Formula>, universe: &BTreeMap<String, Vec<Term>>) -> bool {
    if gamma.contains(phi) {
        return true;
    }
    match phi {
        Formula::Top => true,
        Formula::And(ps) => ps.iter().all(|p| available(p, gamma, universe)),
        Formula::Or(ps) => ps.iter().any(|p| available(p, gamma, universe)),
        Formula::Exists(v, body) => universe
            .get(&v.sort)
            .map(|ts| ts.iter().any(|t| available(&substitute_unchecked(body, v, t), gamma, universe)))
            .unwrap_or(false),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula_in, parse_theory, Var};

    #[test]
    fn universe_levels() {
        let t = parse_theory("sort X. fun f(X):X. const c:X.").unwrap();
        let ctx: Context = vec![Var::new("x", "X")].into_iter().collect();
        let u = term_universe(&t.signature, &ctx, 2);
        let names: Vec<String> = u["X"].iter().map(|t| t.to_string()).collect();
        assert_eq!(names, ["x", "c", "f(x)", "f(c)", "f(f(x))", "f(f(c))"]);
    }

    #[test]
    fn nullary_function_is_a_level_one_term() {
        let t = parse_theory("sort X. fun e():X.").unwrap();
        let u = term_universe(&t.signature, &Context::new(), 1);
        assert_eq!(u["X"].len(), 1);
        assert_eq!(term_universe(&t.signature, &Context::new(), 0)["X"].len(), 0);
    }

    #[test]
    fn matching_binds_consistently() {
        let t = parse_theory("sort X. rel R(X,X).").unwrap();
        let ctx: Context = vec![Var::new("x", "X"), Var::new("y", "X")].into_iter().collect();
        let pat = parse_formula_in(&t.signature, &ctx, "R(x,x)").unwrap();
        let good = parse_formula_in(&t.signature, &ctx, "R(y,y)").unwrap();
        let bad = parse_formula_in(&t.signature, &ctx, "R(x,y)").unwrap();
        let pv: BTreeSet<String> = ["x".to_string()].into();
        let mut b = BTreeMap::new();
        assert!(match_formula(&pat, &good, &pv, &mut b));
        assert_eq!(b["x"], Term::var("y", "X"));
        let mut b = BTreeMap::new();
        assert!(!match_formula(&pat, &bad, &pv, &mut b));
        assert!(b.is_empty());
    }

    #[test]
    fn availability_through_exists() {
        let t = parse_theory("sort X. rel R(X,X).").unwrap();
        let ctx: Context = vec![Var::new("x", "X"), Var::new("z", "X")].into_iter().collect();
        let gamma: BTreeSet<Formula> = [parse_formula_in(&t.signature, &ctx, "R(x,z)").unwrap()].into();
        let u = term_universe(&t.signature, &ctx, 0);
        let phi = parse_formula_in(&t.signature, &ctx, "exists y:X. R(x,y)").unwrap();
        assert!(available(&phi, &gamma, &u));
        let psi = parse_formula_in(&t.signature, &ctx, "exists y:X. R(y,y)").unwrap();
        assert!(!available(&psi, &gamma, &u));
    }
}
