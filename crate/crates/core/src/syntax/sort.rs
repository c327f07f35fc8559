use super::{Context, Formula, Sequent, Signature, SortError, Term, Var};

/// The sort of `t` in context `ctx`.
pub fn sort_of(sig: &Signature, ctx: &Context, t: &Term) -> Result<String, SortError> {
    sort_with(sig, &mut ctx.vars().to_vec(), t)
}

// `scope` is searched from the back so inner binders shadow outer ones.
fn sort_with(sig: &Signature, scope: &mut Vec<Var>, t: &Term) -> Result<String, SortError> {
    match t {
        Term::Var(v) => match scope.iter().rev().find(|w| w.name == v.name) {
            None => Err(SortError::UnboundVariable(v.name.clone())),
            Some(w) if w.sort != v.sort => Err(SortError::SortMismatch {
                what: v.name.clone(),
                expected: w.sort.clone(),
                found: v.sort.clone(),
            }),
            Some(_) => Ok(v.sort.clone()),
        },
        Term::Const { name, sort } => match sig.constants.get(name) {
            None => Err(SortError::UnknownSymbol(name.clone())),
            Some(s) if s != sort => Err(SortError::SortMismatch {
                what: name.clone(),
                expected: s.clone(),
                found: sort.clone(),
            }),
            Some(s) => Ok(s.clone()),
        },
        Term::App { fun, args } => {
            let (arg_sorts, result) = sig
                .functions
                .get(fun)
                .ok_or_else(|| SortError::UnknownSymbol(fun.clone()))?;
            if arg_sorts.len() != args.len() {
                return Err(SortError::ArityMismatch {
                    name: fun.clone(),
                    expected: arg_sorts.len(),
                    found: args.len(),
                });
            }
            for (a, expected) in args.iter().zip(arg_sorts) {
                let found = sort_with(sig, scope, a)?;
                if &found != expected {
                    return Err(SortError::SortMismatch {
                        what: fun.clone(),
                        expected: expected.clone(),
                        found,
                    });
                }
            }
            Ok(result.clone())
        }
    }
}

/// Checks that `phi` is well sorted and its free variables lie in `ctx`.
pub fn check_formula(sig: &Signature, ctx: &Context, phi: &Formula) -> Result<(), SortError> {
    check_with(sig, &mut ctx.vars().to_vec(), phi)
}

fn check_with(sig: &Signature, scope: &mut Vec<Var>, phi: &Formula) -> Result<(), SortError> {
    match phi {
        Formula::Top | Formula::Bottom => Ok(()),
        Formula::Eq(a, b) => {
            let sa = sort_with(sig, scope, a)?;
            let sb = sort_with(sig, scope, b)?;
            if sa != sb {
                return Err(SortError::SortMismatch { what: "=".into(), expected: sa, found: sb });
            }
            Ok(())
        }
        Formula::Rel(r, args) => {
            let arg_sorts = sig.relations.get(r).ok_or_else(|| SortError::UnknownSymbol(r.clone()))?;
            if arg_sorts.len() != args.len() {
                return Err(SortError::ArityMismatch {
                    name: r.clone(),
                    expected: arg_sorts.len(),
                    found: args.len(),
                });
            }
            for (a, expected) in args.iter().zip(arg_sorts) {
                let found = sort_with(sig, scope, a)?;
                if &found != expected {
                    return Err(SortError::SortMismatch { what: r.clone(), expected: expected.clone(), found });
                }
            }
            Ok(())
        }
        Formula::And(ps) | Formula::Or(ps) => ps.iter().try_for_each(|p| check_with(sig, scope, p)),
        Formula::Not(b) => check_with(sig, scope, b),
        Formula::Implies(a, b) => {
            check_with(sig, scope, a)?;
            check_with(sig, scope, b)
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            if !sig.sorts.contains(&v.sort) {
                return Err(SortError::UnknownSort(v.sort.clone()));
            }
            scope.push(v.clone());
            let r = check_with(sig, scope, b);
            scope.pop();
            r
        }
    }
}

pub fn check_sequent(sig: &Signature, s: &Sequent) -> Result<(), SortError> {
    for v in s.context.vars() {
        if !sig.sorts.contains(&v.sort) {
            return Err(SortError::UnknownSort(v.sort.clone()));
        }
    }
    for phi in s.formulas() {
        check_formula(sig, &s.context, phi).map_err(|e| match e {
            SortError::UnboundVariable(v) => SortError::NotInContext(v),
            other => other,
        })?;
    }
    Ok(())
}
