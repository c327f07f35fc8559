use std::fmt::{self, Write as _};

use super::{Context, Formula, Sequent, Term, Theory, Var};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(&v.name),
            Term::Const { name, .. } => f.write_str(name),
            Term::App { fun, args } => {
                write!(f, "{fun}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.vars().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

// Binding strength: quantifiers 0, `->` 1, `|` 2, `&` 3, `not` 4, atoms 5.
fn prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(ps) if ps.len() >= 2 => 2,
        Formula::And(ps) if ps.len() >= 2 => 3,
        Formula::Or(ps) | Formula::And(ps) if ps.len() == 1 => prec(&ps[0]),
        Formula::Not(_) => 4,
        _ => 5,
    }
}

fn write_at(out: &mut String, phi: &Formula, min: u8) {
    if prec(phi) < min {
        out.push('(');
        write_formula(out, phi);
        out.push(')');
    } else {
        write_formula(out, phi);
    }
}

fn write_formula(out: &mut String, phi: &Formula) {
    match phi {
        Formula::Top => out.push_str("top"),
        Formula::Bottom => out.push_str("bot"),
        Formula::Eq(a, b) => {
            let _ = write!(out, "{a} = {b}");
        }
        Formula::Rel(r, args) => {
            let _ = write!(out, "{r}(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{a}");
            }
            out.push(')');
        }
        Formula::And(ps) if ps.is_empty() => out.push_str("top"),
        Formula::Or(ps) if ps.is_empty() => out.push_str("bot"),
        Formula::And(ps) | Formula::Or(ps) if ps.len() == 1 => write_formula(out, &ps[0]),
        Formula::And(ps) => {
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                write_at(out, p, 4);
            }
        }
        Formula::Or(ps) => {
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                write_at(out, p, 3);
            }
        }
        Formula::Not(b) => {
            out.push_str("not ");
            write_at(out, b, 4);
        }
        Formula::Implies(a, b) => {
            write_at(out, a, 2);
            out.push_str(" -> ");
            write_at(out, b, 1);
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let q = if matches!(phi, Formula::Exists(..)) { "exists" } else { "forall" };
            let _ = write!(out, "{q} {v}. ");
            write_formula(out, b);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self);
        f.write_str(&s)
    }
}

fn join(fs: &std::collections::BTreeSet<Formula>) -> String {
    fs.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.context)?;
        if !self.antecedent.is_empty() {
            write!(f, " {}", join(&self.antecedent))?;
        }
        f.write_str(" |-")?;
        if !self.succedent.is_empty() {
            write!(f, " {}", join(&self.succedent))?;
        }
        Ok(())
    }
}

/// Canonical text of a theory: declarations grouped by kind in name order,
/// then the axioms in their original order, one per line.
pub fn print_theory(t: &Theory) -> String {
    let sig = &t.signature;
    let mut out = String::new();
    if sig.is_empty() {
        out.push_str("(* no declarations *)\n");
    }
    for s in &sig.sorts {
        let _ = writeln!(out, "sort {s}.");
    }
    for (name, (args, res)) in &sig.functions {
        let _ = writeln!(out, "fun {name}({}):{res}.", args.join(","));
    }
    for (name, args) in &sig.relations {
        let _ = writeln!(out, "rel {name}({}).", args.join(","));
    }
    for (name, sort) in &sig.constants {
        let _ = writeln!(out, "const {name}:{sort}.");
    }
    for ax in &t.axioms {
        let _ = writeln!(out, "axiom {ax}.");
    }
    out
}
