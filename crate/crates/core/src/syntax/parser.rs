use std::collections::BTreeSet;

use super::lexer::{tokenize, Tok, KEYWORDS};
use super::{Context, Formula, ParseError, Pos, Sequent, Signature, SortError, Term, Theory, Var};

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    sig: Signature,
    scope: Vec<Var>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, sig: Signature) -> PResult<Self> {
        Ok(Parser { toks: tokenize(src)?, i: 0, sig, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { pos: self.pos(), message: message.into() })
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    /// An identifier that is not a keyword.
    fn name(&mut self) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok((s, pos))
            }
            Tok::Ident(s) => self.syntax(format!("`{s}` is a reserved word")),
            other => self.syntax(format!("expected a name, found {}", other.describe())),
        }
    }

    fn sort_name(&mut self) -> PResult<String> {
        let (s, pos) = self.name()?;
        if !self.sig.sorts.contains(&s) {
            return Err(ParseError::Sort { pos, subject: s.clone(), error: SortError::UnknownSort(s) });
        }
        Ok(s)
    }

    fn sort_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RParen {
            out.push(self.sort_name()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(self.sort_name()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn fresh_symbol(&self, name: &str, pos: Pos) -> PResult<()> {
        if self.sig.has_symbol(name) {
            return Err(ParseError::DuplicateName { pos, name: name.to_string() });
        }
        Ok(())
    }

    fn theory(&mut self) -> PResult<Theory> {
        let mut axioms = Vec::new();
        loop {
            let pos = self.pos();
            let kw = match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) => s.clone(),
                other => return self.syntax(format!("expected a declaration, found {}", other.describe())),
            };
            self.bump();
            match kw.as_str() {
                "sort" => {
                    let (s, p) = self.name()?;
                    if !self.sig.sorts.insert(s.clone()) {
                        return Err(ParseError::DuplicateName { pos: p, name: s });
                    }
                }
                "fun" => {
                    let (f, p) = self.name()?;
                    self.fresh_symbol(&f, p)?;
                    let args = self.sort_list()?;
                    self.expect(Tok::Colon)?;
                    let res = self.sort_name()?;
                    self.sig.functions.insert(f, (args, res));
                }
                "rel" => {
                    let (r, p) = self.name()?;
                    self.fresh_symbol(&r, p)?;
                    let args = self.sort_list()?;
                    self.sig.relations.insert(r, args);
                }
                "const" => {
                    let (c, p) = self.name()?;
                    self.fresh_symbol(&c, p)?;
                    self.expect(Tok::Colon)?;
                    let s = self.sort_name()?;
                    self.sig.constants.insert(c, s);
                }
                "axiom" => axioms.push(self.sequent()?),
                _ => {
                    return Err(ParseError::Syntax { pos, message: format!("unknown declaration `{kw}`") });
                }
            }
            self.expect(Tok::Dot)?;
        }
        let flavor = Theory::infer_flavor(&axioms);
        Ok(Theory { signature: std::mem::take(&mut self.sig), axioms, flavor })
    }

    fn context(&mut self) -> PResult<Context> {
        self.expect(Tok::LBracket)?;
        let mut vars: Vec<Var> = Vec::new();
        if *self.peek() != Tok::RBracket {
            loop {
                let (n, p) = self.name()?;
                if vars.iter().any(|v| v.name == n) {
                    return Err(ParseError::DuplicateName { pos: p, name: n });
                }
                self.expect(Tok::Colon)?;
                let s = self.sort_name()?;
                vars.push(Var::new(n, s));
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(Context::from_vars(vars).expect("checked above"))
    }

    fn sequent(&mut self) -> PResult<Sequent> {
        let context = self.context()?;
        self.scope = context.vars().to_vec();
        let antecedent = self.formula_list(&[Tok::Turnstile])?;
        self.expect(Tok::Turnstile)?;
        let succedent = self.formula_list(&[Tok::Dot, Tok::Eof])?;
        self.scope.clear();
        Ok(Sequent { context, antecedent, succedent })
    }

    fn formula_list(&mut self, stops: &[Tok]) -> PResult<BTreeSet<Formula>> {
        let mut out = BTreeSet::new();
        if stops.contains(self.peek()) {
            return Ok(out);
        }
        out.insert(self.formula()?);
        while *self.peek() == Tok::Comma {
            self.bump();
            out.insert(self.formula()?);
        }
        Ok(out)
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(Formula::or(parts))
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> PResult<Formula> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(kw) if kw == "top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(kw) if kw == "bot" => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(kw) if kw == "not" => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
                self.bump();
                let (n, _) = self.name()?;
                self.expect(Tok::Colon)?;
                let s = self.sort_name()?;
                self.expect(Tok::Dot)?;
                let v = Var::new(n, s);
                self.scope.push(v.clone());
                let body = self.formula();
                self.scope.pop();
                let body = body?;
                Ok(if kw == "exists" { Formula::exists(v, body) } else { Formula::forall(v, body) })
            }
            Tok::Ident(n) if self.sig.relations.contains_key(&n) && *self.peek2() == Tok::LParen => {
                self.bump();
                let args = self.term_args()?;
                let expected = self.sig.relations[&n].clone();
                if expected.len() != args.len() {
                    return Err(ParseError::Sort {
                        pos,
                        subject: n.clone(),
                        error: SortError::ArityMismatch { name: n, expected: expected.len(), found: args.len() },
                    });
                }
                for ((_, found), want) in args.iter().zip(&expected) {
                    if found != want {
                        return Err(ParseError::Sort {
                            pos,
                            subject: n.clone(),
                            error: SortError::SortMismatch {
                                what: n.clone(),
                                expected: want.clone(),
                                found: found.clone(),
                            },
                        });
                    }
                }
                Ok(Formula::Rel(n, args.into_iter().map(|(t, _)| t).collect()))
            }
            Tok::Ident(_) => {
                let (lhs, ls) = self.term()?;
                self.expect(Tok::Equals)?;
                let (rhs, rs) = self.term()?;
                if ls != rs {
                    return Err(ParseError::Sort {
                        pos,
                        subject: "=".into(),
                        error: SortError::SortMismatch { what: "=".into(), expected: ls, found: rs },
                    });
                }
                Ok(Formula::Eq(lhs, rhs))
            }
            other => self.syntax(format!("expected a formula, found {}", other.describe())),
        }
    }

    fn term_args(&mut self) -> PResult<Vec<(Term, String)>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RParen {
            out.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(self.term()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    /// A term together with its sort.
    fn term(&mut self) -> PResult<(Term, String)> {
        let (n, pos) = self.name()?;
        if *self.peek() == Tok::LParen {
            let Some((arg_sorts, res)) = self.sig.functions.get(&n).cloned() else {
                return Err(ParseError::Sort { pos, subject: n.clone(), error: SortError::UnknownSymbol(n) });
            };
            let args = self.term_args()?;
            if args.len() != arg_sorts.len() {
                return Err(ParseError::Sort {
                    pos,
                    subject: n.clone(),
                    error: SortError::ArityMismatch { name: n, expected: arg_sorts.len(), found: args.len() },
                });
            }
            for ((_, found), want) in args.iter().zip(&arg_sorts) {
                if found != want {
                    return Err(ParseError::Sort {
                        pos,
                        subject: n.clone(),
                        error: SortError::SortMismatch { what: n.clone(), expected: want.clone(), found: found.clone() },
                    });
                }
            }
            return Ok((Term::app(n, args.into_iter().map(|(t, _)| t).collect()), res));
        }
        if let Some(v) = self.scope.iter().rev().find(|v| v.name == n) {
            return Ok((Term::Var(v.clone()), v.sort.clone()));
        }
        if let Some(s) = self.sig.constants.get(&n) {
            return Ok((Term::constant(n, s.clone()), s.clone()));
        }
        Err(ParseError::Sort { pos, subject: n.clone(), error: SortError::UnboundVariable(n) })
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        if *self.peek() != Tok::Eof {
            return self.syntax(format!("unexpected {}", self.peek().describe()));
        }
        Ok(())
    }
}

/// Parses and sort-checks a theory file.
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    Parser::new(text, Signature::default())?.theory()
}

/// Parses a sequent `[ctx] Γ |- Δ` (optionally terminated by `.`) over an
/// existing signature.
pub fn parse_sequent(sig: &Signature, text: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text, sig.clone())?;
    let s = p.sequent()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_formula_in(sig: &Signature, ctx: &Context, text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, sig.clone())?;
    p.scope = ctx.vars().to_vec();
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term_in(sig: &Signature, ctx: &Context, text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, sig.clone())?;
    p.scope = ctx.vars().to_vec();
    let (t, _) = p.term()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Flavor;

    #[test]
    fn identity_axiom_theory() {
        let t = parse_theory("sort X. rel R(X). axiom [x:X] R(x) |- R(x).").unwrap();
        assert_eq!(t.signature.sorts.len(), 1);
        assert_eq!(t.signature.relations.len(), 1);
        assert_eq!(t.axioms.len(), 1);
        assert_eq!(t.flavor, Flavor::Geometric);
    }

    #[test]
    fn unary_function() {
        let t = parse_theory("sort X. fun f(X):X. axiom [x:X] top |- f(x) = x.").unwrap();
        assert_eq!(t.signature.functions["f"], (vec!["X".to_string()], "X".to_string()));
        let ax = &t.axioms[0];
        let x = Term::var("x", "X");
        assert!(ax.succedent.contains(&Formula::eq(Term::app("f", vec![x.clone()]), x)));
    }

    #[test]
    fn precedence() {
        let t = parse_theory("sort X. rel R(X). rel S(X). rel T(X). axiom [x:X] not R(x) & S(x) | T(x) -> R(x) |- .")
            .unwrap();
        let x = || Term::var("x", "X");
        let r = Formula::rel("R", vec![x()]);
        let s = Formula::rel("S", vec![x()]);
        let tt = Formula::rel("T", vec![x()]);
        let expected = Formula::implies(
            Formula::or(vec![Formula::and(vec![Formula::not(r.clone()), s]), tt]),
            r,
        );
        assert!(t.axioms[0].antecedent.contains(&expected));
        assert_eq!(t.flavor, Flavor::Classical);
    }

    #[test]
    fn quantifier_body_extends_right() {
        let t = parse_theory("sort X. rel R(X). rel S(X). axiom [] exists x:X. R(x) & S(x) |- .").unwrap();
        let f = t.axioms[0].antecedent.iter().next().unwrap();
        assert!(matches!(f, Formula::Exists(_, b) if matches!(**b, Formula::And(_))));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let err = parse_theory("sort X.\nrel R(X).\naxiom [x:X] R(y) |- .").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 3, col: 15 });
        assert!(matches!(err, ParseError::Sort { error: SortError::UnboundVariable(_), .. }));
        let err = parse_theory("sort X. sort X.").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateName { .. }));
        let err = parse_theory("sort X. rel R(X). fun R(X):X.").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateName { .. }));
        let err = parse_theory("sort X. rel R(X) axiom").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn sort_errors() {
        let err = parse_theory("sort X. sort Y. rel R(X). axiom [y:Y] R(y) |- .").unwrap_err();
        assert!(matches!(err, ParseError::Sort { error: SortError::SortMismatch { .. }, .. }));
        let err = parse_theory("sort X. sort Y. axiom [x:X, y:Y] x = y |- .").unwrap_err();
        assert!(matches!(err, ParseError::Sort { error: SortError::SortMismatch { .. }, .. }));
        let err = parse_theory("sort X. fun f(X,X):X. axiom [x:X] f(x) = x |- .").unwrap_err();
        assert!(matches!(err, ParseError::Sort { error: SortError::ArityMismatch { .. }, .. }));
    }

    #[test]
    fn standalone_sequent() {
        let t = parse_theory("sort X. rel R(X,X).").unwrap();
        let s = parse_sequent(&t.signature, "[x:X] top |- exists y:X. R(x,y)").unwrap();
        assert_eq!(s.context.len(), 1);
        assert!(parse_sequent(&t.signature, "[x:X] top |- R(x,z)").is_err());
    }
}
