#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use geologic::category::{LoadedSite, Presheaf, Subpresheaf};
use geologic::frame::{Frame, FrameSpec};
use geologic::semantics::Interpretation;
use geologic::syntax::{parse_theory, Context, Formula, Sequent, Signature, Term, Theory, Var};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn files(sub: &str, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .collect();
    out.sort();
    out
}

fn stem(p: &Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

pub fn theory_paths() -> Vec<PathBuf> {
    files("theories", "thy")
}

pub fn site_paths() -> Vec<PathBuf> {
    files("sites", "json")
}

pub fn frame_paths() -> Vec<PathBuf> {
    files("frames", "json")
}

pub fn theories() -> Vec<(String, Theory)> {
    theory_paths()
        .iter()
        .map(|p| (stem(p), parse_theory(&std::fs::read_to_string(p).unwrap()).unwrap()))
        .collect()
}

pub fn theory(name: &str) -> Theory {
    let p = corpus_dir().join("theories").join(format!("{name}.thy"));
    parse_theory(&std::fs::read_to_string(p).unwrap()).unwrap()
}

pub fn sites() -> Vec<(String, LoadedSite)> {
    site_paths()
        .iter()
        .map(|p| (stem(p), LoadedSite::from_json_str(&std::fs::read_to_string(p).unwrap()).unwrap()))
        .collect()
}

pub fn frames() -> Vec<(String, Frame)> {
    frame_paths()
        .iter()
        .map(|p| (stem(p), FrameSpec::from_json_str(&std::fs::read_to_string(p).unwrap()).unwrap().build().unwrap()))
        .collect()
}

// Naive evaluation, one environment at a time, keyed by variable name.

pub fn naive_term(m: &Interpretation, env: &BTreeMap<String, usize>, t: &Term) -> usize {
    match t {
        Term::Var(v) => env[&v.name],
        Term::Const { name, .. } => m.constants[name],
        Term::App { fun, args } => {
            let vals: Vec<usize> = args.iter().map(|a| naive_term(m, env, a)).collect();
            m.functions[fun][&vals]
        }
    }
}

pub fn naive_holds(m: &Interpretation, env: &BTreeMap<String, usize>, phi: &Formula) -> bool {
    let with = |v: &Var, e: usize| {
        let mut env = env.clone();
        env.insert(v.name.clone(), e);
        env
    };
    match phi {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Eq(a, b) => naive_term(m, env, a) == naive_term(m, env, b),
        Formula::Rel(r, args) => {
            let vals: Vec<usize> = args.iter().map(|a| naive_term(m, env, a)).collect();
            m.relations.get(r).is_some_and(|s| s.contains(&vals))
        }
        Formula::And(ps) => ps.iter().all(|p| naive_holds(m, env, p)),
        Formula::Or(ps) => ps.iter().any(|p| naive_holds(m, env, p)),
        Formula::Not(b) => !naive_holds(m, env, b),
        Formula::Implies(a, b) => !naive_holds(m, env, a) || naive_holds(m, env, b),
        Formula::Exists(v, b) => (0..m.size(&v.sort)).any(|e| naive_holds(m, &with(v, e), b)),
        Formula::Forall(v, b) => (0..m.size(&v.sort)).all(|e| naive_holds(m, &with(v, e), b)),
    }
}

/// Every environment over `vars`, built by recursion rather than counting.
pub fn environments(m: &Interpretation, vars: &[Var]) -> Vec<Vec<usize>> {
    match vars.split_last() {
        None => vec![Vec::new()],
        Some((last, rest)) => {
            let mut out = Vec::new();
            for prefix in environments(m, rest) {
                for e in 0..m.size(&last.sort) {
                    let mut t = prefix.clone();
                    t.push(e);
                    out.push(t);
                }
            }
            out
        }
    }
}

pub fn naive_extent(m: &Interpretation, ctx: &Context, phi: &Formula) -> BTreeSet<Vec<usize>> {
    environments(m, ctx.vars())
        .into_iter()
        .filter(|t| {
            let env = ctx.vars().iter().zip(t).map(|(v, &e)| (v.name.clone(), e)).collect();
            naive_holds(m, &env, phi)
        })
        .collect()
}

pub fn naive_satisfies(m: &Interpretation, s: &Sequent) -> bool {
    let lhs = naive_extent(m, &s.context, &s.antecedent_formula());
    let rhs = naive_extent(m, &s.context, &s.succedent_formula());
    lhs.is_subset(&rhs)
}

// Random syntax.

pub const ORACLE_SIGNATURE: &str = "sort X. sort Y. rel P(X). rel R(X, X). rel S(X, Y). rel Q(Y). \
     fun f(X) : X. fun g(X) : Y. const c : X.";

pub fn oracle_theory() -> Theory {
    parse_theory(ORACLE_SIGNATURE).unwrap()
}

pub struct Gen<'a, R: Rng> {
    pub sig: &'a Signature,
    pub rng: &'a mut R,
    pub classical: bool,
    pub term_depth: usize,
    fresh: usize,
}

impl<'a, R: Rng> Gen<'a, R> {
    pub fn new(sig: &'a Signature, rng: &'a mut R, classical: bool) -> Self {
        Gen { sig, rng, classical, term_depth: 1, fresh: 0 }
    }

    pub fn term(&mut self, scope: &[Var], sort: &str, depth: usize) -> Option<Term> {
        let mut options: Vec<Term> = scope.iter().filter(|v| v.sort == sort).map(|v| Term::Var(v.clone())).collect();
        options.extend(self.sig.constants.iter().filter(|(_, s)| *s == sort).map(|(c, s)| Term::constant(c, s)));
        let funs: Vec<(String, Vec<String>)> = self
            .sig
            .functions
            .iter()
            .filter(|(_, (_, r))| r == sort)
            .map(|(f, (args, _))| (f.clone(), args.clone()))
            .collect();
        if depth > 0 && !funs.is_empty() && (options.is_empty() || self.rng.gen_bool(0.3)) {
            let (f, args) = funs.choose(self.rng).unwrap().clone();
            let built: Option<Vec<Term>> = args.iter().map(|a| self.term(scope, a, depth - 1)).collect();
            if let Some(built) = built {
                return Some(Term::app(f, built));
            }
        }
        options.choose(self.rng).cloned()
    }

    pub fn atom(&mut self, scope: &[Var]) -> Formula {
        for _ in 0..8 {
            match self.rng.gen_range(0..6) {
                0 => return Formula::Top,
                1 => return Formula::Bottom,
                2 | 3 => {
                    let sorts: Vec<String> = self.sig.sorts.iter().cloned().collect();
                    let Some(s) = sorts.choose(self.rng).cloned() else { continue };
                    let d = self.term_depth;
                    if let (Some(a), Some(b)) = (self.term(scope, &s, d), self.term(scope, &s, d)) {
                        return Formula::eq(a, b);
                    }
                }
                _ => {
                    let rels: Vec<(String, Vec<String>)> =
                        self.sig.relations.iter().map(|(r, a)| (r.clone(), a.clone())).collect();
                    let Some((r, args)) = rels.choose(self.rng).cloned() else { continue };
                    let d = self.term_depth;
                    let built: Option<Vec<Term>> = args.iter().map(|a| self.term(scope, a, d)).collect();
                    if let Some(built) = built {
                        return Formula::rel(r, built);
                    }
                }
            }
        }
        Formula::Top
    }

    fn fresh_var(&mut self) -> Option<Var> {
        let sorts: Vec<String> = self.sig.sorts.iter().cloned().collect();
        let s = sorts.choose(self.rng)?.clone();
        self.fresh += 1;
        Some(Var::new(format!("u{}", self.fresh), s))
    }

    /// A formula of connective depth at most `depth` over `scope`.
    pub fn formula(&mut self, scope: &[Var], depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.atom(scope);
        }
        let kinds = if self.classical { 6 } else { 3 };
        match self.rng.gen_range(0..kinds) {
            0 | 1 => {
                let n = self.rng.gen_range(2..=3);
                let parts = (0..n).map(|_| self.formula(scope, depth - 1)).collect();
                if self.rng.gen_bool(0.5) {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            2 | 5 => {
                let Some(v) = self.fresh_var() else { return self.atom(scope) };
                let mut inner = scope.to_vec();
                inner.push(v.clone());
                let body = self.formula(&inner, depth - 1);
                if self.classical && self.rng.gen_bool(0.4) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
            3 => Formula::not(self.formula(scope, depth - 1)),
            _ => Formula::implies(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
        }
    }

    pub fn context(&mut self, max_len: usize) -> Context {
        let sorts: Vec<String> = self.sig.sorts.iter().cloned().collect();
        if sorts.is_empty() {
            return Context::new();
        }
        let n = self.rng.gen_range(0..=max_len);
        let vars = (0..n).map(|i| Var::new(format!("x{i}"), sorts.choose(self.rng).unwrap().clone())).collect();
        Context::from_vars(vars).unwrap()
    }

    pub fn sequent(&mut self, ctx: &Context, depth: usize) -> Sequent {
        let scope = ctx.vars().to_vec();
        let na = self.rng.gen_range(0..=2);
        let ns = self.rng.gen_range(0..=2);
        let ante: Vec<Formula> = (0..na).map(|_| self.formula(&scope, depth)).collect();
        let succ: Vec<Formula> = (0..ns).map(|_| self.formula(&scope, depth)).collect();
        Sequent::new(ctx.clone(), ante, succ)
    }
}

/// A random interpretation of `sig` with carriers at most `max`. Sorts
/// that carry a constant or a function value are kept nonempty.
pub fn random_interpretation<R: Rng>(sig: &Signature, max: usize, rng: &mut R) -> Interpretation {
    let forced: BTreeSet<&String> =
        sig.constants.values().chain(sig.functions.values().map(|(_, r)| r)).collect();
    let carriers: BTreeMap<String, usize> = sig
        .sorts
        .iter()
        .map(|s| {
            let lo = usize::from(forced.contains(s));
            (s.clone(), rng.gen_range(lo..=max.max(lo)))
        })
        .collect();
    let mut m = Interpretation { carriers, ..Default::default() };
    let density: f64 = rng.gen_range(0.1..0.9);
    for (r, args) in &sig.relations {
        let tuples = environments(&m, &vars_for(args)).into_iter().filter(|_| rng.gen_bool(density)).collect();
        m.relations.insert(r.clone(), tuples);
    }
    for (f, (args, res)) in &sig.functions {
        let n = m.size(res);
        let table = environments(&m, &vars_for(args)).into_iter().map(|t| (t, rng.gen_range(0..n))).collect();
        m.functions.insert(f.clone(), table);
    }
    for (c, s) in &sig.constants {
        let n = m.size(s);
        m.constants.insert(c.clone(), rng.gen_range(0..n));
    }
    m
}

fn vars_for(sorts: &[String]) -> Vec<Var> {
    sorts.iter().enumerate().map(|(i, s)| Var::new(format!("a{i}"), s.clone())).collect()
}

/// A random well-formed theory over a random small signature.
pub fn random_theory<R: Rng>(rng: &mut R, classical: bool) -> Theory {
    let nsorts = rng.gen_range(1..=2);
    let sorts: Vec<String> = ["A", "B"][..nsorts].iter().map(|s| s.to_string()).collect();
    let mut sig = Signature { sorts: sorts.iter().cloned().collect(), ..Default::default() };
    let pick = |rng: &mut R| sorts.choose(rng).unwrap().clone();
    for i in 0..rng.gen_range(0..=3) {
        let arity = rng.gen_range(0..=2);
        sig.relations.insert(format!("r{i}"), (0..arity).map(|_| pick(rng)).collect());
    }
    for i in 0..rng.gen_range(0..=2) {
        let arity = rng.gen_range(1..=2);
        sig.functions.insert(format!("h{i}"), ((0..arity).map(|_| pick(rng)).collect(), pick(rng)));
    }
    for i in 0..rng.gen_range(0..=2) {
        sig.constants.insert(format!("k{i}"), pick(rng));
    }
    let naxioms = rng.gen_range(0..=3);
    let mut axioms = Vec::new();
    {
        let mut g = Gen::new(&sig, rng, classical);
        for _ in 0..naxioms {
            let ctx = g.context(2);
            axioms.push(g.sequent(&ctx, 3));
        }
    }
    let flavor = Theory::infer_flavor(&axioms);
    Theory::new(sig, axioms, flavor).unwrap()
}

// Presheaf helpers.

/// Every subpresheaf of `p`, by brute force over per-object subsets.
pub fn all_subpresheaves(c: &geologic::category::FiniteCategory, p: &Presheaf) -> Vec<Subpresheaf> {
    let mut acc: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new()];
    for &n in &p.sets {
        let mut next = Vec::new();
        for prefix in &acc {
            for mask in 0u32..(1 << n) {
                let set: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let mut v = prefix.clone();
                v.push(set);
                next.push(v);
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|sets| Subpresheaf { sets })
        .filter(|a| {
            c.arrows().all(|f| a.sets[c.cod(f).0].iter().all(|&x| a.sets[c.dom(f).0].contains(&p.act(f, x))))
        })
        .collect()
}

/// The Boolean algebra of subsets of `k` points, elements named by bitmask.
pub fn powerset_frame(k: usize) -> Frame {
    let n = 1usize << k;
    let names = (0..n).map(|i| format!("b{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| a & b == a).map(move |b| (a, b))).collect();
    Frame::new(names, &pairs).unwrap()
}
