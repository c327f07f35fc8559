//! Finite set-models: interpretations, the set-valued semantics of formulas,
//! sequent satisfaction, exhaustive model enumeration and homomorphisms.
//!
//! Carriers may be empty. A product over the empty context has exactly one
//! element, the empty tuple. Classical connectives get their Boolean
//! meaning (complement, `¬A ∪ B`, dual image for `∀`).

mod enumerate;
mod probe;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{fresh_name, substitute_unchecked, Context, Formula, Sequent, Signature, Term, Theory, Var};

pub use enumerate::{candidate_count, enumerate_models, enumerate_models_with_ceiling, uniform_bound, ModelStream, DEFAULT_CEILING};
pub use probe::{completeness_probe, ProbeError, ProbeReport, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("no carrier for sort `{0}`")]
    MissingCarrier(String),
    #[error("`{0}` is not declared in the signature")]
    UnknownSymbol(String),
    #[error("table of `{name}` is not total: no value at {args:?}")]
    PartialFunction { name: String, args: Vec<usize> },
    #[error("value out of range in `{0}`")]
    OutOfRange(String),
    #[error("no value for constant `{0}`")]
    MissingConstant(String),
    #[error("{candidates} candidate interpretations exceed the ceiling of {ceiling}")]
    ResourceLimit { candidates: u128, ceiling: u128 },
}

/// Carriers are `0..n`; tables are total on the declared carriers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "InterpretationJson", into = "InterpretationJson")]
pub struct Interpretation {
    pub carriers: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, BTreeMap<Vec<usize>, usize>>,
    pub relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub constants: BTreeMap<String, usize>,
}

// Functions are stored as rows `[args..., value]`.
#[derive(Serialize, Deserialize)]
struct InterpretationJson {
    carriers: BTreeMap<String, usize>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    constants: BTreeMap<String, usize>,
}

impl From<InterpretationJson> for Interpretation {
    fn from(j: InterpretationJson) -> Self {
        let functions = j
            .functions
            .into_iter()
            .map(|(f, rows)| {
                let table = rows
                    .into_iter()
                    .filter_map(|mut row| {
                        let v = row.pop()?;
                        Some((row, v))
                    })
                    .collect();
                (f, table)
            })
            .collect();
        let relations = j.relations.into_iter().map(|(r, ts)| (r, ts.into_iter().collect())).collect();
        Interpretation { carriers: j.carriers, functions, relations, constants: j.constants }
    }
}

impl From<Interpretation> for InterpretationJson {
    fn from(m: Interpretation) -> Self {
        let functions = m
            .functions
            .into_iter()
            .map(|(f, table)| {
                let rows = table
                    .into_iter()
                    .map(|(mut args, v)| {
                        args.push(v);
                        args
                    })
                    .collect();
                (f, rows)
            })
            .collect();
        let relations = m.relations.into_iter().map(|(r, ts)| (r, ts.into_iter().collect())).collect();
        InterpretationJson { carriers: m.carriers, functions, relations, constants: m.constants }
    }
}

/// All tuples of the product of `sizes`, in lexicographic order.
pub fn product(sizes: &[usize]) -> Vec<Vec<usize>> {
    if sizes.iter().any(|&n| n == 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

impl Interpretation {
    pub fn size(&self, sort: &str) -> usize {
        self.carriers.get(sort).copied().unwrap_or(0)
    }

    pub fn sizes(&self, sorts: &[String]) -> Vec<usize> {
        sorts.iter().map(|s| self.size(s)).collect()
    }

    /// Checks the interpretation against a signature. Missing relation
    /// tables are read as empty.
    pub fn validate(&self, sig: &Signature) -> Result<(), SemanticsError> {
        for s in &sig.sorts {
            if !self.carriers.contains_key(s) {
                return Err(SemanticsError::MissingCarrier(s.clone()));
            }
        }
        for name in self.carriers.keys() {
            if !sig.sorts.contains(name) {
                return Err(SemanticsError::UnknownSymbol(name.clone()));
            }
        }
        for name in self.functions.keys().chain(self.relations.keys()).chain(self.constants.keys()) {
            if !sig.has_symbol(name) {
                return Err(SemanticsError::UnknownSymbol(name.clone()));
            }
        }
        let empty = BTreeMap::new();
        for (f, (args, res)) in &sig.functions {
            let table = self.functions.get(f).unwrap_or(&empty);
            let dom = product(&self.sizes(args));
            for a in &dom {
                match table.get(a) {
                    None => return Err(SemanticsError::PartialFunction { name: f.clone(), args: a.clone() }),
                    Some(&v) if v >= self.size(res) => return Err(SemanticsError::OutOfRange(f.clone())),
                    _ => {}
                }
            }
            // every argument tuple is present, so extra keys are out of range
            if table.len() != dom.len() {
                return Err(SemanticsError::OutOfRange(f.clone()));
            }
        }
        for (r, args) in &sig.relations {
            let sizes = self.sizes(args);
            for t in self.relations.get(r).into_iter().flatten() {
                if t.len() != sizes.len() || t.iter().zip(&sizes).any(|(x, n)| x >= n) {
                    return Err(SemanticsError::OutOfRange(r.clone()));
                }
            }
        }
        for (c, sort) in &sig.constants {
            match self.constants.get(c) {
                None => return Err(SemanticsError::MissingConstant(c.clone())),
                Some(&v) if v >= self.size(sort) => return Err(SemanticsError::OutOfRange(c.clone())),
                _ => {}
            }
        }
        Ok(())
    }

    fn holds(&self, r: &str, args: &[usize]) -> bool {
        self.relations.get(r).is_some_and(|ts| ts.contains(args))
    }
}

/// A subset of the product of the carriers of a context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetOfProduct {
    pub context: Context,
    pub tuples: BTreeSet<Vec<usize>>,
}

impl SubsetOfProduct {
    pub fn full(m: &Interpretation, ctx: &Context) -> Self {
        SubsetOfProduct { context: ctx.clone(), tuples: product(&m.sizes(&ctx.sorts())).into_iter().collect() }
    }

    pub fn is_subset(&self, other: &SubsetOfProduct) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Image under the projection that forgets the last coordinate.
    pub fn project_last(&self) -> SubsetOfProduct {
        let n = self.context.len().saturating_sub(1);
        let ctx: Context = self.context.vars()[..n].iter().cloned().collect();
        SubsetOfProduct { context: ctx, tuples: self.tuples.iter().map(|t| t[..n].to_vec()).collect() }
    }

    /// Preimage under the same projection, inside `extended`.
    pub fn pull_back(&self, m: &Interpretation, extended: &Context) -> SubsetOfProduct {
        let n = self.context.len();
        let last = extended.vars().last().map(|v| m.size(&v.sort)).unwrap_or(0);
        let tuples = self
            .tuples
            .iter()
            .flat_map(|t| {
                (0..last).map(move |e| {
                    let mut u = t.clone();
                    u.push(e);
                    u
                })
            })
            .collect();
        debug_assert_eq!(extended.len(), n + 1);
        SubsetOfProduct { context: extended.clone(), tuples }
    }
}

/// Value of a term at an environment aligned with `ctx`.
///
/// # Panics
/// If the term uses a variable outside `ctx` or a symbol the interpretation
/// lacks.
pub fn eval_term(m: &Interpretation, ctx: &Context, env: &[usize], t: &Term) -> usize {
    match t {
        Term::Var(v) => env[ctx.position(&v.name).unwrap_or_else(|| panic!("variable {} not in context", v.name))],
        Term::Const { name, .. } => m.constants[name],
        Term::App { fun, args } => {
            let vals: Vec<usize> = args.iter().map(|a| eval_term(m, ctx, env, a)).collect();
            m.functions[fun][&vals]
        }
    }
}

/// The set of environments over `ctx` at which `phi` holds.
pub fn interpret_formula(m: &Interpretation, ctx: &Context, phi: &Formula) -> SubsetOfProduct {
    SubsetOfProduct { context: ctx.clone(), tuples: interp(m, ctx, phi) }
}

fn all(m: &Interpretation, ctx: &Context) -> BTreeSet<Vec<usize>> {
    product(&m.sizes(&ctx.sorts())).into_iter().collect()
}

/// Context extended by the bound variable, renaming it if the context
/// already uses its name.
fn open_binder(ctx: &Context, v: &Var, body: &Formula) -> (Context, Formula) {
    if !ctx.contains_name(&v.name) {
        return (ctx.extended(v.clone()), body.clone());
    }
    let mut avoid = ctx.names();
    body.all_var_names(&mut avoid);
    let z = Var::new(fresh_name(&v.name, &avoid), v.sort.clone());
    let renamed = substitute_unchecked(body, v, &Term::Var(z.clone()));
    (ctx.extended(z), renamed)
}

fn interp(m: &Interpretation, ctx: &Context, phi: &Formula) -> BTreeSet<Vec<usize>> {
    match phi {
        Formula::Top => all(m, ctx),
        Formula::Bottom => BTreeSet::new(),
        Formula::Eq(a, b) => {
            all(m, ctx).into_iter().filter(|e| eval_term(m, ctx, e, a) == eval_term(m, ctx, e, b)).collect()
        }
        Formula::Rel(r, args) => all(m, ctx)
            .into_iter()
            .filter(|e| {
                let vals: Vec<usize> = args.iter().map(|a| eval_term(m, ctx, e, a)).collect();
                m.holds(r, &vals)
            })
            .collect(),
        Formula::And(ps) => {
            let mut acc = all(m, ctx);
            for p in ps {
                if acc.is_empty() {
                    break;
                }
                let s = interp(m, ctx, p);
                acc.retain(|t| s.contains(t));
            }
            acc
        }
        Formula::Or(ps) => ps.iter().flat_map(|p| interp(m, ctx, p)).collect(),
        Formula::Not(a) => {
            let s = interp(m, ctx, a);
            all(m, ctx).into_iter().filter(|t| !s.contains(t)).collect()
        }
        Formula::Implies(a, b) => {
            let sa = interp(m, ctx, a);
            let sb = interp(m, ctx, b);
            all(m, ctx).into_iter().filter(|t| !sa.contains(t) || sb.contains(t)).collect()
        }
        Formula::Exists(v, body) => {
            let (ext, body) = open_binder(ctx, v, body);
            let n = ctx.len();
            interp(m, &ext, &body).into_iter().map(|t| t[..n].to_vec()).collect()
        }
        Formula::Forall(v, body) => {
            let (ext, body) = open_binder(ctx, v, body);
            let s = interp(m, &ext, &body);
            let k = m.size(&v.sort);
            all(m, ctx)
                .into_iter()
                .filter(|t| {
                    (0..k).all(|e| {
                        let mut u = t.clone();
                        u.push(e);
                        s.contains(&u)
                    })
                })
                .collect()
        }
    }
}

/// `M(⋀Γ) ⊆ M(⋁Δ)` over the sequent's context.
pub fn satisfies_sequent(m: &Interpretation, s: &Sequent) -> bool {
    let lhs = interp(m, &s.context, &s.antecedent_formula());
    if lhs.is_empty() {
        return true;
    }
    let rhs = interp(m, &s.context, &s.succedent_formula());
    lhs.is_subset(&rhs)
}

pub fn is_model(m: &Interpretation, t: &Theory) -> bool {
    t.axioms.iter().all(|ax| satisfies_sequent(m, ax))
}

/// Per-sort maps between carriers.
pub type Homomorphism = BTreeMap<String, Vec<usize>>;

/// Whether `h` is a homomorphism `m → m2` of `t`-structures.
pub fn check_homomorphism(t: &Theory, m: &Interpretation, m2: &Interpretation, h: &Homomorphism) -> bool {
    let sig = &t.signature;
    for s in &sig.sorts {
        let Some(map) = h.get(s) else { return false };
        if map.len() != m.size(s) || map.iter().any(|&v| v >= m2.size(s)) {
            return false;
        }
    }
    let image = |sorts: &[String], tuple: &[usize]| -> Vec<usize> {
        tuple.iter().zip(sorts).map(|(&x, s)| h[s][x]).collect()
    };
    for (f, (args, res)) in &sig.functions {
        for a in product(&m.sizes(args)) {
            let lhs = h[res][m.functions[f][&a]];
            let rhs = m2.functions[f][&image(args, &a)];
            if lhs != rhs {
                return false;
            }
        }
    }
    for (r, args) in &sig.relations {
        for tup in m.relations.get(r).into_iter().flatten() {
            if !m2.holds(r, &image(args, tup)) {
                return false;
            }
        }
    }
    sig.constants.iter().all(|(c, s)| h[s][m.constants[c]] == m2.constants[c])
}

/// `h2 ∘ h1`.
pub fn compose_homomorphisms(h1: &Homomorphism, h2: &Homomorphism) -> Homomorphism {
    h1.iter().map(|(s, map)| (s.clone(), map.iter().map(|&x| h2[s][x]).collect())).collect()
}
