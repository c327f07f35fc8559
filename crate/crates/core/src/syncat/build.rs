use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::category::{Arr, ArrowData, CategorySpec, FiniteCategory, Obj};
use crate::proof::term_universe;
use crate::semantics::{
    enumerate_models_with_ceiling, interpret_formula, uniform_bound, Interpretation, SemanticsError, DEFAULT_CEILING,
};
use crate::syntax::{fresh_name, substitute_many, Context, Formula, Term, Theory, Var};

use super::{is_functional, EquivalenceRegime, FormulaInContext, FunctionalRelation, Judge, SyncatError, Tri};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyncatOptions {
    /// Connective depth of enumerated formulas.
    pub depth: usize,
    /// Longest object context.
    pub context_len: usize,
    /// Carrier bound for the models that separate classes.
    pub max_size: usize,
    /// Depth of terms inside atoms.
    pub term_depth: usize,
    pub ceiling: u128,
}

impl Default for SyncatOptions {
    fn default() -> Self {
        SyncatOptions { depth: 1, context_len: 1, max_size: 2, term_depth: 1, ceiling: DEFAULT_CEILING }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassEntry {
    pub name: String,
    pub context: Context,
    pub formula: Formula,
}

impl ClassEntry {
    pub fn fic(&self) -> FormulaInContext {
        FormulaInContext::new(self.context.clone(), self.formula.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArrowOrigin {
    Identity,
    Enumerated,
    Composite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowEntry {
    pub name: String,
    pub source: usize,
    pub target: usize,
    /// Over the source context followed by the target positions.
    pub sigma: Formula,
    pub origin: ArrowOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntacticCategory {
    pub regime: String,
    pub models: usize,
    pub category: FiniteCategory,
    pub classes: Vec<ClassEntry>,
    pub arrows: Vec<ArrowEntry>,
    /// Candidate arrows left out because the regime could not decide them.
    pub omitted: usize,
}

impl SyntacticCategory {
    pub fn is_partial(&self) -> bool {
        self.omitted > 0
    }

    /// The arrow as a functional relation, with the target renamed to the
    /// positions after the source context.
    pub fn relation(&self, a: usize) -> FunctionalRelation {
        let e = &self.arrows[a];
        relation_between(&self.classes[e.source], &self.classes[e.target], &e.sigma)
    }

    pub fn to_json(&self) -> Value {
        let ctx = |c: &Context| c.vars().iter().map(|v| format!("{}:{}", v.name, v.sort)).collect::<Vec<_>>();
        json!({
            "regime": self.regime,
            "models": self.models,
            "partial": self.is_partial(),
            "omitted": self.omitted,
            "category": CategorySpec::from_category(&self.category),
            "classes": self.classes.iter().map(|c| json!({
                "id": c.name, "context": ctx(&c.context), "formula": c.formula.to_string(),
            })).collect::<Vec<_>>(),
            "arrows": self.arrows.iter().map(|a| json!({
                "name": a.name,
                "source": self.classes[a.source].name,
                "target": self.classes[a.target].name,
                "sigma": a.sigma.to_string(),
                "origin": match a.origin {
                    ArrowOrigin::Identity => "identity",
                    ArrowOrigin::Enumerated => "enumerated",
                    ArrowOrigin::Composite => "composite",
                },
            })).collect::<Vec<_>>(),
        })
    }
}

fn relation_between(src: &ClassEntry, tgt: &ClassEntry, sigma: &Formula) -> FunctionalRelation {
    let k = src.context.len();
    let tctx: Context =
        tgt.context.vars().iter().enumerate().map(|(i, v)| Var::new(var_name(k + i), v.sort.clone())).collect();
    let pairs: Vec<(Var, Term)> =
        tgt.context.vars().iter().zip(tctx.vars()).map(|(a, b)| (a.clone(), Term::Var(b.clone()))).collect();
    FunctionalRelation {
        source: src.fic(),
        target: FormulaInContext::new(tctx, substitute_many(&tgt.formula, &pairs)),
        sigma: sigma.clone(),
    }
}

fn var_name(i: usize) -> String {
    format!("x{i}")
}

fn canonical_context(sorts: &[String]) -> Context {
    sorts.iter().enumerate().map(|(i, s)| Var::new(var_name(i), s.clone())).collect()
}

type Bits = Vec<u64>;

fn get(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

/// Where the tuples of each model sit in a bit vector for one sort list.
struct Layout {
    counts: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(models: &[Interpretation], sorts: &[String]) -> Layout {
        let counts: Vec<usize> = models.iter().map(|m| sorts.iter().map(|s| m.size(s)).product()).collect();
        let mut offsets = Vec::new();
        let mut total = 0;
        for &c in &counts {
            offsets.push(total);
            total += c;
        }
        Layout { counts, offsets, total }
    }

    fn empty(&self) -> Bits {
        vec![0; self.total.div_ceil(64).max(1)]
    }
}

#[derive(Default)]
struct Pool {
    classes: Vec<(Bits, Formula)>,
    index: HashMap<Bits, usize>,
}

impl Pool {
    fn insert(&mut self, bits: Bits, f: Formula) {
        if !self.index.contains_key(&bits) {
            self.index.insert(bits.clone(), self.classes.len());
            self.classes.push((bits, f));
        }
    }
}

struct Builder<'a> {
    theory: &'a Theory,
    models: Vec<Interpretation>,
    opts: SyncatOptions,
    pools: BTreeMap<(Vec<String>, usize), Pool>,
    layouts: BTreeMap<Vec<String>, Layout>,
}

impl<'a> Builder<'a> {
    fn layout(&mut self, sorts: &[String]) -> &Layout {
        let models = &self.models;
        self.layouts.entry(sorts.to_vec()).or_insert_with(|| Layout::new(models, sorts))
    }

    fn extent(&mut self, sorts: &[String], ctx: &Context, f: &Formula) -> Bits {
        let (offsets, total) = {
            let l = self.layout(sorts);
            (l.offsets.clone(), l.total)
        };
        let mut bits = vec![0; total.div_ceil(64).max(1)];
        for (m, model) in self.models.iter().enumerate() {
            let sizes = model.sizes(&ctx.sorts());
            for t in interpret_formula(model, ctx, f).tuples {
                let rank = t.iter().zip(&sizes).fold(0, |acc, (&x, &n)| acc * n + x);
                set(&mut bits, offsets[m] + rank);
            }
        }
        bits
    }

    fn atoms(&mut self, sorts: &[String]) -> Pool {
        let ctx = canonical_context(sorts);
        let sig = &self.theory.signature;
        let universe = term_universe(sig, &ctx, self.opts.term_depth);
        let mut formulas = vec![Formula::Top, Formula::Bottom];
        for terms in universe.values() {
            for (i, a) in terms.iter().enumerate() {
                for b in &terms[i + 1..] {
                    formulas.push(Formula::eq(a.clone(), b.clone()));
                }
            }
        }
        for (r, args) in &sig.relations {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for s in args {
                let pool = universe.get(s).map(Vec::as_slice).unwrap_or(&[]);
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| pool.iter().map(move |x| {
                        let mut t = t.clone();
                        t.push(x.clone());
                        t
                    }))
                    .collect();
            }
            formulas.extend(tuples.into_iter().map(|t| Formula::rel(r.clone(), t)));
        }
        let mut pool = Pool::default();
        for f in formulas {
            let bits = self.extent(sorts, &ctx, &f);
            pool.insert(bits, f);
        }
        pool
    }

    fn ensure(&mut self, sorts: &[String], depth: usize) -> Result<(), SyncatError> {
        let key = (sorts.to_vec(), depth);
        if self.pools.contains_key(&key) {
            return Ok(());
        }
        let pool = if depth == 0 {
            self.atoms(sorts)
        } else {
            self.ensure(sorts, depth - 1)?;
            let all_sorts: Vec<String> = self.theory.signature.sorts.iter().cloned().collect();
            for s in &all_sorts {
                let mut ext = sorts.to_vec();
                ext.push(s.clone());
                self.ensure(&ext, depth - 1)?;
            }
            let prev = &self.pools[&(sorts.to_vec(), depth - 1)];
            let n = prev.classes.len() as u128;
            if n * n > self.opts.ceiling {
                return Err(SemanticsError::ResourceLimit { candidates: n * n, ceiling: self.opts.ceiling }.into());
            }
            let mut pool = Pool::default();
            for (b, f) in &prev.classes {
                pool.insert(b.clone(), f.clone());
            }
            for (i, (a, fa)) in prev.classes.iter().enumerate() {
                for (b, fb) in &prev.classes[i + 1..] {
                    let and: Bits = a.iter().zip(b).map(|(x, y)| x & y).collect();
                    pool.insert(and, Formula::and(vec![fa.clone(), fb.clone()]));
                    let or: Bits = a.iter().zip(b).map(|(x, y)| x | y).collect();
                    pool.insert(or, Formula::or(vec![fa.clone(), fb.clone()]));
                }
            }
            let here = &self.layouts[sorts];
            for s in &all_sorts {
                let mut ext = sorts.to_vec();
                ext.push(s.clone());
                let there = &self.layouts[&ext];
                let bound = Var::new(var_name(sorts.len()), s.clone());
                for (b, f) in &self.pools[&(ext.clone(), depth - 1)].classes {
                    let mut out = here.empty();
                    for m in 0..self.models.len() {
                        let c = self.models[m].size(s);
                        for i in 0..here.counts[m] {
                            if (0..c).any(|j| get(b, there.offsets[m] + i * c + j)) {
                                set(&mut out, here.offsets[m] + i);
                            }
                        }
                    }
                    pool.insert(out, Formula::exists(bound.clone(), f.clone()));
                }
            }
            pool
        };
        self.pools.insert(key, pool);
        Ok(())
    }
}

/// Per-model function on tuples: `Some(j)` for each source tuple inside the
/// source class, `None` outside it.
type Func = Vec<Option<usize>>;

#[derive(Default)]
struct ArrowTable {
    /// (source, target, function) → arrow index
    index: HashMap<(usize, usize, Func), usize>,
    list: Vec<ArrowEntry>,
    funcs: Vec<Func>,
}

impl ArrowTable {
    fn add(&mut self, source: usize, target: usize, func: Func, sigma: Formula, origin: ArrowOrigin) {
        let key = (source, target, func);
        if !self.index.contains_key(&key) {
            self.index.insert(key.clone(), self.list.len());
            self.list.push(ArrowEntry { name: String::new(), source, target, sigma, origin });
            self.funcs.push(key.2);
        }
    }
}

struct Object {
    sorts: Vec<String>,
    bits: Bits,
}

/// Reads `σ` over `S ++ T` as a function from `A` to `B`, if it is one.
fn as_function(ls: &Layout, lt: &Layout, lst: &Layout, a: &Bits, b: &Bits, sigma: &Bits) -> Option<Func> {
    let mut func = Vec::with_capacity(ls.total);
    for m in 0..ls.counts.len() {
        let nt = lt.counts[m];
        for i in 0..ls.counts[m] {
            let row: Vec<usize> = (0..nt).filter(|&j| get(sigma, lst.offsets[m] + i * nt + j)).collect();
            if row.iter().any(|&j| !get(b, lt.offsets[m] + j)) {
                return None;
            }
            let inside = get(a, ls.offsets[m] + i);
            match (inside, row.as_slice()) {
                (true, [j]) => func.push(Some(*j)),
                (false, []) => func.push(None),
                _ => return None,
            }
        }
    }
    Some(func)
}

fn compose_funcs(ls: &Layout, lt: &Layout, f: &Func, g: &Func) -> Func {
    let mut out = Vec::with_capacity(f.len());
    for m in 0..ls.counts.len() {
        for i in 0..ls.counts[m] {
            out.push(f[ls.offsets[m] + i].and_then(|j| g[lt.offsets[m] + j]));
        }
    }
    out
}

/// `∃Y (σ(X, Y) ∧ τ(Y, Z))` in canonical positions.
fn compose_formula(k: usize, l: usize, m: usize, sigma: &Formula, tau: &Formula, sorts: &[String]) -> Formula {
    // sorts: S ++ T ++ U
    let mut avoid = std::collections::BTreeSet::new();
    sigma.all_var_names(&mut avoid);
    tau.all_var_names(&mut avoid);
    for i in 0..k + l + m {
        avoid.insert(var_name(i));
    }
    let ys: Vec<Var> = (0..l)
        .map(|i| {
            let n = fresh_name("y", &avoid);
            avoid.insert(n.clone());
            Var::new(n, sorts[k + i].clone())
        })
        .collect();
    let s_pairs: Vec<(Var, Term)> =
        (0..l).map(|i| (Var::new(var_name(k + i), sorts[k + i].clone()), Term::Var(ys[i].clone()))).collect();
    let mut t_pairs: Vec<(Var, Term)> =
        (0..l).map(|i| (Var::new(var_name(i), sorts[k + i].clone()), Term::Var(ys[i].clone()))).collect();
    t_pairs.extend(
        (0..m).map(|i| (Var::new(var_name(l + i), sorts[k + l + i].clone()), Term::var(var_name(k + i), sorts[k + l + i].clone()))),
    );
    let body = Formula::and(vec![substitute_many(sigma, &s_pairs), substitute_many(tau, &t_pairs)]);
    Formula::exists_many(&ys, body)
}

/// Enumerates classes of formulas-in-context and the functional relations
/// between them, then closes the arrows under composition. Classes are
/// always separated by the models up to `opts.max_size`; under the proof
/// regime each enumerated arrow must also be proved functional.
pub fn build_syntactic_category(
    t: &Theory,
    opts: SyncatOptions,
    regime: EquivalenceRegime,
) -> Result<SyntacticCategory, SyncatError> {
    if !t.axioms.iter().all(|a| a.is_geometric()) {
        return Err(SyncatError::NonGeometric);
    }
    let models = enumerate_models_with_ceiling(t, &uniform_bound(&t.signature, opts.max_size), opts.ceiling)?.collect();
    let mut b = Builder { theory: t, models, opts, pools: BTreeMap::new(), layouts: BTreeMap::new() };
    let sorts: Vec<String> = t.signature.sorts.iter().cloned().collect();
    let mut lists: Vec<Vec<String>> = vec![Vec::new()];
    let mut frontier = lists.clone();
    for _ in 0..opts.context_len {
        frontier = frontier
            .iter()
            .flat_map(|l| sorts.iter().map(move |s| {
                let mut l = l.clone();
                l.push(s.clone());
                l
            }))
            .collect();
        lists.extend(frontier.iter().cloned());
    }

    let mut objects = Vec::new();
    let mut classes = Vec::new();
    for l in &lists {
        b.ensure(l, opts.depth)?;
        for (bits, f) in &b.pools[&(l.clone(), opts.depth)].classes {
            classes.push(ClassEntry { name: format!("c{}", objects.len()), context: canonical_context(l), formula: f.clone() });
            objects.push(Object { sorts: l.clone(), bits: bits.clone() });
        }
    }

    let proof_judge = match regime {
        EquivalenceRegime::Proof { .. } => Some(Judge::new(t, regime, opts.ceiling)?),
        EquivalenceRegime::Semantic { .. } => None,
    };

    let mut table = ArrowTable::default();
    let mut omitted = 0;

    for (i, o) in objects.iter().enumerate() {
        let l = b.layout(&o.sorts);
        let func: Func = (0..l.counts.len())
            .flat_map(|m| (0..l.counts[m]).map(move |x| (m, x)))
            .map(|(m, x)| get(&o.bits, l.offsets[m] + x).then_some(x))
            .collect();
        let k = o.sorts.len();
        let ctx = canonical_context(&o.sorts);
        let shifted: Vec<(Var, Term)> = ctx
            .vars()
            .iter()
            .enumerate()
            .map(|(p, v)| (v.clone(), Term::var(var_name(k + p), v.sort.clone())))
            .collect();
        let mut parts = vec![substitute_many(&classes[i].formula, &shifted), classes[i].formula.clone()];
        parts.extend(ctx.vars().iter().enumerate().map(|(p, v)| {
            Formula::eq(Term::Var(v.clone()), Term::var(var_name(k + p), v.sort.clone()))
        }));
        table.add(i, i, func, Formula::and(parts), ArrowOrigin::Identity);
    }

    let proved = |src: usize, dst: usize, sigma: &Formula| -> Result<bool, SyncatError> {
        match &proof_judge {
            Some(j) => Ok(is_functional(j, &relation_between(&classes[src], &classes[dst], sigma))? == Tri::Yes),
            None => Ok(true),
        }
    };

    for src in 0..objects.len() {
        for dst in 0..objects.len() {
            let (s, tg) = (&objects[src].sorts, &objects[dst].sorts);
            let mut joint = s.clone();
            joint.extend(tg.iter().cloned());
            b.ensure(&joint, opts.depth)?;
            b.layout(s);
            b.layout(tg);
            let (ls, lt, lst) = (&b.layouts[s], &b.layouts[tg], &b.layouts[&joint]);
            let mut found = Vec::new();
            for (bits, f) in &b.pools[&(joint.clone(), opts.depth)].classes {
                if let Some(func) = as_function(ls, lt, lst, &objects[src].bits, &objects[dst].bits, bits) {
                    if !table.index.contains_key(&(src, dst, func.clone())) && !found.iter().any(|(g, _)| g == &func) {
                        found.push((func, f.clone()));
                    }
                }
            }
            for (func, f) in found {
                if proved(src, dst, &f)? {
                    table.add(src, dst, func, f, ArrowOrigin::Enumerated);
                } else {
                    omitted += 1;
                }
            }
        }
    }

    // close under composition
    loop {
        let mut fresh = Vec::new();
        for f in 0..table.list.len() {
            for g in 0..table.list.len() {
                if table.list[f].target != table.list[g].source {
                    continue;
                }
                let (a, bo, c) = (table.list[f].source, table.list[f].target, table.list[g].target);
                let func = compose_funcs(&b.layouts[&objects[a].sorts], &b.layouts[&objects[bo].sorts], &table.funcs[f], &table.funcs[g]);
                if table.index.contains_key(&(a, c, func.clone())) || fresh.iter().any(|(x, y, h, _)| (*x, *y, h) == (a, c, &func)) {
                    continue;
                }
                let mut all = objects[a].sorts.clone();
                all.extend(objects[bo].sorts.iter().cloned());
                all.extend(objects[c].sorts.iter().cloned());
                let sigma = compose_formula(
                    objects[a].sorts.len(),
                    objects[bo].sorts.len(),
                    objects[c].sorts.len(),
                    &table.list[f].sigma,
                    &table.list[g].sigma,
                    &all,
                );
                fresh.push((a, c, func, sigma));
            }
        }
        if fresh.is_empty() {
            break;
        }
        for (a, c, func, sigma) in fresh {
            table.add(a, c, func, sigma, ArrowOrigin::Composite);
        }
    }

    // install in a finite category
    let ArrowTable { list: arrows, funcs, .. } = table;
    let mut order: Vec<usize> = (0..arrows.len()).collect();
    order.sort_by_key(|&i| (arrows[i].source, arrows[i].target, arrows[i].origin, i));
    let mut sorted: Vec<ArrowEntry> = order.iter().map(|&i| arrows[i].clone()).collect();
    let sorted_funcs: Vec<Func> = order.iter().map(|&i| funcs[i].clone()).collect();
    let mut counter = 0;
    for a in sorted.iter_mut() {
        a.name = if a.origin == ArrowOrigin::Identity {
            format!("id_{}", classes[a.source].name)
        } else {
            counter += 1;
            format!("a{counter}")
        };
    }
    let mut by_key: HashMap<(usize, usize, &Func), usize> = HashMap::new();
    for (i, a) in sorted.iter().enumerate() {
        by_key.insert((a.source, a.target, &sorted_funcs[i]), i);
    }
    let mut compose = BTreeMap::new();
    for f in 0..sorted.len() {
        for g in 0..sorted.len() {
            if sorted[f].target != sorted[g].source {
                continue;
            }
            let (a, bo, c) = (sorted[f].source, sorted[f].target, sorted[g].target);
            let func = compose_funcs(&b.layouts[&objects[a].sorts], &b.layouts[&objects[bo].sorts], &sorted_funcs[f], &sorted_funcs[g]);
            let gf = by_key[&(a, c, &func)];
            compose.insert((Arr(g), Arr(f)), Arr(gf));
        }
    }
    let identities = (0..objects.len())
        .map(|o| Arr(sorted.iter().position(|a| a.origin == ArrowOrigin::Identity && a.source == o).expect("identity")))
        .collect();
    let category = FiniteCategory {
        objects: classes.iter().map(|c| c.name.clone()).collect(),
        arrows: sorted.iter().map(|a| ArrowData { name: a.name.clone(), dom: Obj(a.source), cod: Obj(a.target) }).collect(),
        identities,
        compose,
    };
    Ok(SyntacticCategory {
        regime: regime.label(),
        models: b.models.len(),
        category,
        classes,
        arrows: sorted,
        omitted,
    })
}
