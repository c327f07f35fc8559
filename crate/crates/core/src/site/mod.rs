//! The poset of composable strings `String(C)` over a finite site, the
//! projection `π`, the induced topology `K`, the covering-lifting check and
//! closedness of subpresheaves precomposed with `π`.
//!
//! A string `(C₀; α₁, …, αₙ)` has `cod α₁ = C₀` and `cod αᵢ₊₁ = dom αᵢ`;
//! identities never occur in it. `t ≤ s` when `t` prolongs `s`, so longer
//! strings sit lower. `π(s) = dom αₙ` (or `C₀` when `n = 0`) and
//! `π(t ≤ s)` is the composite of the extra arrows of `t`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::category::{
    all_sieves, generated_sieve, is_closed_subpresheaf, pullback_sieve, Arr, CategorySpec, FiniteCategory, Functor,
    GrothendieckTopology, Obj, Presheaf, Sieve, Subpresheaf,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StringObject {
    pub base: Obj,
    pub arrows: Vec<Arr>,
}

impl StringObject {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// The last object `Cₙ` of the string.
    pub fn end(&self, c: &FiniteCategory) -> Obj {
        self.arrows.last().map(|&a| c.dom(a)).unwrap_or(self.base)
    }

    pub fn is_prefix_of(&self, other: &StringObject) -> bool {
        self.base == other.base && other.arrows.starts_with(&self.arrows)
    }

    pub fn name(&self, c: &FiniteCategory) -> String {
        let mut s = c.obj_name(self.base).to_string();
        for &a in &self.arrows {
            s.push('/');
            s.push_str(c.arr_name(a));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringSite {
    pub bound: usize,
    pub strings: Vec<StringObject>,
    pub category: FiniteCategory,
    pub pi: Functor,
    pub k: GrothendieckTopology,
    /// Non-fatal problems, such as a bound too small to see any arrow.
    pub warnings: Vec<String>,
}

/// Identity-free strings of length at most `bound`, by length and then
/// lexicographically.
pub fn enumerate_strings(c: &FiniteCategory, bound: usize) -> Vec<StringObject> {
    let ids: BTreeSet<Arr> = c.identities.iter().copied().collect();
    let mut layer: Vec<StringObject> = c.objects().map(|o| StringObject { base: o, arrows: Vec::new() }).collect();
    let mut out = layer.clone();
    for _ in 0..bound {
        let mut next = Vec::new();
        for s in &layer {
            for a in c.arrows_into(s.end(c)) {
                if ids.contains(&a) {
                    continue;
                }
                let mut arrows = s.arrows.clone();
                arrows.push(a);
                next.push(StringObject { base: s.base, arrows });
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Composite `α_{n+1} ∘ … ∘ α_{n+p}` of the arrows `t` adds to `s`.
fn extension_arrow(c: &FiniteCategory, s: &StringObject, t: &StringObject) -> Arr {
    let mut acc = c.id(s.end(c));
    for &a in &t.arrows[s.len()..] {
        acc = c.then(acc, a);
    }
    acc
}

pub fn build_string_site(c: &FiniteCategory, j: &GrothendieckTopology, bound: usize) -> StringSite {
    let strings = enumerate_strings(c, bound);
    let names: Vec<String> = strings.iter().map(|s| s.name(c)).collect();
    let mut leq = Vec::new();
    for (ti, t) in strings.iter().enumerate() {
        for (si, s) in strings.iter().enumerate() {
            if ti != si && s.is_prefix_of(t) {
                leq.push((ti, si));
            }
        }
    }
    let category = FiniteCategory::from_poset(&names, &leq);
    let objects: Vec<Obj> = strings.iter().map(|s| s.end(c)).collect();
    let arrows: Vec<Arr> = category
        .arrows
        .iter()
        .map(|a| extension_arrow(c, &strings[a.cod.0], &strings[a.dom.0]))
        .collect();
    let pi = Functor { objects, arrows };
    let k = induced_topology(c, j, &category, &pi);
    let mut warnings = Vec::new();
    let has_arrow = c.arrows().any(|a| !c.identities.contains(&a));
    if bound == 0 && has_arrow {
        warnings.push("bound too small: length bound 0 hides every non-identity arrow of the base category".into());
    }
    StringSite { bound, strings, category, pi, k, warnings }
}

/// `{π(t' ≤ t) | t' ∈ U, t' ≤ t}` closed into a sieve of the base.
fn image_sieve(c: &FiniteCategory, pi: &Functor, u: &Sieve) -> Sieve {
    let imgs: Vec<Arr> = u.arrows.iter().map(|&a| pi.arrows[a.0]).collect();
    generated_sieve(c, pi.objects[u.target.0], &imgs).expect("images share a codomain")
}

/// Whether `U` satisfies the defining condition of `K(s)` for every `t ≤ s`.
pub fn in_induced_topology(
    c: &FiniteCategory,
    j: &GrothendieckTopology,
    strings: &FiniteCategory,
    pi: &Functor,
    u: &Sieve,
) -> bool {
    strings.arrows_into(u.target).into_iter().all(|g| {
        let pulled = pullback_sieve(strings, u, g);
        j.covers(&image_sieve(c, pi, &pulled))
    })
}

fn induced_topology(c: &FiniteCategory, j: &GrothendieckTopology, strings: &FiniteCategory, pi: &Functor) -> GrothendieckTopology {
    let covers = strings
        .objects()
        .map(|s| {
            all_sieves(strings, s)
                .into_iter()
                .filter(|u| in_induced_topology(c, j, strings, pi, &Sieve { target: s, arrows: u.clone() }))
                .collect()
        })
        .collect();
    GrothendieckTopology { covers }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClpFailure {
    pub string: String,
    pub sieve: Vec<String>,
    /// The failure involves a string at the length bound that could be
    /// prolonged, so it may disappear with a larger bound.
    pub truncation_artifact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClpReport {
    pub holds: bool,
    pub checked: usize,
    pub failures: Vec<ClpFailure>,
}

impl ClpReport {
    /// Failures that are not explained by truncation.
    pub fn genuine_failures(&self) -> usize {
        self.failures.iter().filter(|f| !f.truncation_artifact).count()
    }
}

/// Covering lifting: each `J`-cover `R` of `π(s)` lifts to
/// `U = {t ≤ s | π(t ≤ s) ∈ R}`, which must lie in `K(s)`.
pub fn check_clp(c: &FiniteCategory, j: &GrothendieckTopology, site: &StringSite) -> ClpReport {
    let sc = &site.category;
    let ids: BTreeSet<Arr> = c.identities.iter().copied().collect();
    let mut failures = Vec::new();
    let mut checked = 0;
    for s in sc.objects() {
        let base = site.pi.objects[s.0];
        for r in &j.covers[base.0] {
            checked += 1;
            let u: BTreeSet<Arr> = sc.arrows_into(s).into_iter().filter(|a| r.contains(&site.pi.arrows[a.0])).collect();
            let sieve = Sieve { target: s, arrows: u };
            if site.k.covers(&sieve) {
                continue;
            }
            let truncation_artifact = sc.arrows_into(s).into_iter().any(|a| {
                let t = &site.strings[sc.dom(a).0];
                t.len() == site.bound && c.arrows_into(t.end(c)).into_iter().any(|x| !ids.contains(&x))
            });
            failures.push(ClpFailure {
                string: sc.obj_name(s).to_string(),
                sieve: r.iter().map(|&a| c.arr_name(a).to_string()).collect(),
                truncation_artifact,
            });
        }
    }
    ClpReport { holds: failures.is_empty(), checked, failures }
}

/// `E∘π` as a presheaf on the string site.
pub fn precompose(site: &StringSite, e: &Presheaf) -> Presheaf {
    Presheaf {
        sets: site.pi.objects.iter().map(|o| e.sets[o.0]).collect(),
        maps: site.pi.arrows.iter().map(|a| e.maps[a.0].clone()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecomposedReport {
    pub presheaf: Presheaf,
    pub sub: Subpresheaf,
    /// `B` closed in `E` for `J`.
    pub base_closed: bool,
    /// `B∘π` closed in `E∘π` for `K`.
    pub closed: bool,
}

pub fn precomposed_subpresheaf(
    c: &FiniteCategory,
    j: &GrothendieckTopology,
    e: &Presheaf,
    b: &Subpresheaf,
    site: &StringSite,
) -> PrecomposedReport {
    let base_closed = is_closed_subpresheaf(c, e, b, j);
    let presheaf = precompose(site, e);
    let sub = Subpresheaf { sets: site.pi.objects.iter().map(|o| b.sets[o.0].clone()).collect() };
    let closed = is_closed_subpresheaf(&site.category, &presheaf, &sub, &site.k);
    PrecomposedReport { presheaf, sub, base_closed, closed }
}

impl StringSite {
    /// The site in the shared JSON schema, with a `pi` section.
    pub fn to_json(&self, c: &FiniteCategory) -> Value {
        let sc = &self.category;
        let covers: BTreeMap<String, Vec<Vec<String>>> = sc
            .objects()
            .map(|o| {
                let sieves = self.k.covers[o.0].iter().map(|s| s.iter().map(|&a| sc.arr_name(a).to_string()).collect()).collect();
                (sc.obj_name(o).to_string(), sieves)
            })
            .collect();
        let pi_objects: BTreeMap<String, String> =
            sc.objects().map(|o| (sc.obj_name(o).to_string(), c.obj_name(self.pi.objects[o.0]).to_string())).collect();
        let pi_arrows: BTreeMap<String, String> =
            sc.arrows().map(|a| (sc.arr_name(a).to_string(), c.arr_name(self.pi.arrows[a.0]).to_string())).collect();
        json!({
            "bound": self.bound,
            "category": CategorySpec::from_category(sc),
            "topology": {"kind": "explicit", "covers": covers},
            "pi": {"objects": pi_objects, "arrows": pi_arrows},
            "warnings": self.warnings,
        })
    }
}
