//! Explicit finite categories, sieves, Grothendieck topologies, presheaves of
//! finite sets, the sheaf condition and closed subpresheaves.

mod json;
mod limits;
mod presheaf;
mod sieve;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use json::{CategorySpec, PresheafSpec, SiteSpec, SubpresheafSpec, TopologySpec, LoadedPresheaf, LoadedSite};
pub use limits::{finite_limits, FiniteLimitReport};
pub use presheaf::{
    closure, is_closed_subpresheaf, representable, restriction_sieve, sheaf_check, sheaf_failure, validate_presheaf,
    Presheaf, Subpresheaf,
};
pub use sieve::{
    all_sieves, atomic_topology, canonical_topology, generated_sieve, maximal_sieve, principal_sieve, pullback_sieve,
    topology_from_base, trivial_topology, validate_topology, CoverageBase, GrothendieckTopology, Sieve,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Obj(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arr(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrowData {
    pub name: String,
    pub dom: Obj,
    pub cod: Obj,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("arrows do not share a codomain")]
    MixedCodomain,
    #[error("base is not stable: family {family} on `{object}` pulled back along `{arrow}` has no refinement")]
    BaseNotStable { object: String, family: usize, arrow: String },
    #[error("invalid category: {0}")]
    Invalid(String),
    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
}

/// A violated law, with a readable witness.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub law: &'static str,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.law, self.witness)
    }
}

/// `compose[(g, f)] = g ∘ f`, defined when `cod f = dom g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowData>,
    pub identities: Vec<Arr>,
    pub compose: BTreeMap<(Arr, Arr), Arr>,
}

impl FiniteCategory {
    /// Builds a category from named arrows. Identity arrows `id_<obj>` are
    /// added for objects missing from `identities`, and composites with
    /// identities are filled in where the table leaves them out.
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
        identities: &BTreeMap<String, String>,
        compose: &[(String, String, String)],
    ) -> Result<FiniteCategory, CategoryError> {
        let mut obj_index = BTreeMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), Obj(i)).is_some() {
                return Err(CategoryError::Duplicate(o.clone()));
            }
        }
        let obj = |n: &str| obj_index.get(n).copied().ok_or_else(|| CategoryError::UnknownObject(n.to_string()));
        let mut data = Vec::new();
        let mut arr_index = BTreeMap::new();
        for (name, dom, cod) in &arrows {
            if arr_index.insert(name.clone(), Arr(data.len())).is_some() {
                return Err(CategoryError::Duplicate(name.clone()));
            }
            data.push(ArrowData { name: name.clone(), dom: obj(dom)?, cod: obj(cod)? });
        }
        let mut ids = Vec::new();
        for (i, o) in objects.iter().enumerate() {
            let a = match identities.get(o) {
                Some(name) => *arr_index.get(name).ok_or_else(|| CategoryError::UnknownArrow(name.clone()))?,
                None => {
                    let name = format!("id_{o}");
                    if let Some(&a) = arr_index.get(&name) {
                        a
                    } else {
                        let a = Arr(data.len());
                        arr_index.insert(name.clone(), a);
                        data.push(ArrowData { name, dom: Obj(i), cod: Obj(i) });
                        a
                    }
                }
            };
            ids.push(a);
        }
        for o in identities.keys() {
            obj(o)?;
        }
        let arr = |n: &str| arr_index.get(n).copied().ok_or_else(|| CategoryError::UnknownArrow(n.to_string()));
        let mut table = BTreeMap::new();
        for (g, f, gf) in compose {
            table.insert((arr(g)?, arr(f)?), arr(gf)?);
        }
        for (i, a) in data.iter().enumerate() {
            let a_id = Arr(i);
            table.entry((a_id, ids[a.dom.0])).or_insert(a_id);
            table.entry((ids[a.cod.0], a_id)).or_insert(a_id);
        }
        Ok(FiniteCategory { objects, arrows: data, identities: ids, compose: table })
    }

    /// The category of a preorder given by `leq` pairs; the relation is
    /// closed reflexively and transitively. Arrows are named `a<=b`.
    pub fn from_poset(elements: &[String], leq: &[(usize, usize)]) -> FiniteCategory {
        let n = elements.len();
        let mut rel = vec![vec![false; n]; n];
        for i in 0..n {
            rel[i][i] = true;
        }
        for &(a, b) in leq {
            rel[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if rel[i][k] && rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
        let mut arrows = Vec::new();
        let mut index = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] {
                    index.insert((i, j), Arr(arrows.len()));
                    let name = if i == j {
                        format!("id_{}", elements[i])
                    } else {
                        format!("{}<={}", elements[i], elements[j])
                    };
                    arrows.push(ArrowData { name, dom: Obj(i), cod: Obj(j) });
                }
            }
        }
        let identities = (0..n).map(|i| index[&(i, i)]).collect();
        let mut compose = BTreeMap::new();
        for (&(a, b), &f) in &index {
            for (&(b2, c), &g) in &index {
                if b == b2 {
                    compose.insert((g, f), index[&(a, c)]);
                }
            }
        }
        FiniteCategory { objects: elements.to_vec(), arrows, identities, compose }
    }

    /// Only identity arrows.
    pub fn discrete(names: &[String]) -> FiniteCategory {
        FiniteCategory::from_poset(names, &[])
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> {
        (0..self.objects.len()).map(Obj)
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arr> {
        (0..self.arrows.len()).map(Arr)
    }

    pub fn obj(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name).map(Obj)
    }

    pub fn arr(&self, name: &str) -> Option<Arr> {
        self.arrows.iter().position(|a| a.name == name).map(Arr)
    }

    pub fn obj_name(&self, o: Obj) -> &str {
        &self.objects[o.0]
    }

    pub fn arr_name(&self, a: Arr) -> &str {
        &self.arrows[a.0].name
    }

    pub fn dom(&self, a: Arr) -> Obj {
        self.arrows[a.0].dom
    }

    pub fn cod(&self, a: Arr) -> Obj {
        self.arrows[a.0].cod
    }

    pub fn id(&self, o: Obj) -> Arr {
        self.identities[o.0]
    }

    /// `g ∘ f`, if the table defines it.
    pub fn comp(&self, g: Arr, f: Arr) -> Option<Arr> {
        self.compose.get(&(g, f)).copied()
    }

    /// `g ∘ f` for a category that passed validation.
    ///
    /// # Panics
    /// If the composite is missing.
    pub fn then(&self, g: Arr, f: Arr) -> Arr {
        self.comp(g, f).unwrap_or_else(|| panic!("{} ∘ {} is undefined", self.arr_name(g), self.arr_name(f)))
    }

    pub fn hom(&self, a: Obj, b: Obj) -> Vec<Arr> {
        self.arrows().filter(|&f| self.dom(f) == a && self.cod(f) == b).collect()
    }

    pub fn arrows_into(&self, b: Obj) -> Vec<Arr> {
        self.arrows().filter(|&f| self.cod(f) == b).collect()
    }

    pub fn arrows_from(&self, a: Obj) -> Vec<Arr> {
        self.arrows().filter(|&f| self.dom(f) == a).collect()
    }

    /// The same category with objects and arrows renumbered:
    /// `obj_perm[i]` is the new index of object `i`, likewise for arrows.
    pub fn relabel(&self, obj_perm: &[usize], arr_perm: &[usize]) -> FiniteCategory {
        let mut objects = vec![String::new(); self.objects.len()];
        for (i, o) in self.objects.iter().enumerate() {
            objects[obj_perm[i]] = o.clone();
        }
        let mut arrows = vec![ArrowData { name: String::new(), dom: Obj(0), cod: Obj(0) }; self.arrows.len()];
        for (i, a) in self.arrows.iter().enumerate() {
            arrows[arr_perm[i]] =
                ArrowData { name: a.name.clone(), dom: Obj(obj_perm[a.dom.0]), cod: Obj(obj_perm[a.cod.0]) };
        }
        let mut identities = vec![Arr(0); self.identities.len()];
        for (i, a) in self.identities.iter().enumerate() {
            identities[obj_perm[i]] = Arr(arr_perm[a.0]);
        }
        let compose = self
            .compose
            .iter()
            .map(|(&(g, f), &gf)| ((Arr(arr_perm[g.0]), Arr(arr_perm[f.0])), Arr(arr_perm[gf.0])))
            .collect();
        FiniteCategory { objects, arrows, identities, compose }
    }
}

/// Every failed instance of the category laws.
pub fn validate_category(c: &FiniteCategory) -> Vec<Violation> {
    let mut out = Vec::new();
    let name = |a: Arr| c.arr_name(a).to_string();
    if c.identities.len() != c.objects.len() {
        out.push(Violation { law: "identity", witness: "one identity per object is required".into() });
        return out;
    }
    for o in c.objects() {
        let i = c.id(o);
        if c.dom(i) != o || c.cod(i) != o {
            out.push(Violation { law: "identity", witness: format!("{} is not an endo-arrow of {}", name(i), c.obj_name(o)) });
        }
    }
    for (&(g, f), &gf) in &c.compose {
        if c.cod(f) != c.dom(g) {
            out.push(Violation {
                law: "composition",
                witness: format!("{} ∘ {} is listed but the arrows are not composable", name(g), name(f)),
            });
        } else if c.dom(gf) != c.dom(f) || c.cod(gf) != c.cod(g) {
            out.push(Violation {
                law: "composition",
                witness: format!("{} ∘ {} = {} has the wrong endpoints", name(g), name(f), name(gf)),
            });
        }
    }
    for f in c.arrows() {
        for g in c.arrows_from(c.cod(f)) {
            if c.comp(g, f).is_none() {
                out.push(Violation { law: "composition", witness: format!("{} ∘ {} is undefined", name(g), name(f)) });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for f in c.arrows() {
        if c.then(f, c.id(c.dom(f))) != f || c.then(c.id(c.cod(f)), f) != f {
            out.push(Violation { law: "unit", witness: format!("identities are not neutral for {}", name(f)) });
        }
        for g in c.arrows_from(c.cod(f)) {
            for h in c.arrows_from(c.cod(g)) {
                let left = c.then(h, c.then(g, f));
                let right = c.then(c.then(h, g), f);
                if left != right {
                    out.push(Violation {
                        law: "associativity",
                        witness: format!("{} ∘ ({} ∘ {}) ≠ ({} ∘ {}) ∘ {}", name(h), name(g), name(f), name(h), name(g), name(f)),
                    });
                }
            }
        }
    }
    out
}

/// Object and arrow maps between two finite categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub objects: Vec<Obj>,
    pub arrows: Vec<Arr>,
}

pub fn validate_functor(src: &FiniteCategory, dst: &FiniteCategory, f: &Functor) -> Vec<Violation> {
    let mut out = Vec::new();
    if f.objects.len() != src.num_objects() || f.arrows.len() != src.arrows.len() {
        out.push(Violation { law: "functor", witness: "maps are not total".into() });
        return out;
    }
    for a in src.arrows() {
        let fa = f.arrows[a.0];
        if dst.dom(fa) != f.objects[src.dom(a).0] || dst.cod(fa) != f.objects[src.cod(a).0] {
            out.push(Violation { law: "functor endpoints", witness: src.arr_name(a).to_string() });
        }
    }
    for o in src.objects() {
        if f.arrows[src.id(o).0] != dst.id(f.objects[o.0]) {
            out.push(Violation { law: "functor identity", witness: src.obj_name(o).to_string() });
        }
    }
    for (&(g, h), &gh) in &src.compose {
        if dst.comp(f.arrows[g.0], f.arrows[h.0]) != Some(f.arrows[gh.0]) {
            out.push(Violation {
                law: "functor composition",
                witness: format!("{} ∘ {}", src.arr_name(g), src.arr_name(h)),
            });
        }
    }
    out
}
