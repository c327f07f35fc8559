use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    atomic_topology, canonical_topology, topology_from_base, trivial_topology, Arr, CategoryError, CoverageBase,
    FiniteCategory, GrothendieckTopology, Obj, Presheaf, Subpresheaf,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<[String; 2]>,
}

/// Either explicit objects, arrows and a composition table of triples
/// `[g, f, g∘f]`, or a `poset` shorthand.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategorySpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrows: Vec<ArrowSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub identities: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compose: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<PosetSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TopologySpec {
    /// Covering sieves per object, each as a list of arrow names.
    Explicit { covers: BTreeMap<String, Vec<Vec<String>>> },
    /// Covering families per object, saturated into a topology.
    Base { families: BTreeMap<String, Vec<Vec<String>>> },
    Trivial,
    Atomic,
    Canonical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubpresheafSpec {
    pub name: String,
    pub sets: BTreeMap<String, Vec<usize>>,
}

/// Set sizes per object and restriction maps per arrow; identity maps may
/// be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafSpec {
    pub name: String,
    pub sets: BTreeMap<String, usize>,
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub subpresheaves: Vec<SubpresheafSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub category: CategorySpec,
    #[serde(default = "default_topology")]
    pub topology: TopologySpec,
    #[serde(default)]
    pub presheaves: Vec<PresheafSpec>,
}

fn default_topology() -> TopologySpec {
    TopologySpec::Trivial
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedPresheaf {
    pub name: String,
    pub presheaf: Presheaf,
    pub subpresheaves: Vec<(String, Subpresheaf)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedSite {
    pub category: FiniteCategory,
    pub topology: GrothendieckTopology,
    pub presheaves: Vec<LoadedPresheaf>,
}

impl LoadedSite {
    pub fn from_json_str(text: &str) -> Result<LoadedSite, CategoryError> {
        let spec: SiteSpec = serde_json::from_str(text).map_err(|e| CategoryError::Invalid(e.to_string()))?;
        spec.load()
    }
}

impl CategorySpec {
    pub fn build(&self) -> Result<FiniteCategory, CategoryError> {
        if let Some(p) = &self.poset {
            if !self.objects.is_empty() || !self.arrows.is_empty() {
                return Err(CategoryError::Invalid("give either `poset` or objects and arrows".into()));
            }
            let idx = |n: &str| {
                p.elements.iter().position(|e| e == n).ok_or_else(|| CategoryError::UnknownObject(n.to_string()))
            };
            let leq = p.leq.iter().map(|[a, b]| Ok((idx(a)?, idx(b)?))).collect::<Result<Vec<_>, CategoryError>>()?;
            let names: BTreeSet<&String> = p.elements.iter().collect();
            if names.len() != p.elements.len() {
                return Err(CategoryError::Invalid("duplicate poset element".into()));
            }
            return Ok(FiniteCategory::from_poset(&p.elements, &leq));
        }
        let arrows = self.arrows.iter().map(|a| (a.name.clone(), a.dom.clone(), a.cod.clone())).collect();
        let compose: Vec<(String, String, String)> =
            self.compose.iter().map(|[g, f, gf]| (g.clone(), f.clone(), gf.clone())).collect();
        FiniteCategory::new(self.objects.clone(), arrows, &self.identities, &compose)
    }

    /// Explicit description of a category, listing every composite.
    pub fn from_category(c: &FiniteCategory) -> CategorySpec {
        CategorySpec {
            objects: c.objects.clone(),
            arrows: c
                .arrows
                .iter()
                .map(|a| ArrowSpec { name: a.name.clone(), dom: c.obj_name(a.dom).into(), cod: c.obj_name(a.cod).into() })
                .collect(),
            identities: c.objects().map(|o| (c.obj_name(o).to_string(), c.arr_name(c.id(o)).to_string())).collect(),
            compose: c
                .compose
                .iter()
                .map(|(&(g, f), &gf)| [c.arr_name(g).into(), c.arr_name(f).into(), c.arr_name(gf).into()])
                .collect(),
            poset: None,
        }
    }
}

fn arrows_named(c: &FiniteCategory, names: &[String]) -> Result<Vec<Arr>, CategoryError> {
    names.iter().map(|n| c.arr(n).ok_or_else(|| CategoryError::UnknownArrow(n.clone()))).collect()
}

fn object_named(c: &FiniteCategory, name: &str) -> Result<Obj, CategoryError> {
    c.obj(name).ok_or_else(|| CategoryError::UnknownObject(name.to_string()))
}

impl TopologySpec {
    pub fn build(&self, c: &FiniteCategory) -> Result<GrothendieckTopology, CategoryError> {
        Ok(match self {
            TopologySpec::Trivial => trivial_topology(c),
            TopologySpec::Atomic => atomic_topology(c),
            TopologySpec::Canonical => canonical_topology(c),
            TopologySpec::Explicit { covers } => {
                let mut out = vec![BTreeSet::new(); c.num_objects()];
                for (o, sieves) in covers {
                    let o = object_named(c, o)?;
                    for s in sieves {
                        out[o.0].insert(arrows_named(c, s)?.into_iter().collect());
                    }
                }
                GrothendieckTopology { covers: out }
            }
            TopologySpec::Base { families } => {
                let mut base = CoverageBase { families: vec![Vec::new(); c.num_objects()] };
                for (o, fams) in families {
                    let o = object_named(c, o)?;
                    for f in fams {
                        base.families[o.0].push(arrows_named(c, f)?);
                    }
                }
                topology_from_base(c, &base)?
            }
        })
    }
}

impl PresheafSpec {
    pub fn build(&self, c: &FiniteCategory) -> Result<LoadedPresheaf, CategoryError> {
        let mut sets = Vec::new();
        for o in c.objects() {
            let n = self.sets.get(c.obj_name(o)).ok_or_else(|| {
                CategoryError::InvalidPresheaf(format!("{}: no set for object `{}`", self.name, c.obj_name(o)))
            })?;
            sets.push(*n);
        }
        for name in self.sets.keys() {
            object_named(c, name)?;
        }
        for name in self.maps.keys() {
            c.arr(name).ok_or_else(|| CategoryError::UnknownArrow(name.clone()))?;
        }
        let identities: BTreeSet<Arr> = c.identities.iter().copied().collect();
        let mut maps = Vec::new();
        for f in c.arrows() {
            match self.maps.get(c.arr_name(f)) {
                Some(m) => maps.push(m.clone()),
                None if identities.contains(&f) => maps.push((0..sets[c.cod(f).0]).collect()),
                None => {
                    return Err(CategoryError::InvalidPresheaf(format!(
                        "{}: no map for arrow `{}`",
                        self.name,
                        c.arr_name(f)
                    )))
                }
            }
        }
        let presheaf = Presheaf { sets, maps };
        let mut subs = Vec::new();
        for s in &self.subpresheaves {
            let mut a = Subpresheaf::empty(&presheaf);
            for (o, xs) in &s.sets {
                let o = object_named(c, o)?;
                for &x in xs {
                    if x >= presheaf.sets[o.0] {
                        return Err(CategoryError::InvalidPresheaf(format!("{}: element {x} out of range", s.name)));
                    }
                    a.sets[o.0].insert(x);
                }
            }
            subs.push((s.name.clone(), a));
        }
        Ok(LoadedPresheaf { name: self.name.clone(), presheaf, subpresheaves: subs })
    }
}

impl SiteSpec {
    pub fn load(&self) -> Result<LoadedSite, CategoryError> {
        let category = self.category.build()?;
        let topology = self.topology.build(&category)?;
        let presheaves = self.presheaves.iter().map(|p| p.build(&category)).collect::<Result<_, _>>()?;
        Ok(LoadedSite { category, topology, presheaves })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{validate_category, validate_presheaf, validate_topology};

    #[test]
    fn poset_site_loads() {
        let text = r#"{
            "category": {"poset": {"elements": ["0", "a", "b", "1"], "leq": [["0","a"],["0","b"],["a","1"],["b","1"]]}},
            "topology": {"kind": "base", "families": {"1": [["a<=1", "b<=1"]]}},
            "presheaves": [{"name": "const", "sets": {"0": 1, "a": 1, "b": 1, "1": 1},
                            "maps": {"0<=a": [0], "0<=b": [0], "a<=1": [0], "b<=1": [0], "0<=1": [0]},
                            "subpresheaves": [{"name": "bottom", "sets": {"0": [0]}}]}]
        }"#;
        let site = LoadedSite::from_json_str(text).unwrap();
        assert!(validate_category(&site.category).is_empty());
        assert!(validate_topology(&site.category, &site.topology).is_empty());
        let p = &site.presheaves[0];
        assert!(validate_presheaf(&site.category, &p.presheaf).is_empty());
        assert_eq!(p.subpresheaves[0].1.sets[0].len(), 1);
    }

    #[test]
    fn explicit_category_round_trip() {
        let text = r#"{"objects": ["A", "B"], "arrows": [{"name": "f", "dom": "A", "cod": "B"}]}"#;
        let spec: CategorySpec = serde_json::from_str(text).unwrap();
        let c = spec.build().unwrap();
        assert!(validate_category(&c).is_empty());
        let again = CategorySpec::from_category(&c).build().unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn missing_map_is_an_error() {
        let text = r#"{"category": {"poset": {"elements": ["x", "y"], "leq": [["x","y"]]}},
                       "presheaves": [{"name": "p", "sets": {"x": 1, "y": 1}}]}"#;
        assert!(matches!(LoadedSite::from_json_str(text), Err(CategoryError::InvalidPresheaf(_))));
    }
}
