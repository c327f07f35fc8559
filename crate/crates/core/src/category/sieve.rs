use std::collections::BTreeSet;

use super::presheaf::{representable, sheaf_for_sieve};
use super::{Arr, CategoryError, FiniteCategory, Obj, Violation};

/// A set of arrows into `target` closed under precomposition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sieve {
    pub target: Obj,
    pub arrows: BTreeSet<Arr>,
}

impl Sieve {
    pub fn is_maximal(&self, c: &FiniteCategory) -> bool {
        self.arrows.contains(&c.id(self.target))
    }

    pub fn names(&self, c: &FiniteCategory) -> Vec<String> {
        self.arrows.iter().map(|&a| c.arr_name(a).to_string()).collect()
    }
}

/// Smallest sieve on `target` containing `arrows`.
pub fn generated_sieve(c: &FiniteCategory, target: Obj, arrows: &[Arr]) -> Result<Sieve, CategoryError> {
    if arrows.iter().any(|&f| c.cod(f) != target) {
        return Err(CategoryError::MixedCodomain);
    }
    let mut out = BTreeSet::new();
    for &f in arrows {
        for h in c.arrows_into(c.dom(f)) {
            out.insert(c.then(f, h));
        }
    }
    Ok(Sieve { target, arrows: out })
}

pub fn principal_sieve(c: &FiniteCategory, f: Arr) -> Sieve {
    generated_sieve(c, c.cod(f), &[f]).expect("single arrow")
}

pub fn maximal_sieve(c: &FiniteCategory, o: Obj) -> Sieve {
    Sieve { target: o, arrows: c.arrows_into(o).into_iter().collect() }
}

/// `g*S = {h | g ∘ h ∈ S}`, a sieve on `dom g`.
pub fn pullback_sieve(c: &FiniteCategory, s: &Sieve, g: Arr) -> Sieve {
    debug_assert_eq!(c.cod(g), s.target);
    let a = c.dom(g);
    let arrows = c.arrows_into(a).into_iter().filter(|&h| s.arrows.contains(&c.then(g, h))).collect();
    Sieve { target: a, arrows }
}

fn pullback_set(c: &FiniteCategory, s: &BTreeSet<Arr>, g: Arr) -> BTreeSet<Arr> {
    c.arrows_into(c.dom(g)).into_iter().filter(|&h| s.contains(&c.then(g, h))).collect()
}

/// Every sieve on `o`, as unions of principal sieves, in sorted order.
pub fn all_sieves(c: &FiniteCategory, o: Obj) -> Vec<BTreeSet<Arr>> {
    let principals: Vec<BTreeSet<Arr>> = c.arrows_into(o).into_iter().map(|f| principal_sieve(c, f).arrows).collect();
    let mut seen: BTreeSet<BTreeSet<Arr>> = BTreeSet::new();
    let mut frontier = vec![BTreeSet::new()];
    seen.insert(BTreeSet::new());
    while let Some(s) = frontier.pop() {
        for p in &principals {
            if p.is_subset(&s) {
                continue;
            }
            let u: BTreeSet<Arr> = s.union(p).copied().collect();
            if seen.insert(u.clone()) {
                frontier.push(u);
            }
        }
    }
    seen.into_iter().collect()
}

/// Covering sieves per object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothendieckTopology {
    pub covers: Vec<BTreeSet<BTreeSet<Arr>>>,
}

impl GrothendieckTopology {
    pub fn covers(&self, s: &Sieve) -> bool {
        self.covers[s.target.0].contains(&s.arrows)
    }

    pub fn covers_set(&self, o: Obj, s: &BTreeSet<Arr>) -> bool {
        self.covers[o.0].contains(s)
    }

    pub fn count(&self) -> usize {
        self.covers.iter().map(BTreeSet::len).sum()
    }
}

/// Finite covering families per object.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverageBase {
    pub families: Vec<Vec<Vec<Arr>>>,
}

pub fn trivial_topology(c: &FiniteCategory) -> GrothendieckTopology {
    GrothendieckTopology { covers: c.objects().map(|o| [maximal_sieve(c, o).arrows].into()).collect() }
}

/// All nonempty sieves. A topology only when the category has the
/// right-Ore property; use `validate_topology` to find out.
pub fn atomic_topology(c: &FiniteCategory) -> GrothendieckTopology {
    GrothendieckTopology {
        covers: c.objects().map(|o| all_sieves(c, o).into_iter().filter(|s| !s.is_empty()).collect()).collect(),
    }
}

/// Sieves that are universally effective-epimorphic: every representable
/// satisfies the sheaf condition for all their pullbacks.
pub fn canonical_topology(c: &FiniteCategory) -> GrothendieckTopology {
    let reps: Vec<_> = c.objects().map(|e| representable(c, e)).collect();
    let covers = c
        .objects()
        .map(|o| {
            all_sieves(c, o)
                .into_iter()
                .filter(|s| {
                    c.arrows_into(o).into_iter().all(|g| {
                        let pulled = Sieve { target: c.dom(g), arrows: pullback_set(c, s, g) };
                        reps.iter().all(|p| sheaf_for_sieve(c, p, &pulled))
                    })
                })
                .collect()
        })
        .collect();
    GrothendieckTopology { covers }
}

/// Saturates a coverage base into the topology it generates. The maximal
/// sieve always covers; a base family must be stable in the sense that its
/// pullback along any arrow is refined by some family (or the identity).
pub fn topology_from_base(c: &FiniteCategory, base: &CoverageBase) -> Result<GrothendieckTopology, CategoryError> {
    let n = c.num_objects();
    if base.families.len() != n {
        return Err(CategoryError::Invalid(format!("base lists {} objects, category has {n}", base.families.len())));
    }
    let mut generated: Vec<Vec<BTreeSet<Arr>>> = Vec::with_capacity(n);
    for o in c.objects() {
        let mut fams = vec![maximal_sieve(c, o).arrows];
        for fam in &base.families[o.0] {
            fams.push(generated_sieve(c, o, fam)?.arrows);
        }
        generated.push(fams);
    }
    for o in c.objects() {
        for (i, fam) in generated[o.0].iter().enumerate().skip(1) {
            for g in c.arrows_into(o) {
                let pulled = pullback_set(c, fam, g);
                if !generated[c.dom(g).0].iter().any(|h| h.is_subset(&pulled)) {
                    return Err(CategoryError::BaseNotStable {
                        object: c.obj_name(o).to_string(),
                        family: i - 1,
                        arrow: c.arr_name(g).to_string(),
                    });
                }
            }
        }
    }
    let sieves: Vec<Vec<BTreeSet<Arr>>> = c.objects().map(|o| all_sieves(c, o)).collect();
    let mut covers: Vec<BTreeSet<BTreeSet<Arr>>> = c
        .objects()
        .map(|o| sieves[o.0].iter().filter(|s| generated[o.0].iter().any(|g| g.is_subset(s))).cloned().collect())
        .collect();
    loop {
        let mut changed = false;
        for o in c.objects() {
            let current: Vec<BTreeSet<Arr>> = covers[o.0].iter().cloned().collect();
            for s in &current {
                for g in c.arrows_into(o) {
                    changed |= covers[c.dom(g).0].insert(pullback_set(c, s, g));
                }
            }
        }
        for o in c.objects() {
            for r in &sieves[o.0] {
                if covers[o.0].contains(r) {
                    continue;
                }
                let local = covers[o.0]
                    .iter()
                    .any(|s| s.iter().all(|&f| covers[c.dom(f).0].contains(&pullback_set(c, r, f))));
                if local {
                    covers[o.0].insert(r.clone());
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(GrothendieckTopology { covers })
}

/// Checks the sieve property, maximality, stability and transitivity
/// exhaustively.
pub fn validate_topology(c: &FiniteCategory, j: &GrothendieckTopology) -> Vec<Violation> {
    let mut out = Vec::new();
    if j.covers.len() != c.num_objects() {
        out.push(Violation { law: "shape", witness: "one set of covering sieves per object is required".into() });
        return out;
    }
    let show = |s: &BTreeSet<Arr>| {
        let v: Vec<&str> = s.iter().map(|&a| c.arr_name(a)).collect();
        format!("{{{}}}", v.join(", "))
    };
    for o in c.objects() {
        for s in &j.covers[o.0] {
            let closed = s.iter().all(|&f| c.cod(f) == o && c.arrows_into(c.dom(f)).into_iter().all(|h| s.contains(&c.then(f, h))));
            if !closed {
                out.push(Violation { law: "sieve", witness: format!("{} on {} is not a sieve", show(s), c.obj_name(o)) });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for o in c.objects() {
        let max = maximal_sieve(c, o).arrows;
        if !j.covers[o.0].contains(&max) {
            out.push(Violation { law: "maximality", witness: format!("maximal sieve on {} does not cover", c.obj_name(o)) });
        }
        for s in &j.covers[o.0] {
            for g in c.arrows_into(o) {
                let p = pullback_set(c, s, g);
                if !j.covers[c.dom(g).0].contains(&p) {
                    out.push(Violation {
                        law: "stability",
                        witness: format!("{} on {} pulled back along {} gives {}", show(s), c.obj_name(o), c.arr_name(g), show(&p)),
                    });
                }
            }
        }
        for r in all_sieves(c, o) {
            if j.covers[o.0].contains(&r) {
                continue;
            }
            for s in &j.covers[o.0] {
                if s.iter().all(|&f| j.covers[c.dom(f).0].contains(&pullback_set(c, &r, f))) {
                    out.push(Violation {
                        law: "transitivity",
                        witness: format!("{} on {} is locally covering along {} but does not cover", show(&r), c.obj_name(o), show(s)),
                    });
                    break;
                }
            }
        }
    }
    out
}
