use std::collections::{BTreeMap, BTreeSet};

use super::{Arr, FiniteCategory, GrothendieckTopology, Obj, Sieve, Violation};

/// Finite sets `P(c) = {0..sets[c]}` and, for `f: a → b`, the map
/// `maps[f]: P(b) → P(a)` given as a vector indexed by `P(b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presheaf {
    pub sets: Vec<usize>,
    pub maps: Vec<Vec<usize>>,
}

impl Presheaf {
    /// `x · f`, the restriction of `x ∈ P(cod f)` along `f`.
    pub fn act(&self, f: Arr, x: usize) -> usize {
        self.maps[f.0][x]
    }
}

pub fn validate_presheaf(c: &FiniteCategory, p: &Presheaf) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.sets.len() != c.num_objects() || p.maps.len() != c.arrows.len() {
        out.push(Violation { law: "presheaf shape", witness: "one set per object and one map per arrow".into() });
        return out;
    }
    for f in c.arrows() {
        let m = &p.maps[f.0];
        if m.len() != p.sets[c.cod(f).0] || m.iter().any(|&v| v >= p.sets[c.dom(f).0]) {
            out.push(Violation { law: "presheaf map", witness: format!("map of {} is not a function P(cod) → P(dom)", c.arr_name(f)) });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for o in c.objects() {
        let m = &p.maps[c.id(o).0];
        if m.iter().enumerate().any(|(i, &v)| i != v) {
            out.push(Violation { law: "presheaf identity", witness: c.obj_name(o).to_string() });
        }
    }
    for (&(g, f), &gf) in &c.compose {
        // P(g∘f) = P(f) ∘ P(g)
        for x in 0..p.sets[c.cod(g).0] {
            if p.act(gf, x) != p.act(f, p.act(g, x)) {
                out.push(Violation {
                    law: "presheaf composition",
                    witness: format!("{} ∘ {} at element {x}", c.arr_name(g), c.arr_name(f)),
                });
                break;
            }
        }
    }
    out
}

/// `y(e) = Hom(-, e)`, elements listed in arrow order.
pub fn representable(c: &FiniteCategory, e: Obj) -> Presheaf {
    let homs: Vec<Vec<Arr>> = c.objects().map(|o| c.hom(o, e)).collect();
    let index: Vec<BTreeMap<Arr, usize>> =
        homs.iter().map(|hs| hs.iter().enumerate().map(|(i, &h)| (h, i)).collect()).collect();
    let maps = c
        .arrows()
        .map(|f| homs[c.cod(f).0].iter().map(|&h| index[c.dom(f).0][&c.then(h, f)]).collect())
        .collect();
    Presheaf { sets: homs.iter().map(Vec::len).collect(), maps }
}

/// Counts matching families for `s`, stopping once the count exceeds `cap`.
fn matching_families(c: &FiniteCategory, p: &Presheaf, s: &Sieve, cap: usize) -> usize {
    let order: Vec<Arr> = s.arrows.iter().copied().collect();
    let pos: BTreeMap<Arr, usize> = order.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    // constraints (f, h, f∘h) checked once both f and f∘h are assigned
    let mut checks: Vec<Vec<(usize, Arr, usize)>> = vec![Vec::new(); order.len()];
    for (i, &f) in order.iter().enumerate() {
        for h in c.arrows_into(c.dom(f)) {
            let j = pos[&c.then(f, h)];
            checks[i.max(j)].push((i, h, j));
        }
    }
    fn go(
        k: usize,
        order: &[Arr],
        c: &FiniteCategory,
        p: &Presheaf,
        checks: &[Vec<(usize, Arr, usize)>],
        vals: &mut Vec<usize>,
        count: &mut usize,
        cap: usize,
    ) {
        if *count > cap {
            return;
        }
        if k == order.len() {
            *count += 1;
            return;
        }
        for x in 0..p.sets[c.dom(order[k]).0] {
            vals.push(x);
            if checks[k].iter().all(|&(i, h, j)| p.act(h, vals[i]) == vals[j]) {
                go(k + 1, order, c, p, checks, vals, count, cap);
            }
            vals.pop();
        }
    }
    let mut count = 0;
    go(0, &order, c, p, &checks, &mut Vec::new(), &mut count, cap);
    count
}

/// Every matching family for `s` has exactly one amalgamation.
pub(crate) fn sheaf_for_sieve(c: &FiniteCategory, p: &Presheaf, s: &Sieve) -> bool {
    let n = p.sets[s.target.0];
    // x ↦ (x·f)_f always lands in the matching families; it must be a bijection
    let restrictions: BTreeSet<Vec<usize>> =
        (0..n).map(|x| s.arrows.iter().map(|&f| p.act(f, x)).collect()).collect();
    restrictions.len() == n && matching_families(c, p, s, n) == n
}

/// First covering sieve for which the sheaf condition fails.
pub fn sheaf_failure(c: &FiniteCategory, j: &GrothendieckTopology, p: &Presheaf) -> Option<Sieve> {
    for o in c.objects() {
        for s in &j.covers[o.0] {
            let sieve = Sieve { target: o, arrows: s.clone() };
            if !sheaf_for_sieve(c, p, &sieve) {
                return Some(sieve);
            }
        }
    }
    None
}

pub fn sheaf_check(c: &FiniteCategory, j: &GrothendieckTopology, p: &Presheaf) -> bool {
    sheaf_failure(c, j, p).is_none()
}

/// Per-object subsets `A(c) ⊆ P(c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subpresheaf {
    pub sets: Vec<BTreeSet<usize>>,
}

impl Subpresheaf {
    pub fn empty(p: &Presheaf) -> Subpresheaf {
        Subpresheaf { sets: vec![BTreeSet::new(); p.sets.len()] }
    }

    pub fn full(p: &Presheaf) -> Subpresheaf {
        Subpresheaf { sets: p.sets.iter().map(|&n| (0..n).collect()).collect() }
    }

    /// `d ∈ A(cod f) ⇒ d·f ∈ A(dom f)`.
    pub fn is_stable(&self, c: &FiniteCategory, p: &Presheaf) -> bool {
        c.arrows().all(|f| self.sets[c.cod(f).0].iter().all(|&d| self.sets[c.dom(f).0].contains(&p.act(f, d))))
    }

    pub fn is_subset(&self, other: &Subpresheaf) -> bool {
        self.sets.iter().zip(&other.sets).all(|(a, b)| a.is_subset(b))
    }
}

/// `S_{d,A} = {g: D' → D | d·g ∈ A(D')}`.
pub fn restriction_sieve(c: &FiniteCategory, p: &Presheaf, a: &Subpresheaf, d: Obj, x: usize) -> Sieve {
    let arrows = c.arrows_into(d).into_iter().filter(|&g| a.sets[c.dom(g).0].contains(&p.act(g, x))).collect();
    Sieve { target: d, arrows }
}

/// `S_{d,A}` covering `D` forces `d ∈ A(D)`.
pub fn is_closed_subpresheaf(c: &FiniteCategory, p: &Presheaf, a: &Subpresheaf, j: &GrothendieckTopology) -> bool {
    c.objects().all(|o| (0..p.sets[o.0]).all(|x| a.sets[o.0].contains(&x) || !j.covers(&restriction_sieve(c, p, a, o, x))))
}

/// Smallest closed subpresheaf containing `a`, by iteration to a fixpoint.
pub fn closure(c: &FiniteCategory, p: &Presheaf, a: &Subpresheaf, j: &GrothendieckTopology) -> Subpresheaf {
    let mut cur = a.clone();
    loop {
        let mut next = cur.clone();
        for o in c.objects() {
            for x in 0..p.sets[o.0] {
                if !cur.sets[o.0].contains(&x) && j.covers(&restriction_sieve(c, p, &cur, o, x)) {
                    next.sets[o.0].insert(x);
                }
            }
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}
