mod common;

use std::collections::BTreeSet;

use geologic::category::{
    all_sieves, atomic_topology, canonical_topology, trivial_topology, validate_functor, validate_topology, Arr,
    FiniteCategory, GrothendieckTopology, Sieve,
};
use geologic::site::{build_string_site, StringSite};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::sites;

fn random_poset(rng: &mut ChaCha8Rng) -> FiniteCategory {
    let n = rng.gen_range(1..=4);
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.4)).collect();
    FiniteCategory::from_poset(&names, &pairs)
}

fn cases(seed: u64) -> Vec<(FiniteCategory, GrothendieckTopology)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(FiniteCategory, GrothendieckTopology)> =
        sites().into_iter().map(|(_, s)| (s.category, s.topology)).collect();
    let c = random_poset(&mut rng);
    for j in [trivial_topology(&c), atomic_topology(&c), canonical_topology(&c)] {
        if validate_topology(&c, &j).is_empty() {
            out.push((c.clone(), j));
        }
    }
    out
}

/// The sieve on `π(t)` generated by the images of `arrows`, closed by hand.
fn image_sieve(c: &FiniteCategory, site: &StringSite, target: geologic::category::Obj, arrows: &BTreeSet<Arr>) -> BTreeSet<Arr> {
    let mut out = BTreeSet::new();
    for &a in arrows {
        let img = site.pi.arrows[a.0];
        for h in c.arrows_into(c.dom(img)) {
            out.insert(c.then(img, h));
        }
    }
    debug_assert!(out.iter().all(|&a| c.cod(a) == site.pi.objects[target.0]));
    out
}

/// Direct reading of the defining condition of `K(s)`.
fn framebox(c: &FiniteCategory, j: &GrothendieckTopology, site: &StringSite, u: &Sieve) -> bool {
    let sc = &site.category;
    sc.arrows_into(u.target).into_iter().all(|g| {
        let t = sc.dom(g);
        let pulled: BTreeSet<Arr> = sc.arrows_into(t).into_iter().filter(|&h| u.arrows.contains(&sc.then(g, h))).collect();
        j.covers_set(site.pi.objects[t.0], &image_sieve(c, site, t, &pulled))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn string_sites_are_posets_and_pi_is_a_functor(seed in any::<u64>(), bound in 0usize..=3) {
        for (c, j) in cases(seed) {
            let site = build_string_site(&c, &j, bound);
            let sc = &site.category;
            for a in sc.objects() {
                for b in sc.objects() {
                    prop_assert!(sc.hom(a, b).len() <= 1);
                    if a != b {
                        prop_assert!(sc.hom(a, b).is_empty() || sc.hom(b, a).is_empty());
                    }
                }
            }
            prop_assert!(validate_functor(sc, &c, &site.pi).is_empty());
            // surjective on objects
            let hit: BTreeSet<_> = site.pi.objects.iter().copied().collect();
            prop_assert_eq!(hit.len(), c.num_objects());
            prop_assert!(validate_topology(sc, &site.k).is_empty());
        }
    }

    #[test]
    fn induced_topology_matches_its_definition(seed in any::<u64>(), bound in 0usize..=2) {
        for (c, j) in cases(seed) {
            let site = build_string_site(&c, &j, bound);
            for s in site.category.objects() {
                for arrows in all_sieves(&site.category, s) {
                    let u = Sieve { target: s, arrows };
                    prop_assert_eq!(site.k.covers(&u), framebox(&c, &j, &site, &u));
                }
            }
        }
    }

    #[test]
    fn truncating_a_bigger_site_gives_the_smaller_one(seed in any::<u64>(), bound in 0usize..=2) {
        for (c, j) in cases(seed) {
            let small = build_string_site(&c, &j, bound);
            let big = build_string_site(&c, &j, bound + 1);
            let kept: Vec<_> = big.strings.iter().filter(|s| s.len() <= bound).cloned().collect();
            prop_assert_eq!(&kept, &small.strings);
            let n = kept.len();
            for a in small.category.arrows() {
                let (d, e) = (small.category.dom(a), small.category.cod(a));
                prop_assert_eq!(big.category.hom(d, e).len(), 1);
                let b = big.category.hom(d, e)[0];
                prop_assert_eq!(big.pi.arrows[b.0], small.pi.arrows[a.0]);
            }
            for a in big.category.objects().filter(|o| o.0 < n) {
                for b in big.category.objects().filter(|o| o.0 < n) {
                    prop_assert_eq!(big.category.hom(a, b).len(), small.category.hom(a, b).len());
                }
            }
            // once the bound passes the longest chain nothing new appears, so K agrees too
            if big.strings.len() == small.strings.len() {
                prop_assert_eq!(&big.k, &small.k);
            }
        }
    }
}

#[test]
fn acyclic_sites_stop_growing() {
    for (name, s) in sites() {
        let c = &s.category;
        let has_cycle = c.objects().any(|o| c.hom(o, o).len() > 1);
        let a = build_string_site(c, &s.topology, 3);
        let b = build_string_site(c, &s.topology, 4);
        assert_eq!(a.strings.len() == b.strings.len(), !has_cycle, "{name}");
    }
}
