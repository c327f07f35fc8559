mod common;

use std::collections::BTreeSet;

use geologic::frame::{
    barr_cover_frame, check_frame_map, double_negation, double_negation_fixpoints, frame_law_violations,
    heyting_implication, negation, open_complement_frame, stone_space, BooleanAlgebraView, FiniteSpace, Frame,
    FrameSpec,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{frames, powerset_frame};

/// Down-sets of a random poset on at most five points, as a space.
fn alexandrov(seed: u64) -> (FiniteSpace, Vec<Vec<bool>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=5);
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        le[i][i] = true;
        for j in i + 1..n {
            le[i][j] = rng.gen_bool(0.35);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let opens: Vec<BTreeSet<usize>> = (0u32..(1 << n))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<BTreeSet<usize>>())
        .filter(|s| s.iter().all(|&q| (0..n).all(|p| !le[p][q] || s.contains(&p))))
        .collect();
    let points = (0..n).map(|i| format!("p{i}")).collect();
    (FiniteSpace { points, opens }, le)
}

fn below(le: &[Vec<bool>], q: usize) -> BTreeSet<usize> {
    (0..le.len()).filter(|&p| le[p][q]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heyting_operations_match_set_formulas(seed in any::<u64>()) {
        let (space, le) = alexandrov(seed);
        let (f, sets) = space.frame().unwrap();
        let n = le.len();
        let index = |s: &BTreeSet<usize>| sets.iter().position(|t| t == s).unwrap();
        for u in f.iter() {
            // ¬U is the set of points whose down-set misses U
            let neg: BTreeSet<usize> = (0..n).filter(|&q| below(&le, q).is_disjoint(&sets[u])).collect();
            prop_assert_eq!(negation(&f, u), index(&neg));
            for v in f.iter() {
                let imp: BTreeSet<usize> = (0..n).filter(|&q| below(&le, q).intersection(&sets[u]).all(|p| sets[v].contains(p))).collect();
                prop_assert_eq!(heyting_implication(&f, u, v), index(&imp));
                prop_assert_eq!(f.meet(u, v), index(&(&sets[u] & &sets[v])));
                prop_assert_eq!(f.join(u, v), index(&(&sets[u] | &sets[v])));
            }
        }
    }

    #[test]
    fn nucleus_and_boolean_fixpoints(seed in any::<u64>()) {
        let (space, _) = alexandrov(seed);
        let (f, _) = space.frame().unwrap();
        prop_assert!(frame_law_violations(&f).is_empty());
        for u in f.iter() {
            let nn = double_negation(&f, u);
            prop_assert!(f.leq(u, nn));
            prop_assert_eq!(double_negation(&f, nn), nn);
            for v in f.iter() {
                prop_assert_eq!(double_negation(&f, f.meet(u, v)), f.meet(nn, double_negation(&f, v)));
            }
        }
        let b = double_negation_fixpoints(&f);
        prop_assert!(b.validate().is_empty());
        for x in b.frame.iter() {
            prop_assert_eq!(b.complement[b.complement[x]], x);
            for y in b.frame.iter() {
                // De Morgan
                let (m, j) = (b.frame.meet(x, y), b.frame.join(x, y));
                prop_assert_eq!(b.complement[m], b.frame.join(b.complement[x], b.complement[y]));
                prop_assert_eq!(b.complement[j], b.frame.meet(b.complement[x], b.complement[y]));
            }
        }
    }

    #[test]
    fn open_complements_and_barr_cover(seed in any::<u64>()) {
        let (space, _) = alexandrov(seed);
        let (f, _) = space.frame().unwrap();
        for u in f.iter() {
            let (up, map) = open_complement_frame(&f, u);
            prop_assert!(check_frame_map(&f, &up, &map).is_empty());
            prop_assert!(map.is_surjective(&up));
        }
        let cover = barr_cover_frame(&f);
        prop_assert_eq!(cover.components.len(), f.len());
        prop_assert!(cover.is_injective(&f));
        prop_assert!(cover.map_violations(&f).is_empty());
        let size: u128 = cover.components.iter().map(|c| c.algebra.len() as u128).product();
        prop_assert_eq!(cover.size(), size);
    }

    #[test]
    fn stone_duality_up_to_sixteen_elements(k in 0usize..=4, seed in any::<u64>()) {
        let f = powerset_frame(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut names = f.elements.clone();
        names.shuffle(&mut rng);
        // rename the elements to hide the bitmask structure
        let spec = FrameSpec::from_frame(&f);
        let rename = |s: &String| names[f.index(s).unwrap()].clone();
        let renamed = FrameSpec {
            elements: spec.elements.iter().map(rename).collect(),
            leq: spec.leq.iter().map(|[a, b]| [rename(a), rename(b)]).collect(),
            ..FrameSpec::default()
        };
        let b = renamed.build_boolean().unwrap();
        let d = stone_space(&b);
        prop_assert_eq!(d.space.points.len(), k);
        prop_assert_eq!(d.opens.len(), 1 << k);
        prop_assert!(d.violations(&b).is_empty());
    }

    #[test]
    fn frame_documents_round_trip(seed in any::<u64>()) {
        let (space, _) = alexandrov(seed);
        let (f, _) = space.frame().unwrap();
        let text = serde_json::to_string(&FrameSpec::from_frame(&f)).unwrap();
        let back: Frame = FrameSpec::from_json_str(&text).unwrap().build().unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn corpus_frames_obey_the_laws() {
    for (name, f) in frames() {
        assert!(f.len() <= 32, "{name}");
        assert!(frame_law_violations(&f).is_empty(), "{name}");
        let cover = barr_cover_frame(&f);
        assert!(cover.is_injective(&f) && cover.map_violations(&f).is_empty(), "{name}");
    }
}

#[test]
fn non_boolean_frames_are_rejected_as_algebras() {
    let chain: Vec<_> = frames().into_iter().filter(|(n, _)| n == "chain3").collect();
    assert!(BooleanAlgebraView::from_frame(chain[0].1.clone()).is_err());
    assert!(BooleanAlgebraView::from_frame(powerset_frame(3)).is_ok());
}
